import os
import sys
import argparse
import traceback
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Tuple

from dotenv import load_dotenv

from peakonlab.build_graph import run_pipeline
from peakonlab.config import ScenarioConfig, expand_sweep, load_config
from peakonlab.errors import ConfigError
from peakonlab.peakons import reduction_table
from peakonlab.workspace_manager import WorkspaceManager, print_run_info


EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def execute_run(cfg: ScenarioConfig, run_dir: str) -> Tuple[str, str, Dict[str, str]]:
    """Run one scenario in its directory; returns (status, error text, artifacts)"""
    try:
        result = run_pipeline(cfg, run_dir)
        return result.get("status", "complete"), "", result.get("artifacts", {})
    except ConfigError as exc:
        return "config_error", str(exc), {}
    except Exception:
        return "failed", traceback.format_exc(), {}


def run_scenario(
    config_path: str,
    run_id: str = None,
    jobs: int = 1,
    output_dir: str = None
) -> int:
    """
    Run a scenario config (every sweep entry) in isolated run directories

    Args:
        config_path: Path to the INI scenario file
        run_id: Custom run ID (single-entry configs only)
        jobs: Worker processes for sweep entries
        output_dir: Base directory for runs (overrides config and env)

    Returns:
        Process exit code: 0 finished (breakdown included), 1 failure, 2 invalid config
    """
    if not os.path.exists(config_path):
        print(f"Error: config file not found: {config_path}", file=sys.stderr)
        return EXIT_FAILED

    try:
        cfg = load_config(config_path)
        variants = expand_sweep(cfg)
    except ConfigError as exc:
        print(f"Config error in {config_path}:\n{exc}", file=sys.stderr)
        return EXIT_CONFIG

    ws_manager = WorkspaceManager(output_dir or cfg.output_dir())
    runs = []
    for v in variants:
        rid = (run_id or v.output.run_id) if len(variants) == 1 else None
        runs.append(ws_manager.create_run(v.name, rid, config_path=config_path, kind=v.scenario.kind))

    print("\n" + "="*60)
    print(f"Running {len(variants)} scenario(s) from {config_path}")
    print("="*60 + "\n")

    dirs = [r["run_dir"] for r in runs]
    if jobs > 1 and len(variants) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes: List[Tuple[str, str, Dict[str, str]]] = list(pool.map(execute_run, variants, dirs))
    else:
        outcomes = [execute_run(v, d) for v, d in zip(variants, dirs)]

    code = EXIT_OK
    for run, (status, error, artifacts) in zip(runs, outcomes):
        if status == "config_error":
            print(f"Config error in {run['run_id']}:\n{error}", file=sys.stderr)
            ws_manager.complete_run(run["run_id"], "failed")
            code = max(code, EXIT_CONFIG)
        elif status == "failed":
            print(f"\nError during run {run['run_id']}:\n{error}", file=sys.stderr)
            ws_manager.complete_run(run["run_id"], "failed")
            code = max(code, EXIT_FAILED)
        else:
            ws_manager.complete_run(run["run_id"], status, artifacts)
        print_run_info(ws_manager.get_run(run["run_id"]))
    return code


def list_runs_cmd(base_dir: str, scenario: str = None):
    """List all runs"""
    ws_manager = WorkspaceManager(base_dir)
    runs = ws_manager.list_runs(scenario)

    if not runs:
        print("No runs found.")
        return

    print(f"\nFound {len(runs)} run(s):\n")
    for run in runs:
        status_icon = "[OK]" if run.get("status") in ("complete", "breakdown") else "[--]"
        print(f"{status_icon} {run['run_id']}")
        print(f"   Scenario: {run['scenario']}")
        print(f"   Created: {run['created_at']}")
        print(f"   Status: {run.get('status', 'unknown')}")
        print(f"   Path: {run['run_dir']}\n")


def verify_cmd(base_dir: str, run_id: str) -> int:
    """Compare a run's artifacts with its manifest"""
    ws_manager = WorkspaceManager(base_dir)
    if ws_manager.get_run(run_id) is None:
        print(f"Error: unknown run: {run_id}", file=sys.stderr)
        return EXIT_FAILED
    manifest = ws_manager.load_manifest(run_id)
    changed = ws_manager.verify_artifacts(run_id)
    for name in sorted(manifest):
        mark = "[--]" if name in changed else "[OK]"
        print(f"{mark} {name}")
    print(f"{len(manifest) - len(changed)}/{len(manifest)} artifacts unchanged")
    return EXIT_OK if not changed else EXIT_FAILED


def reduce_cmd():
    """Print the speed-relation reduction table"""
    rows = reduction_table()
    for row in rows:
        mark = "[OK]" if row.exact else "[--]"
        print(f"{mark} {row.name:<16} {row.domain:<6} k={row.k} c={row.c:g} roots={row.computed}")
    return EXIT_OK if all(r.exact for r in rows) else EXIT_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    default_dir = os.getenv("PEAKONLAB_OUTPUT_DIR", "runs")

    parser = argparse.ArgumentParser(
        description="peakonlab - peakon dynamics, pseudospectral runs and breaking certificates"
    )
    subparsers = parser.add_subparsers(dest="command", help="Commands")

    run_parser = subparsers.add_parser("run", help="Run scenario config(s)")
    run_parser.add_argument("config_paths", nargs="+", help="Path(s) to INI scenario files")
    run_parser.add_argument("--run-id", help="Custom run ID")
    run_parser.add_argument("--jobs", type=int, default=1, help="Worker processes for sweep entries")
    run_parser.add_argument("--output-dir", default=None, help="Base directory for run folders")

    list_parser = subparsers.add_parser("list", help="List runs")
    list_parser.add_argument("--scenario", help="Filter by scenario name")
    list_parser.add_argument("--output-dir", default=default_dir)

    cleanup_parser = subparsers.add_parser("cleanup", help="Clean old runs")
    cleanup_parser.add_argument("--days", type=int, default=7, help="Remove runs older than N days")
    cleanup_parser.add_argument("--output-dir", default=default_dir)

    verify_parser = subparsers.add_parser("verify", help="Check a run's artifacts against its manifest")
    verify_parser.add_argument("run_id", help="Run ID")
    verify_parser.add_argument("--output-dir", default=default_dir)

    subparsers.add_parser("reduce", help="Print the speed-relation reduction table")

    args = parser.parse_args(argv)

    if args.command == "run":
        codes = [run_scenario(p, args.run_id, args.jobs, args.output_dir) for p in args.config_paths]
        return max(codes)
    if args.command == "list":
        list_runs_cmd(args.output_dir, args.scenario)
        return EXIT_OK
    if args.command == "cleanup":
        removed = WorkspaceManager(args.output_dir).cleanup_old_runs(args.days)
        print(f"Removed {len(removed)} runs older than {args.days} days")
        return EXIT_OK
    if args.command == "verify":
        return verify_cmd(args.output_dir, args.run_id)
    if args.command == "reduce":
        return reduce_cmd()

    parser.print_help()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
