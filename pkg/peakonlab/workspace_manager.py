import hashlib
import json
import shutil
from datetime import datetime, timedelta
from pathlib import Path
from typing import Dict, List, Optional


REGISTRY_FILE = "runs.json"
MANIFEST_FILE = "manifest.json"


def file_digest(path: Path) -> str:
    """sha256 of a file's bytes"""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


class WorkspaceManager:
    """Scenario run directories, the runs.json registry and per-run artifact manifests

    Each run records the digest of the config text it was started from; on completion the
    artifacts it wrote are listed with size and sha256 in {run_dir}/manifest.json so a rerun
    of the same config can be compared byte for byte.
    """

    def __init__(self, base_dir: str = "runs"):
        self.base_dir = Path(base_dir)
        self.base_dir.mkdir(parents=True, exist_ok=True)
        self.runs_file = self.base_dir / REGISTRY_FILE

    def create_run(self, scenario_name: str, run_id: Optional[str] = None,
                   config_path: Optional[str] = None, kind: Optional[str] = None) -> Dict[str, str]:
        """Create the directory of one scenario run and register it

        Args:
            scenario_name: Scenario name (sweep entries carry their suffix)
            run_id: Optional custom run ID
            config_path: INI file the run was started from
            kind: Scenario kind

        Returns:
            Dict with run info: {run_id, run_dir, scenario, kind, config, config_sha256, created_at, status}
        """
        if not run_id:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S_%f")
            run_id = f"{scenario_name}_{timestamp}"

        run_dir = self.base_dir / run_id
        run_dir.mkdir(parents=True, exist_ok=True)

        config_sha = None
        if config_path and Path(config_path).is_file():
            config_sha = file_digest(Path(config_path))

        run_info = {
            "run_id": run_id,
            "run_dir": str(run_dir.absolute()),
            "scenario": scenario_name,
            "kind": kind,
            "config": config_path,
            "config_sha256": config_sha,
            "created_at": datetime.now().isoformat(),
            "status": "active",
        }
        self._save_run(run_info)

        print(f"[WORKSPACE] Created run: {run_id}")
        print(f"[WORKSPACE] Path: {run_dir.absolute()}")
        return run_info

    def list_runs(self, scenario_name: Optional[str] = None) -> List[Dict]:
        """Registered runs, optionally filtered by scenario name, newest first"""
        runs = self._load_runs()
        if scenario_name:
            runs = [r for r in runs if r.get("scenario") == scenario_name]
        runs.sort(key=lambda x: x.get("created_at", ""), reverse=True)
        return runs

    def get_run(self, run_id: str) -> Optional[Dict]:
        for run in self._load_runs():
            if run["run_id"] == run_id:
                return run
        return None

    def complete_run(self, run_id: str, status: str = "complete",
                     artifacts: Optional[Dict[str, str]] = None):
        """Record the final status (complete, breakdown, failed) and the artifact manifest"""
        runs = self._load_runs()
        for run in runs:
            if run["run_id"] == run_id:
                run["status"] = status
                run["completed_at"] = datetime.now().isoformat()
                if artifacts:
                    manifest = self.write_manifest(Path(run["run_dir"]), artifacts)
                    run["artifacts"] = sorted(manifest)
                break
        self._save_all_runs(runs)

    def write_manifest(self, run_dir: Path, artifacts: Dict[str, str]) -> Dict[str, Dict]:
        """{name: {bytes, sha256}} of the written artifacts, saved as manifest.json"""
        manifest = {}
        for name, path in sorted(artifacts.items()):
            p = Path(path)
            if p.is_file():
                manifest[name] = {"bytes": p.stat().st_size, "sha256": file_digest(p)}
        with open(run_dir / MANIFEST_FILE, "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
        return manifest

    def load_manifest(self, run_id: str) -> Dict[str, Dict]:
        run = self.get_run(run_id)
        if run is None:
            return {}
        path = Path(run["run_dir"]) / MANIFEST_FILE
        if not path.exists():
            return {}
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)

    def verify_artifacts(self, run_id: str) -> List[str]:
        """Artifacts whose bytes no longer match the manifest (missing files included)"""
        run = self.get_run(run_id)
        if run is None:
            return []
        run_dir = Path(run["run_dir"])
        changed = []
        for name, entry in self.load_manifest(run_id).items():
            p = run_dir / name
            if not p.is_file() or file_digest(p) != entry["sha256"]:
                changed.append(name)
        return changed

    def cleanup_old_runs(self, days: int = 7) -> List[str]:
        """Remove runs older than N days"""
        cutoff = datetime.now() - timedelta(days=days)
        removed, kept = [], []
        for run in self._load_runs():
            if datetime.fromisoformat(run["created_at"]) < cutoff:
                run_dir = Path(run["run_dir"])
                if run_dir.exists():
                    shutil.rmtree(run_dir)
                removed.append(run["run_id"])
            else:
                kept.append(run)
        self._save_all_runs(kept)

        print(f"[WORKSPACE] Cleaned up {len(removed)} old runs")
        return removed

    def _load_runs(self) -> List[Dict]:
        if not self.runs_file.exists():
            return []
        try:
            with open(self.runs_file, "r", encoding="utf-8") as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError):
            return []

    def _save_run(self, run_info: Dict):
        runs = self._load_runs()
        runs.append(run_info)
        self._save_all_runs(runs)

    def _save_all_runs(self, runs: List[Dict]):
        with open(self.runs_file, "w", encoding="utf-8") as f:
            json.dump(runs, f, indent=2, ensure_ascii=False)


def print_run_info(run: Dict):
    """Pretty print run information"""
    print("\n" + "="*60)
    print(f"Run: {run['run_id']}")
    print("="*60)
    print(f"Scenario: {run['scenario']} ({run.get('kind') or '?'})")
    print(f"Directory: {run['run_dir']}")
    print(f"Status: {run.get('status', 'unknown')}")
    if run.get("artifacts"):
        print(f"Artifacts: {', '.join(run['artifacts'])}")
    if "completed_at" in run:
        print(f"Completed: {run['completed_at']}")
    print("="*60 + "\n")
