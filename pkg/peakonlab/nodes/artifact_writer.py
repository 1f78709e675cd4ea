import os
from typing import Any, Dict

from peakonlab import exporters
from peakonlab.config import ScenarioConfig
from peakonlab.state import ScenarioState


class ArtifactWriter:
    """Writes result files and SUMMARY.md into the run directory"""

    def __init__(self, run_dir: str = "run"):
        self.run_dir = run_dir
        os.makedirs(run_dir, exist_ok=True)

    def path(self, filename: str) -> str:
        return os.path.join(self.run_dir, filename)

    def save_file(self, filename: str, content: str) -> str:
        filepath = self.path(filename)
        with open(filepath, "w", encoding="utf-8", newline="\n") as f:
            f.write(content)
        return filepath

    def __call__(self, state: ScenarioState) -> Dict[str, Any]:
        cfg: ScenarioConfig = state["config"]
        results = state.get("results", {})
        files: Dict[str, str] = {}

        if "peakons" in results:
            res = results["peakons"]
            files["trajectory.csv"] = exporters.write_peakon_trajectory(self.path("trajectory.csv"), res["trajectory"])
            files["peakons.json"] = exporters.write_json(
                self.path("peakons.json"), {"summary": res["summary"], "residuals": res["residuals"]}, "peakon-summary")
        if "pde" in results:
            res = results["pde"]
            traj = res["trajectory"]
            files["snapshots.csv"] = exporters.write_field_snapshots(self.path("snapshots.csv"), traj)
            files["diagnostics.csv"] = exporters.write_diagnostics(self.path("diagnostics.csv"), traj.diagnostics)
            files["pde.json"] = exporters.write_json(
                self.path("pde.json"), {"summary": res["summary"], "events": traj.events}, "pde-summary")
        if "certificate" in results:
            files["certificate.json"] = exporters.write_json(
                self.path("certificate.json"), results["certificate"], "breaking-certificate")
        if "reduction" in results:
            files["reduction.csv"] = exporters.write_reduction_table(self.path("reduction.csv"), results["reduction"])
        if "probe" in results:
            files["probe.json"] = exporters.write_json(self.path("probe.json"), results["probe"], "holder-probe")
        if "traces" in results:
            files["traces.csv"] = exporters.write_traces(self.path("traces.csv"), results["traces"])
        checks = state.get("checks", [])
        files["checks.json"] = exporters.write_json(self.path("checks.json"), checks, "checks")

        print(f"[ARTIFACTS] Wrote {len(files)} file(s) to {self.run_dir}")

        summary = f"""# Run Summary

Scenario: {cfg.name} ({cfg.scenario.kind})
Model: {cfg.params().label} k = {cfg.params().as_tuple()}

## Files
"""
        for name in sorted(files):
            summary += f"- {name}\n"

        events = state.get("events", [])
        summary += f"\n## Events\nTotal: {len(events)}\n"
        for e in events:
            summary += f"- {e.kind} at t={exporters.fmt(e.t)}: {e.message}\n"

        passed = sum(1 for c in checks if c.passed)
        summary += f"\n## Checks\nPassed: {passed}/{len(checks)}\n\n"
        for c in checks:
            mark = "✓" if c.passed else "✗"
            value = "" if c.value is None else f" ({exporters.fmt(c.value)})"
            summary += f"{mark} {c.name}{value}\n"

        files["SUMMARY.md"] = self.save_file("SUMMARY.md", summary)

        breakdown = "pde" in results and results["pde"]["trajectory"].status == "breakdown"
        return {"artifacts": files, "status": "breakdown" if breakdown else "complete"}
