from typing import Any, Dict, Optional

from peakonlab.config import ScenarioConfig
from peakonlab.diagnostics import holder_probe
from peakonlab.log_utils import log_event, log_execution
from peakonlab.state import Event, ScenarioState


class Prober:
    """Empirical data-to-solution continuity probe"""

    def __init__(self, run_dir: Optional[str] = None):
        self.run_dir = run_dir

    def __call__(self, state: ScenarioState) -> Dict[str, Any]:
        cfg: ScenarioConfig = state["config"]
        init = state["initial"]
        probe = cfg.probe
        print(f"[PROBE] s={probe.s:g}, r={probe.r:g}, {len(probe.eps)} rungs to t={cfg.integrator.t_end:g}")
        report = holder_probe(
            init["u0"], init["v0"], probe.s, probe.r, cfg.integrator.t_end, init["params"],
            eps=probe.eps, opts=cfg.integrator_options(),
        )

        events = list(state.get("events", []))
        if report.aborted:
            print(f"[PROBE] Aborted: {report.reason}")
            event = Event(kind="probe_aborted", t=cfg.integrator.t_end, message=report.reason)
            events.append(event)
            log_event(self.run_dir, event)
        else:
            slope = "n/a" if report.slope is None else f"{report.slope:.3f}"
            print(f"[PROBE] region={report.region} beta={report.beta} fitted slope={slope}")

        results = dict(state.get("results", {}))
        results["probe"] = report
        update = {"results": results, "events": events, "status": "probe_aborted" if report.aborted else "probe_complete"}
        log_execution(self.run_dir, "prober", update, metadata={"slope": report.slope, "beta": report.beta})
        return update
