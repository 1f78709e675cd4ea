"""
Tracer Node - characteristic 추적

PDE 궤적의 dense output 을 따라 seed 별로 q, q_x, m(t, q) 를 두 가지 방법으로 계산.
"""
from typing import Any, Dict, Optional

import numpy as np

from peakonlab.breaking import trace_characteristics
from peakonlab.config import ScenarioConfig
from peakonlab.log_utils import log_event, log_execution
from peakonlab.state import Event, ScenarioState


class Tracer:
    """Traces characteristics through a finished PDE run"""

    def __init__(self, run_dir: Optional[str] = None):
        self.run_dir = run_dir

    def __call__(self, state: ScenarioState) -> Dict[str, Any]:
        cfg: ScenarioConfig = state["config"]
        section = cfg.characteristics
        traj = state["results"]["pde"]["trajectory"]
        grid = traj.grid

        window = None
        if cfg.grid.domain == "line":
            margin = section.margin if section else 1.0
            window = (grid.origin + margin, grid.origin + grid.period - margin)
        if section and section.seeds:
            seeds = np.asarray(section.seeds)
        else:
            count = section.count if section else 20
            lo, hi = window if window else (grid.origin, grid.origin + grid.period)
            seeds = lo + (hi - lo) * (np.arange(count) + 0.5) / count

        print(f"[TRACE] {len(seeds)} seed(s) to t={traj.t_final:.6g}")
        traces = trace_characteristics(seeds, traj, window=window)

        events = list(state.get("events", []))
        for tr in traces:
            if tr.truncated:
                event = Event(kind="truncated", t=tr.t[-1] if tr.t else 0.0,
                              message=f"trace from x0={tr.seed:.6g} left the resolved window")
                events.append(event)
                log_event(self.run_dir, event)

        worst_qx = max(tr.max_qx_rel_error for tr in traces)
        worst_m = max(tr.max_m_rel_error for tr in traces)
        print(f"[TRACE] max rel. error q_x={worst_qx:.2e}, m={worst_m:.2e}")

        results = dict(state.get("results", {}))
        results["traces"] = traces
        update = {"results": results, "events": events, "status": "traces_complete"}
        log_execution(self.run_dir, "tracer", update, metadata={"worst_qx": worst_qx, "worst_m": worst_m})
        return update
