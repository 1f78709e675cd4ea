"""
Peakon Runner Node - N-peakon 시스템 적분

- integrate_peakons 로 궤적 생성 (충돌 시 이벤트와 함께 정지)
- H1 에너지 drift, N=1 정확해 비교
- N=2 (line): 변환계 (P±, Q±) 적분과 비교
- 선택: 무작위 test function 에 대한 weak residual
"""
from typing import Any, Dict, List, Optional

import numpy as np

from peakonlab.config import ScenarioConfig
from peakonlab.diagnostics import h1_energy_peakons
from peakonlab.log_utils import log_events, log_execution
from peakonlab.peakons import integrate_peakons, integrate_two_peakon_transformed, single_peakon_speed
from peakonlab.state import PeakonState, PeakonTrajectory, ScenarioState
from peakonlab.weak_form import random_test_function, weak_residual_report


def energy_series(traj: PeakonTrajectory) -> np.ndarray:
    return np.array([h1_energy_peakons(traj.state(i)) for i in range(len(traj.t))])


class PeakonRunner:
    """Integrates the peakon ODE system and collects its invariants"""

    def __init__(self, run_dir: Optional[str] = None):
        self.run_dir = run_dir

    def __call__(self, state: ScenarioState) -> Dict[str, Any]:
        cfg: ScenarioConfig = state["config"]
        init = state["initial"]
        params = init["params"]
        state0: PeakonState = init["state"]
        opts = cfg.integrator_options()
        t_end = cfg.integrator.t_end

        print(f"[PEAKONS] Integrating {state0.n_peakons} peakon(s) to t={t_end:g} ({opts.method})")
        traj = integrate_peakons(state0, params, t_end, opts)
        for event in traj.events:
            print(f"[PEAKONS] {event.kind} at t={event.t:.6g}: {event.message}")

        energy = energy_series(traj)
        h1_drift = float(np.max(np.abs(energy - energy[0])) / max(abs(energy[0]), 1e-300))
        summary: Dict[str, Any] = {
            "status": traj.status,
            "t_final": traj.t_final,
            "h1_initial": float(energy[0]),
            "h1_drift": h1_drift,
        }

        if state0.n_peakons == 1:
            c = single_peakon_speed(state0.p[0], params, state0.domain)
            summary["speed"] = c
            summary["q_error"] = float(np.max(np.abs(traj.q_lift[:, 0] - state0.q[0] - c * (traj.t - state0.t))))
            summary["p_drift"] = float(np.max(np.abs(traj.p[:, 0] - state0.p[0])))

        if state0.n_peakons == 2 and state0.domain == "line" and traj.status == "complete":
            t, p, q = integrate_two_peakon_transformed(state0, params, t_end, opts)
            if len(t) == len(traj.t):
                summary["transformed_max_diff"] = float(max(np.max(np.abs(p - traj.p)), np.max(np.abs(q - traj.q))))

        residuals: List[Any] = []
        if cfg.peakons.residual_checks and state0.domain == "line":
            rng = np.random.default_rng(cfg.scenario.seed)
            for _ in range(cfg.peakons.residual_checks):
                phi = random_test_function(rng, traj)
                residuals.append(weak_residual_report(traj, params, phi))
            worst = max(abs(r.value) / r.bound for r in residuals)
            print(f"[PEAKONS] Weak residual: worst |R|/bound = {worst:.3g} over {len(residuals)} test functions")

        print(f"[PEAKONS] Done: status={traj.status}, H1 drift={h1_drift:.3e}")

        results = dict(state.get("results", {}))
        results["peakons"] = {"trajectory": traj, "summary": summary, "residuals": residuals}
        update = {
            "results": results,
            "events": list(state.get("events", [])) + list(traj.events),
            "status": f"peakons_{traj.status}",
        }
        log_events(self.run_dir, traj.events)
        log_execution(self.run_dir, "peakon_runner", update, metadata=summary)
        return update
