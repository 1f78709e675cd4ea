"""
PDE Runner Node - pseudospectral 적분과 breaking 모니터

breakdown 은 실패가 아니라 결과로 기록된다. 앞선 certificate 가 있으면
관측 breaking 시간과 T_upper 를 비교한다.
"""
from typing import Any, Dict, Optional

import numpy as np

from peakonlab.breaking import blowup_rate_product, superlinear_terminal_growth
from peakonlab.config import ScenarioConfig
from peakonlab.log_utils import log_events, log_execution
from peakonlab.pde_solver import integrate_pde
from peakonlab.state import FieldTrajectory, ScenarioState


def summarize_run(traj: FieldTrajectory) -> Dict[str, Any]:
    series = traj.diagnostics
    h1 = np.asarray(series.h1)
    summary: Dict[str, Any] = {
        "status": traj.status,
        "steps": traj.steps,
        "t_final": traj.t_final,
        "h1_initial": float(h1[0]),
        "h1_drift": float(np.max(np.abs(h1 - h1[0])) / max(abs(h1[0]), 1e-300)),
        "m_min": float(min(series.m_min)),
        "M_min": float(min(series.M_min)),
        "M_max": float(max(series.M_max)),
        "m_bound": series.m_bound,
        "sign_checks_active": series.sign_checks_active,
        "m_bound_breach": any(series.m_bound_breach),
        "positivity_breach": any(series.positivity_breach),
        "criterion_integral": float(series.criterion_integral[-1]),
        "m_tail_max": float(max(series.m_tail)),
    }
    if traj.status == "breakdown":
        summary["breakdown_time"] = traj.breakdown_time
        summary["last_step"] = traj.last_step
        summary["T_est"] = traj.events[-1].detail.get("T_est") if traj.events else None
        summary["rate_product"] = blowup_rate_product(traj)
        summary["criterion_superlinear"] = superlinear_terminal_growth(series.t, series.criterion_integral)
    return summary


class PdeRunner:
    """Runs integrate_pde on the initial field"""

    def __init__(self, run_dir: Optional[str] = None):
        self.run_dir = run_dir

    def __call__(self, state: ScenarioState) -> Dict[str, Any]:
        cfg: ScenarioConfig = state["config"]
        init = state["initial"]
        opts = cfg.integrator_options()
        t_end = cfg.integrator.t_end
        u0 = init["u0"]

        print(f"[PDE] n={u0.grid.n}, period={u0.grid.period:g}, t_end={t_end:g}, form={opts.form}, "
              f"filter={'on' if opts.filter else 'off'}")
        traj = integrate_pde(u0, init["params"], t_end, opts, output_times=cfg.output_times())
        summary = summarize_run(traj)
        for event in traj.events:
            print(f"[PDE] {event.kind} at t={event.t:.6g}: {event.message}")

        results = dict(state.get("results", {}))
        cert = results.get("certificate")
        if cert is not None and cert.satisfied and cert.T_upper:
            t_obs = traj.breakdown_time
            summary["T_upper"] = cert.T_upper
            summary["T_obs"] = t_obs
            summary["T_ratio"] = t_obs / cert.T_upper if t_obs is not None else None
            if t_obs is None:
                print(f"[PDE] No breakdown before t={t_end:g} (T_upper={cert.T_upper:.6g})")
            else:
                print(f"[PDE] T_obs/T_upper = {summary['T_ratio']:.4f}")

        print(f"[PDE] Done: {traj.status} after {traj.steps} steps, H1 drift={summary['h1_drift']:.3e}")

        results["pde"] = {"trajectory": traj, "summary": summary}
        update = {
            "results": results,
            "events": list(state.get("events", [])) + list(traj.events),
            "status": f"pde_{traj.status}",
        }
        log_events(self.run_dir, traj.events)
        log_execution(self.run_dir, "pde_runner", update, metadata=summary)
        return update
