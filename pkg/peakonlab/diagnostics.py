"""
Diagnostics - conserved quantity, per-step monitors and the Holder-exponent probe
"""
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from peakonlab.breaking import blowup_quantity_array, m_upper_bound_from_norms
from peakonlab.kernels import derivative_array, momentum_array, sobolev_norm, spectral_tail
from peakonlab.peakons import SINH_HALF
from peakonlab.state import (
    DiagnosticsSeries, Field, GridSpec, HolderReport, IntegratorOptions, ModelParams, PeakonState,
)


BREACH_TOL = 1e-6
DEFAULT_EPS = (1e-2, 5e-3, 2.5e-3, 1.25e-3)


# ============================================================
# H1 energy
# ============================================================

def h1_energy_array(u: np.ndarray, grid: GridSpec) -> float:
    ux = derivative_array(u, grid)
    return float(grid.h * np.sum(u * u + ux * ux))


def h1_energy(u: Field) -> float:
    """int (u^2 + u_x^2) dx by the trapezoid rule (= int m u dx on the periodic grid)"""
    return h1_energy_array(u.values, u.grid)


def h1_energy_peakons(state: PeakonState) -> float:
    """Closed-form int m u dx of a peakon train (momenta are point masses)"""
    p, q = state.p_array, state.q_array
    diff = q[:, None] - q[None, :]
    if state.domain == "line":
        return float(2.0 * (p @ np.exp(-np.abs(diff)) @ p))
    d = np.mod(diff, 1.0)
    return float(2.0 * SINH_HALF * (p @ np.cosh(0.5 - d) @ p))


# ============================================================
# Per-step monitors
# ============================================================

class DiagnosticsRecorder:
    """Accumulates a DiagnosticsSeries one accepted step at a time

    Sign and bound checks are armed only when min(m0) >= 0.
    """

    def __init__(self, grid: GridSpec, params: ModelParams, u0: np.ndarray, tol: float = BREACH_TOL):
        self.grid = grid
        self.params = params
        self.tol = tol
        m0 = momentum_array(np.asarray(u0, dtype=float), grid)
        self.m0_max = float(np.abs(m0).max())
        self.active = bool(m0.min() >= -1e-10 * max(1.0, self.m0_max))
        self.bound = None
        if self.active:
            h1 = sobolev_norm(np.asarray(u0, dtype=float), 1.0, grid)
            self.bound = m_upper_bound_from_norms(h1, float(m0.max()), params)
        self.series_ = DiagnosticsSeries(m_bound=self.bound, sign_checks_active=self.active)

    def record(self, t: float, u: np.ndarray) -> Dict[str, float]:
        s = self.series_
        ux = derivative_array(u, self.grid)
        m = momentum_array(u, self.grid)
        M = blowup_quantity_array(u, ux, m, self.params)
        m_sup = float(np.abs(m).max())

        running = 0.0
        if s.t:
            running = s.criterion_integral[-1] + 0.5 * (t - s.t[-1]) * (s.m_sup[-1] ** 2 + m_sup ** 2)

        plus_min = float(np.min(u + ux))
        minus_min = float(np.min(u - ux))
        bound_breach = self.active and float(M.max()) > self.bound + self.tol
        positivity_breach = self.active and (
            float(m.min()) < -self.tol * self.m0_max or plus_min < -self.tol or minus_min < -self.tol
        )

        s.t.append(float(t))
        s.h1.append(float(self.grid.h * np.sum(u * u + ux * ux)))
        s.m_min.append(float(m.min()))
        s.m_max.append(float(m.max()))
        s.m_sup.append(m_sup)
        s.M_min.append(float(M.min()))
        s.M_max.append(float(M.max()))
        s.ux_sup.append(float(np.abs(ux).max()))
        s.u_plus_ux_min.append(plus_min)
        s.u_minus_ux_min.append(minus_min)
        s.criterion_integral.append(running)
        s.m_bound_breach.append(bool(bound_breach))
        s.positivity_breach.append(bool(positivity_breach))
        s.m_tail.append(spectral_tail(m, self.grid))
        return {
            "ux_sup": s.ux_sup[-1], "M_min": s.M_min[-1],
            "m_bound_breach": bool(bound_breach), "positivity_breach": bool(positivity_breach),
            "m_tail": s.m_tail[-1],
        }

    def series(self) -> DiagnosticsSeries:
        return self.series_


# ============================================================
# Holder exponent
# ============================================================

def holder_region_classify(s: float, r: float) -> Tuple[Optional[str], Optional[float]]:
    """Region D1-D4 of (s, r) and its exponent beta; boundary points go to the first matching region"""
    if not (s > 2.5 and 0.0 <= r < s):
        return None, None
    if (0.0 <= r <= 1.5 and 3.0 - s <= r <= s - 2.0) or (1.5 < r <= s - 1.0):
        return "D1", 1.0
    if 2.5 < s < 3.0 and 0.0 <= r <= 3.0 - s:
        return "D2", (2.0 * s - 3.0) / (s - r)
    if s - 2.0 <= r <= 1.5:
        return "D3", (s - r) / 2.0
    if s - 1.0 <= r < s:
        return "D4", s - r
    return None, None


def holder_probe(u0: Field, v0: Field, s: float, r: float, t_end: float, params: ModelParams,
                 eps: Sequence[float] = DEFAULT_EPS, opts: Optional[IntegratorOptions] = None) -> HolderReport:
    """Fit log sup_t |u - v|_{H^r} against log |u0 - v0|_{H^s} over a ladder of perturbation sizes

    The perturbation direction is v0 - u0; each rung rescales it to H^s size eps. A report,
    not a test: the continuity estimate only bounds the slope from below.
    """
    from peakonlab.pde_solver import integrate_pde

    region, beta = holder_region_classify(s, r)
    report = HolderReport(s=s, r=r, region=region, beta=beta)
    direction = v0.values - u0.values
    size = sobolev_norm(direction, s, u0.grid)
    if size == 0.0:
        report.eps, report.differences = [0.0], [0.0]
        return report

    base = integrate_pde(u0, params, t_end, opts)
    if base.status == "breakdown":
        report.aborted, report.reason = True, f"reference run broke down at t={base.breakdown_time:.6g}"
        return report

    for e in eps:
        v = Field(grid=u0.grid, values=u0.values + (e / size) * direction, role="u")
        run = integrate_pde(v, params, t_end, opts)
        if run.status == "breakdown":
            report.aborted, report.reason = True, f"perturbed run (eps={e:.3g}) broke down at t={run.breakdown_time:.6g}"
            return report
        diff = max(sobolev_norm(a - b, r, u0.grid) for a, b in zip(base.snapshots, run.snapshots))
        report.eps.append(float(e))
        report.differences.append(float(diff))

    eps_arr = np.asarray(report.eps)
    diff_arr = np.asarray(report.differences)
    positive = diff_arr > 0
    if positive.sum() >= 2:
        report.slope = float(np.polyfit(np.log(eps_arr[positive]), np.log(diff_arr[positive]), 1)[0])
    return report
