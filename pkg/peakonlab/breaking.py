"""
Breaking analysis - blow-up quantity, characteristic flow and breaking certificates

The characteristic q(t, x) solves q_t = k1(u^2 - u_x^2) + k2 u^2 + k3 u along which

    q_x(t)       = exp( int (2k1 m + 2k2 u + k3) u_x dtau )
    m(t, q(t))   = m0(x0) exp( -int (2k1 m + 3k2 u + 2k3) u_x dtau )

and M = (2k1 m + 3k2 u + 2k3) u_x drives breaking. Certificates evaluate the sufficient
conditions on the initial datum; they never claim breaking on their own.
"""
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp

from peakonlab.kernels import derivative_array, momentum_array, sobolev_norm, spectral_interpolate
from peakonlab.state import (
    BreakingCertificate, CharacteristicTrace, DiagnosticsSeries, Field, FieldTrajectory, ModelParams,
)


SIGN_TOL = 1e-10
RATE_TARGET = -0.5


# ============================================================
# Blow-up quantity and characteristic speed
# ============================================================

def blowup_quantity_array(u, ux, m, params: ModelParams):
    k1, k2, k3 = params.as_tuple()
    return (2.0 * k1 * m + 3.0 * k2 * u + 2.0 * k3) * ux


def blowup_quantity(u: Field, params: ModelParams) -> Field:
    """M = (2k1 m + 3k2 u + 2k3) u_x with m and u_x taken spectrally"""
    ux = derivative_array(u.values, u.grid)
    m = momentum_array(u.values, u.grid)
    return Field(grid=u.grid, values=blowup_quantity_array(u.values, ux, m, params), role="M")


def characteristic_speed(u, ux, params: ModelParams):
    k1, k2, k3 = params.as_tuple()
    return k1 * (u * u - ux * ux) + k2 * u * u + k3 * u


def characteristic_rhs(q: float, u: Field, params: ModelParams) -> float:
    """dq/dt at q from the trigonometric interpolant of u"""
    uq = spectral_interpolate(u, [q])[0]
    uxq = spectral_interpolate(u, [q], derivative=1)[0]
    return float(characteristic_speed(uq, uxq, params))


def _sample(values: np.ndarray, grid, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """u, u_x and m of a grid field at arbitrary points"""
    m = momentum_array(values, grid)
    return (
        spectral_interpolate(values, points, grid=grid),
        spectral_interpolate(values, points, derivative=1, grid=grid),
        spectral_interpolate(m, points, grid=grid),
    )


# ============================================================
# Characteristics
# ============================================================

def trace_characteristics(seeds: Sequence[float], traj: FieldTrajectory, params: Optional[ModelParams] = None,
                          window: Optional[Tuple[float, float]] = None, delta: float = 1e-4,
                          rtol: float = 1e-11, atol: float = 1e-12) -> List[CharacteristicTrace]:
    """Integrate the characteristic flow through the trajectory's dense output

    Each seed carries two neighbours at x0 -/+ delta (the direct q_x by central difference) and
    the two exponent integrals. A trace that leaves `window` is cut there and flagged truncated.
    """
    params = params or traj.params
    grid = traj.grid
    seeds = np.asarray(seeds, dtype=float)
    k = seeds.size
    starts = np.concatenate([seeds, seeds - delta, seeds + delta])
    _, _, m_seed = _sample(np.asarray(traj.snapshots[0]), grid, seeds)
    k1, k2, k3 = params.as_tuple()

    def rhs(t, y):
        q = y[:3 * k]
        u, ux, m = _sample(traj.field_at(t), grid, q)
        dq = characteristic_speed(u, ux, params)
        uc, uxc, mc = u[:k], ux[:k], m[:k]
        d_stretch = (2.0 * k1 * mc + 2.0 * k2 * uc + k3) * uxc
        d_decay = -blowup_quantity_array(uc, uxc, mc, params)
        return np.concatenate([dq, d_stretch, d_decay])

    t_end = traj.t_final
    t_eval = np.asarray([t for t in traj.times if t <= t_end])
    y0 = np.concatenate([starts, np.zeros(2 * k)])
    sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", t_eval=t_eval, rtol=rtol, atol=atol)

    # direct samples along every trace, shape (seeds, times)
    along = np.empty((3, k, len(sol.t)))
    for j, t in enumerate(sol.t):
        along[:, :, j] = _sample(traj.field_at(t), grid, sol.y[:k, j])

    traces = []
    for i, x0 in enumerate(seeds):
        q = sol.y[i]
        qx = np.exp(sol.y[3 * k + i])
        qx_direct = (sol.y[2 * k + i] - sol.y[k + i]) / (2.0 * delta)
        m_transported = m_seed[i] * np.exp(sol.y[4 * k + i])

        keep = len(sol.t)
        truncated = False
        if window is not None:
            outside = np.nonzero((q < window[0]) | (q > window[1]))[0]
            if outside.size:
                keep, truncated = int(outside[0]), True

        ts = sol.t[:keep]
        u, ux, m = along[0, i, :keep], along[1, i, :keep], along[2, i, :keep]
        M = blowup_quantity_array(u, ux, m, params)

        qx_err = np.abs(qx[:keep] - qx_direct[:keep]) / np.abs(qx_direct[:keep]) if keep else np.zeros(0)
        m_scale = np.maximum(np.abs(m), 1e-8 * max(abs(m_seed[i]), 1.0))
        m_err = np.abs(m - m_transported[:keep]) / m_scale if keep else np.zeros(0)
        sign_ok = True
        if abs(m_seed[i]) > 1e-8:
            significant = np.abs(m) > SIGN_TOL
            sign_ok = bool(np.all(np.sign(m[significant]) == np.sign(m_seed[i])))

        traces.append(CharacteristicTrace(
            seed=float(x0), t=ts.tolist(), q=q[:keep].tolist(), q_x=qx[:keep].tolist(),
            q_x_direct=qx_direct[:keep].tolist(), u=u.tolist(), u_x=ux.tolist(), m=m.tolist(),
            m_transported=m_transported[:keep].tolist(), M=M.tolist(), truncated=truncated,
            max_qx_rel_error=float(qx_err.max()) if qx_err.size else 0.0,
            max_m_rel_error=float(m_err.max()) if m_err.size else 0.0,
            qx_positive=bool(np.all(qx_direct[:keep] > 0) and np.all(qx[:keep] > 0)),
            m_sign_preserved=sign_ok,
        ))
    return traces


# ============================================================
# Gradient-breaking certificate
# ============================================================

def gamma_branches(params: ModelParams) -> List[float]:
    """Both roots of the Case-1 gamma (k2, k3 > 0)"""
    k1, k2, k3 = params.as_tuple()
    root = np.sqrt(4.0 * k1 * k1 + 6.0 * k1 * k2)
    pre = k3 / (3.0 * k2 * k2)
    return [pre * (4.0 * k1 + 3.0 * k2 + 2.0 * root), pre * (4.0 * k1 + 3.0 * k2 - 2.0 * root)]


def alpha_floor(params: ModelParams) -> float:
    return 2.0 + 4.0 * params.k1 / (3.0 * params.k2)


def gradient_breaking_inequality(u0: float, ux0: float, m0: float, params: ModelParams) -> Dict[str, object]:
    """Threshold(s) for u0_x(x0) and the time bound at one point; None fields when not applicable"""
    case = params.gradient_breaking_case()
    out: Dict[str, object] = {"case": case, "gammas": [], "alpha": None, "rhs": [], "holds": [], "T_upper": None}
    if case is None:
        return out
    k1, k2, k3 = params.as_tuple()
    if case == 1:
        alpha = alpha_floor(params)
        scale = -alpha / np.sqrt(2.0) * np.sqrt((2.0 * k1 + 3.0 * k2) / (2.0 * k1))
        gammas = gamma_branches(params)
        rhs = [scale * (u0 + (3.0 * k2 * g + 3.0 * k3) / (2.0 * (2.0 * k1 + 3.0 * k2))) for g in gammas]
        out.update(gammas=gammas, alpha=alpha)
    elif case == 2:
        out.update(gammas=[3.0 * k3 / (8.0 * k1)], alpha=1.0)
        rhs = [-(u0 + 3.0 * k3 / (4.0 * k1)) / np.sqrt(2.0)]
    elif case == 3:
        rhs = [-np.sqrt((2.0 * k1 + 3.0 * k2) / (2.0 * k1)) * u0 / np.sqrt(2.0)]
    else:
        rhs = [-u0 / np.sqrt(2.0)]
    out["rhs"] = [float(v) for v in rhs]
    out["holds"] = [bool(ux0 < v) for v in rhs]
    if any(out["holds"]) and m0 > 0:
        out["T_upper"] = float(-1.0 / (2.0 * k1 * m0 * ux0))
    return out


def _initial_point_values(u0: Field, x: float) -> Tuple[float, float, float]:
    u, ux, m = _sample(u0.values, u0.grid, np.array([x]))
    return float(u[0]), float(ux[0]), float(m[0])


def _m0_nonnegative(m0: np.ndarray) -> bool:
    return bool(m0.min() >= -SIGN_TOL * max(1.0, float(np.abs(m0).max())))


def certify_gradient_breaking(u0: float, ux0: float, m0: float, params: ModelParams,
                              preconditions: Optional[Dict[str, bool]] = None,
                              point: Optional[float] = None, h1_norm: Optional[float] = None) -> BreakingCertificate:
    """Gradient-breaking certificate from point values u0(x0), u0_x(x0), m0(x0)"""
    case = params.gradient_breaking_case()
    if case is None:
        return BreakingCertificate(
            theorem="none", status="not-applicable", params=params, u0=u0, ux0=ux0, m0=m0,
            notes=["requires k1 > 0, k2 >= 0, k3 >= 0"],
        )
    pre = {"k1_positive": True, "m0_x0_positive": m0 > 0}
    pre.update(preconditions or {})
    res = gradient_breaking_inequality(u0, ux0, m0, params)
    rhs = res["rhs"]
    best = int(np.argmax(rhs))
    notes = []
    if case == 1:
        notes.append("alpha evaluated at its floor with strict inequality")
    if "m0_nonnegative" not in pre:
        notes.append("m0 >= 0 on the whole line assumed, not checked")
    status = "precondition-failed" if not all(pre.values()) else ("satisfied" if any(res["holds"]) else "unsatisfied")
    satisfied = status == "satisfied"
    return BreakingCertificate(
        theorem=f"T1.7-case{case}", status=status, satisfied=satisfied, point=point, params=params,
        u0=u0, ux0=ux0, m0=m0, h1_norm=h1_norm, preconditions=pre,
        gamma_branches=res["gammas"], branch_satisfied=res["holds"] if case == 1 else [],
        alpha=res["alpha"], lhs=ux0, rhs=rhs[best], margin=rhs[best] - ux0,
        T_upper=res["T_upper"] if satisfied else None, notes=notes,
    )


def thm17_certificate(u0: Field, x0: Optional[float], params: ModelParams) -> BreakingCertificate:
    """Initial-gradient breaking certificate; x0=None scans grid points for the largest margin"""
    if params.gradient_breaking_case() is None:
        return certify_gradient_breaking(0.0, 0.0, 0.0, params)
    m0 = momentum_array(u0.values, u0.grid)
    pre = {"m0_nonnegative": _m0_nonnegative(m0)}
    h1 = sobolev_norm(u0, 1.0)
    if x0 is None:
        x0 = _scan(u0, m0, lambda u, ux, m: certify_gradient_breaking(u, ux, m, params).margin)
    u, ux, m = _initial_point_values(u0, x0)
    return certify_gradient_breaking(u, ux, m, params, preconditions=pre, point=float(x0), h1_norm=h1)


def _scan(u0: Field, m0: np.ndarray, margin) -> float:
    """Grid point with m0 > 0 maximizing margin(u, u_x, m)"""
    ux = derivative_array(u0.values, u0.grid)
    x = u0.grid.x
    best_x, best = float(x[int(np.argmax(m0))]), -np.inf
    for j in np.nonzero(m0 > 0)[0]:
        val = margin(float(u0.values[j]), float(ux[j]), float(m0[j]))
        if val is not None and val > best:
            best_x, best = float(x[j]), val
    return best_x


# ============================================================
# Rate certificate
# ============================================================

def blowup_time_roots(C0: float, C3: float, m0: float) -> Dict[str, object]:
    """t-/+ = C0/(2C3) -/+ sqrt((C0/C3)^2 - 2/(C3 m0))/2, plus the exact roots of t^2 - (C0/C3)t + 1/(C3 m0)"""
    ratio = C0 / C3
    disc = ratio * ratio - 2.0 / (C3 * m0)
    out: Dict[str, object] = {"discriminant": disc, "t_minus": None, "t_plus": None, "complex": []}
    if disc >= 0:
        root = 0.5 * np.sqrt(disc)
        out["t_minus"], out["t_plus"] = 0.5 * ratio - root, 0.5 * ratio + root
    else:
        im = 0.5 * np.sqrt(-disc)
        out["complex"] = [(0.5 * ratio, -im), (0.5 * ratio, im)]
    quad = ratio * ratio - 4.0 / (C3 * m0)
    out["quadratic_discriminant"] = quad
    if quad >= 0:
        out["quadratic_t_minus"] = 0.5 * (ratio - np.sqrt(quad))
        out["quadratic_t_plus"] = 0.5 * (ratio + np.sqrt(quad))
    return out


def rate_estimate_constants(u0: float, ux0: float, m0: float, h1_norm: float, params: ModelParams,
                            C2: Union[float, str] = "auto") -> Dict[str, float]:
    k1, k2, k3 = params.as_tuple()
    if C2 == "auto":
        C2 = (u0 + 1.0) / m0
    C2 = float(C2)
    C0 = -ux0 * (2.0 * k1 + (3.0 * k2 * u0 + 2.0 * k3) / m0)
    C1 = (38.0 / 3.0 * k1 + 23.0 * k2 + 12.5 * k3) * (h1_norm ** 2 + h1_norm ** 3)
    C3 = 0.5 * (2.0 * k1 + (3.0 * k2 + 2.0 * k3) * C2) * C1
    return {"C0": C0, "C1": C1, "C2": C2, "C3": C3}


def certify_rate(u0: float, ux0: float, m0: float, h1_norm: float, params: ModelParams,
                 C2: Union[float, str] = "auto", preconditions: Optional[Dict[str, bool]] = None,
                 point: Optional[float] = None) -> BreakingCertificate:
    """Blow-up rate certificate from point values at x1 and the H1 norm of the datum"""
    if not params.supports_rate_estimate():
        return BreakingCertificate(
            theorem="T1.8", status="not-applicable", params=params, u0=u0, ux0=ux0, m0=m0,
            h1_norm=h1_norm, notes=["requires k1, k2, k3 > 0"],
        )
    pre = {"m0_x1_positive": m0 > 0}
    pre.update(preconditions or {})
    if m0 <= 0:
        return BreakingCertificate(
            theorem="T1.8", status="precondition-failed", params=params, point=point,
            u0=u0, ux0=ux0, m0=m0, h1_norm=h1_norm, preconditions=pre,
        )
    consts = rate_estimate_constants(u0, ux0, m0, h1_norm, params, C2)
    pre["C2_admissible"] = bool(u0 + 1.0 <= consts["C2"] * m0 * (1.0 + 1e-14))
    k1, k2, k3 = params.as_tuple()
    lhs = -consts["C0"]
    rhs = -float(np.sqrt((2.0 * k1 + (3.0 * k2 + 2.0 * k3) * consts["C2"]) * consts["C1"] / m0))
    roots = blowup_time_roots(consts["C0"], consts["C3"], m0)
    consts.update({
        "discriminant": roots["discriminant"],
        "t_minus_quadratic": roots.get("quadratic_t_minus"),
        "t_plus_quadratic": roots.get("quadratic_t_plus"),
    })
    holds = lhs < rhs
    status = "precondition-failed" if not all(pre.values()) else ("satisfied" if holds else "unsatisfied")
    return BreakingCertificate(
        theorem="T1.8", status=status, satisfied=status == "satisfied", point=point, params=params,
        u0=u0, ux0=ux0, m0=m0, h1_norm=h1_norm, preconditions=pre, constants=consts,
        lhs=lhs, rhs=rhs, margin=rhs - lhs, t_minus=roots["t_minus"], t_plus=roots["t_plus"],
        complex_roots=roots["complex"], rate_target=RATE_TARGET,
        notes=["roots follow t-/+ = C0/(2C3) -/+ sqrt((C0/C3)^2 - 2/(C3 m0))/2"],
    )


def thm18_certificate(u0: Field, x1: Optional[float], params: ModelParams,
                      C2: Union[float, str] = "auto") -> BreakingCertificate:
    """Blow-up rate certificate; x1=None scans grid points for the largest margin"""
    h1 = sobolev_norm(u0, 1.0)
    if not params.supports_rate_estimate():
        return certify_rate(0.0, 0.0, 0.0, h1, params)
    m0 = momentum_array(u0.values, u0.grid)
    pre = {"m0_nonnegative": _m0_nonnegative(m0)}
    if x1 is None:
        x1 = _scan(u0, m0, lambda u, ux, m: certify_rate(u, ux, m, h1, params, C2).margin)
    u, ux, m = _initial_point_values(u0, x1)
    return certify_rate(u, ux, m, h1, params, C2, preconditions=pre, point=float(x1))


# ============================================================
# Criterion integral, bounds and rates
# ============================================================

def blowup_criterion_integral(series: DiagnosticsSeries) -> np.ndarray:
    """Running trapezoid value of int ||m||_inf^2 dt"""
    t = np.asarray(series.t, dtype=float)
    if t.size < 2:
        return np.zeros(t.size)
    sup = np.asarray(series.m_sup, dtype=float)
    return cumulative_trapezoid(sup * sup, t, initial=0.0)


def superlinear_terminal_growth(t: Sequence[float], integral: Sequence[float], fraction: float = 0.1) -> bool:
    """Mean slope over the final fraction of the window exceeds twice the overall mean slope"""
    t = np.asarray(t, dtype=float)
    integral = np.asarray(integral, dtype=float)
    if t.size < 3 or t[-1] <= t[0]:
        return False
    overall = (integral[-1] - integral[0]) / (t[-1] - t[0])
    start = t[-1] - fraction * (t[-1] - t[0])
    j = int(np.searchsorted(t, start))
    j = min(j, t.size - 2)
    terminal = (integral[-1] - integral[j]) / (t[-1] - t[j])
    return bool(terminal > 2.0 * overall)


def m_upper_bound_from_norms(h1_norm: float, m0_sup: float, params: ModelParams) -> float:
    k1, k2, k3 = params.as_tuple()
    return 2.0 * k1 * h1_norm * m0_sup + 3.0 * k2 * h1_norm ** 2 + 2.0 * k3 * h1_norm


def m_upper_bound(u0: Field, params: ModelParams) -> float:
    """Uniform bound 2k1 |u0|_H1 sup m0 + 3k2 |u0|_H1^2 + 2k3 |u0|_H1 for M when m0 >= 0"""
    m0 = momentum_array(u0.values, u0.grid)
    return m_upper_bound_from_norms(sobolev_norm(u0, 1.0), float(m0.max()), params)


def blowup_time_estimate(t: Sequence[float], M_min: Sequence[float], window: float = 0.5,
                         min_points: int = 3) -> Optional[float]:
    """Zero of the least-squares line through 1/min M over the final stretch of a run

    Near breaking min M ~ -1/(c (T - t)), so 1/min M is close to linear in t and vanishes at T.
    The fit uses the trailing steps whose min M is at least `window` times its last value.
    None when min M is not negative and falling at the end.
    """
    t = np.asarray(t, dtype=float)
    M = np.asarray(M_min, dtype=float)
    if t.size < min_points or M[-1] >= 0.0:
        return None
    inside = M <= window * M[-1]
    outside = np.flatnonzero(~inside)
    start = int(outside[-1]) + 1 if outside.size else 0
    start = min(start, t.size - min_points)
    tw, Mw = t[start:], M[start:]
    if np.any(Mw >= 0.0):
        return None
    slope, intercept = np.polyfit(tw, 1.0 / Mw, 1)
    if slope <= 0.0:
        return None
    return float(max(-intercept / slope, t[-1]))


def blowup_rate_product(traj: FieldTrajectory) -> Optional[float]:
    """(T_est - t_last) * min M at the last resolved step of a breakdown run

    T_est comes from blowup_time_estimate; without a usable fit it falls back to
    t_last + half the last step.
    """
    series = traj.diagnostics
    if traj.status != "breakdown" or not series.M_min:
        return None
    T_est = blowup_time_estimate(series.t, series.M_min)
    if T_est is None:
        if traj.last_step is None:
            return None
        T_est = series.t[-1] + 0.5 * traj.last_step
    return (T_est - series.t[-1]) * series.M_min[-1]
