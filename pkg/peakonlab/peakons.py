"""
Peakon dynamics - closed-form peakon fields, speed-amplitude algebra and N-peakon ODE systems

Line:   u = sum_j p_j exp(-|x - q_j|)
Circle: u = sum_j p_j cosh(1/2 - d_j),  d_j = (x - q_j) mod 1

Both N-body systems are evaluated through the regularized pair sums

    u_i = u(q_i),  A_i = -(one-sided slope average at q_i)
    p_i' = p_i A_i (k2 u_i + k3)                    (line, A_i = sum_j p_j sgn(q_i-q_j) e^{-|q_i-q_j|})
    q_i' = (k1+k2) u_i^2 - k1 A_i^2 - k1 J_i + k3 u_i

with the jump correction J_i = p_i^2/3 on the line and p_i^2 sinh^2(1/2)/3 on the circle.
sgn(0) = 0, so self terms drop out of A_i.
"""
from typing import Tuple, List, Optional

import numpy as np
from scipy.integrate import solve_ivp

from peakonlab.errors import CollisionError
from peakonlab.state import (
    ModelParams, PeakonState, PeakonTrajectory, IntegratorOptions,
    AmplitudeReport, ReductionRow, Event, Domain,
)


COSH_HALF = np.cosh(0.5)
SINH_HALF = np.sinh(0.5)


# ============================================================
# Speed relation
# ============================================================

def speed_coefficients(params: ModelParams, domain: Domain = "line") -> Tuple[float, float]:
    """(A, B) with c = A a^2 + B a"""
    k1, k2, k3 = params.as_tuple()
    if domain == "line":
        return 2.0 * k1 / 3.0 + k2, k3
    return k1 / 3.0 + COSH_HALF ** 2 * (2.0 * k1 / 3.0 + k2), COSH_HALF * k3


def single_peakon_speed(a: float, params: ModelParams, domain: Domain = "line") -> float:
    """Travelling speed of a single (periodic) peakon of amplitude a"""
    A, B = speed_coefficients(params, domain)
    return A * a * a + B * a


def amplitudes_for_speed(c: float, params: ModelParams, domain: Domain = "line", tol: float = 1e-14) -> AmplitudeReport:
    """Solve the speed relation for the amplitude; both branches are always reported"""
    A, B = speed_coefficients(params, domain)
    report = dict(c=c, domain=domain, quadratic_coeff=A, linear_coeff=B)
    scale = max(abs(params.k1), abs(params.k2), abs(params.k3), 1.0)

    if abs(A) <= tol * scale:
        if abs(B) <= tol * scale:
            branch = "every" if c == 0 else "none"
            return AmplitudeReport(branch=branch, **report)
        return AmplitudeReport(branch="degenerate", real_roots=[c / B], **report)

    disc = B * B + 4.0 * A * c
    if disc < 0:
        re = -B / (2.0 * A)
        im = np.sqrt(-disc) / (2.0 * abs(A))
        return AmplitudeReport(branch="complex", complex_roots=[(re, im), (re, -im)], **report)

    root = np.sqrt(disc)
    roots = sorted({(-B + root) / (2.0 * A), (-B - root) / (2.0 * A)}, reverse=True)
    return AmplitudeReport(branch="quadratic", real_roots=[float(r) for r in roots], **report)


def _closed_forms_line(c: float, k: Tuple[float, float, float]) -> Tuple[str, List[float]]:
    k1, k2, k3 = k
    if k1 == 0 and k2 == 0:
        return "CH", [c / k3]
    if k2 == 0 and k3 == 0:
        r = np.sqrt(3.0 * c / (2.0 * k1))
        return "mCH", [r, -r]
    if k1 == 0 and k3 == 0:
        r = np.sqrt(c / k2)
        return "Novikov", [r, -r]
    if k2 == 0:
        s = np.sqrt(9 * k3 ** 2 + 24 * c * k1)
        return "mCH-CH", [(-3 * k3 + s) / (4 * k1), (-3 * k3 - s) / (4 * k1)]
    if k3 == 0:
        r = np.sqrt(3.0 * c / (2 * k1 + 3 * k2))
        return "mCH-Novikov", [r, -r]
    if k1 == 0:
        s = np.sqrt(k3 ** 2 + 4 * c * k2)
        return "Novikov-CH", [(-k3 + s) / (2 * k2), (-k3 - s) / (2 * k2)]
    f = 2 * k1 + 3 * k2
    if f == 0:
        return "degenerate", [c / k3]
    s = np.sqrt(9 * k3 ** 2 + 12 * c * f)
    return "general", [(-3 * k3 + s) / (2 * f), (-3 * k3 - s) / (2 * f)]


def _closed_forms_circle(c: float, k: Tuple[float, float, float]) -> Tuple[str, List[float]]:
    k1, k2, k3 = k
    sech = 1.0 / COSH_HALF
    ch2 = COSH_HALF ** 2
    if k1 == 0 and k2 == 0:
        return "CH", [sech * c / k3]
    if k2 == 0 and k3 == 0:
        r = np.sqrt(3.0 * c / (2.0 + np.cosh(1.0)))
        return "mCH", [r, -r]
    if k1 == 0 and k3 == 0:
        r = sech * np.sqrt(c)
        return "Novikov", [r, -r]
    if k2 == 0:
        s = np.sqrt(12 * c * k1 + 3 * ch2 * (3 * k3 ** 2 + 8 * c * k1))
        d = (4 + 2 * np.cosh(1.0)) * k1
        return "mCH-CH", [(-3 * COSH_HALF * k3 + s) / d, (-3 * COSH_HALF * k3 - s) / d]
    if k3 == 0:
        r = np.sqrt(3.0 * c / (k1 + ch2 * (2 * k1 + 3 * k2)))
        return "mCH-Novikov", [r, -r]
    if k1 == 0:
        s = np.sqrt(k3 ** 2 + 4 * c * k2)
        return "Novikov-CH", [sech * (-k3 + s) / (2 * k2), sech * (-k3 - s) / (2 * k2)]
    f = (2 + np.cosh(1.0)) * k1 + 3 * ch2 * k2
    if abs(f) < 1e-14:
        return "degenerate", [sech * c / k3]
    s = np.sqrt(9 * ch2 * k3 ** 2 + 12 * c * f)
    return "general", [(-3 * COSH_HALF * k3 + s) / (2 * f), (-3 * COSH_HALF * k3 - s) / (2 * f)]


DEFAULT_REDUCTIONS = [
    ((0.0, 0.0, 1.0), 1.5),
    ((1.0, 0.0, 0.0), 2.0 / 3.0),
    ((0.0, 1.0, 0.0), 4.0),
    ((1.0, 0.0, 2.0), 1.2),
    ((1.0, 2.0, 0.0), 3.0),
    ((0.0, 2.0, 1.0), 0.8),
    ((1.0, 1.0, 1.0), 2.5),
    ((3.0, -2.0, 1.0), 5.0),
]


def reduction_table(cases=None, domains=("line", "circle"), tol: float = 1e-12) -> List[ReductionRow]:
    """Compare the published closed-form amplitudes of every reduction with amplitudes_for_speed"""
    rows = []
    for k, c in (cases or DEFAULT_REDUCTIONS):
        params = ModelParams(k1=k[0], k2=k[1], k3=k[2])
        for domain in domains:
            if domain == "line":
                name, closed = _closed_forms_line(c, k)
            else:
                name, closed = _closed_forms_circle(c, k)
            computed = amplitudes_for_speed(c, params, domain).real_roots
            closed = sorted({float(v) for v in closed}, reverse=True)
            if len(closed) == len(computed):
                err = max(abs(a - b) / max(1.0, abs(a)) for a, b in zip(closed, computed))
            else:
                err = float("inf")
            rows.append(ReductionRow(
                name=name, domain=domain, k=k, c=c, closed_form=closed, computed=computed,
                max_error=err, exact=err <= tol,
            ))
    return rows


# ============================================================
# Field evaluation
# ============================================================

def peakon_field_eval(state: PeakonState, x) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(u, u_x from the left, u_x from the right) of the multi-peakon field at x"""
    return field_arrays(state.p_array, state.q_array, x, state.domain)


def field_arrays(p: np.ndarray, q: np.ndarray, x, domain: Domain):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = x[:, None] - q[None, :]
    if domain == "line":
        e = np.exp(-np.abs(xi))
        u = e @ p
        # slope of e^{-|xi|}: -e^{-xi} for xi > 0, +e^{xi} for xi < 0
        left = np.where(xi > 0, -e, e) @ p
        right = np.where(xi >= 0, -e, e) @ p
        return u, left, right
    y = np.mod(xi, 1.0)
    u = np.cosh(0.5 - y) @ p
    right = -np.sinh(0.5 - y) @ p
    y_left = np.where(y == 0.0, 1.0, y)
    left = -np.sinh(0.5 - y_left) @ p
    return u, left, right


# ============================================================
# N-peakon vector fields
# ============================================================

def _gaps(q: np.ndarray, domain: Domain) -> np.ndarray:
    gaps = np.diff(q)
    if domain == "circle" and len(q) > 1:
        gaps = np.append(gaps, 1.0 - (q[-1] - q[0]))
    return gaps


def _check_gaps(q: np.ndarray, domain: Domain, collide_eps: float) -> None:
    gaps = _gaps(q, domain)
    if gaps.size and gaps.min() <= collide_eps:
        idx = int(np.argmin(gaps))
        raise CollisionError(idx, float(gaps[idx]))


def line_vector_field(p: np.ndarray, q: np.ndarray, params: ModelParams) -> Tuple[np.ndarray, np.ndarray]:
    k1, k2, k3 = params.as_tuple()
    d = q[:, None] - q[None, :]
    e = np.exp(-np.abs(d))
    u = e @ p
    slope = (np.sign(d) * e) @ p
    pdot = p * slope * (k2 * u + k3)
    qdot = (k1 + k2) * u * u - k1 * slope * slope - k1 * p * p / 3.0 + k3 * u
    return pdot, qdot


def periodic_vector_field(p: np.ndarray, q: np.ndarray, params: ModelParams) -> Tuple[np.ndarray, np.ndarray]:
    k1, k2, k3 = params.as_tuple()
    d = np.mod(q[:, None] - q[None, :], 1.0)
    u = np.cosh(0.5 - d) @ p
    s = np.sinh(0.5 - d)
    np.fill_diagonal(s, 0.0)
    avg_slope = -(s @ p)
    pdot = -p * avg_slope * (k2 * u + k3)
    qdot = (k1 + k2) * u * u - k1 * avg_slope ** 2 - k1 * p * p * SINH_HALF ** 2 / 3.0 + k3 * u
    return pdot, qdot


def rhs_line(state: PeakonState, params: ModelParams, collide_eps: float = 1e-8):
    """(p', q') of the line multi-peakon system, O(N^2)"""
    _check_gaps(state.q_array, "line", collide_eps)
    return line_vector_field(state.p_array, state.q_array, params)


def rhs_periodic(state: PeakonState, params: ModelParams, collide_eps: float = 1e-8):
    """(p', q') of the periodic multi-peakon system, O(N^2)"""
    _check_gaps(state.q_array, "circle", collide_eps)
    return periodic_vector_field(state.p_array, state.q_array, params)


def two_peakon_transformed_rhs(state: PeakonState, params: ModelParams):
    """(P+', Q+', P-', Q-') for P = p1 +- p2, Q = q1 +- q2 on the line"""
    if state.n_peakons != 2 or state.domain != "line":
        raise ValueError("transformed system needs a two-peakon line state")
    p1, p2 = state.p
    q1, q2 = state.q
    return transformed_vector_field(np.array([p1 + p2, q1 + q2, p1 - p2, q1 - q2]), params)


def transformed_vector_field(y: np.ndarray, params: ModelParams) -> np.ndarray:
    k1, k2, k3 = params.as_tuple()
    Pp, Qp, Pm, Qm = y
    E = np.exp(-abs(Qm))
    sgn = np.sign(Qm)
    prod4 = Pp * Pp - Pm * Pm       # 4 p1 p2
    dPp = sgn * k2 * E * (1.0 - E) * Pm * prod4 / 4.0
    dPm = sgn * E * prod4 / 4.0 * (k2 * Pp * (1.0 + E) + 2.0 * k3)
    dQp = ((Pp * Pp + Pm * Pm) * (k1 / 3.0 + 0.5 * k2 * (1.0 + E * E))
           + (k1 + k2) * prod4 * E + k3 * Pp * (1.0 + E))
    dQm = Pp * Pm * (2.0 * k1 / 3.0 + k2 * (1.0 - E * E)) + k3 * Pm * (1.0 - E)
    return np.array([dPp, dQp, dPm, dQm])


# ============================================================
# Integration
# ============================================================

def _renormalize_circle(p: np.ndarray, q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    qm = np.mod(q, 1.0)
    order = np.argsort(qm, axis=-1, kind="stable")
    return np.take_along_axis(p, order, axis=-1), np.take_along_axis(qm, order, axis=-1)


def integrate_peakons(state0: PeakonState, params: ModelParams, t_end: float,
                      opts: Optional[IntegratorOptions] = None) -> PeakonTrajectory:
    """Integrate the multi-peakon system with an embedded adaptive Runge-Kutta pair

    Stops with a collision event when a gap falls to opts.collide_eps; a step-size
    failure yields a step_underflow event and the partial trajectory.
    """
    opts = opts or IntegratorOptions()
    domain = state0.domain
    n = state0.n_peakons
    field = line_vector_field if domain == "line" else periodic_vector_field
    _check_gaps(state0.q_array, domain, opts.collide_eps)

    def fun(t, y):
        pdot, qdot = field(y[:n], y[n:], params)
        return np.concatenate([pdot, qdot])

    def collision(t, y):
        gaps = _gaps(y[n:], domain)
        return float(gaps.min()) - opts.collide_eps if gaps.size else 1.0
    collision.terminal = True
    collision.direction = -1

    t0 = state0.t
    y0 = np.concatenate([state0.p_array, state0.q_array])
    t_eval = np.linspace(t0, t_end, max(opts.samples, 2))
    sol = solve_ivp(
        fun, (t0, t_end), y0, method=opts.method, t_eval=t_eval, events=collision,
        dense_output=True, atol=opts.atol, rtol=opts.rtol, max_step=opts.max_step,
    )

    ts = np.asarray(sol.t)
    ys = np.asarray(sol.y).T
    events = []
    status = "complete"
    if sol.status == 1 and len(sol.t_events[0]):
        te = float(sol.t_events[0][0])
        ye = np.asarray(sol.y_events[0][0])
        if ts.size == 0 or ts[-1] < te:
            ts = np.append(ts, te)
            ys = np.vstack([ys, ye]) if ys.size else ye[None, :]
        gaps = _gaps(ye[n:], domain)
        idx = int(np.argmin(gaps))
        events.append(Event(kind="collision", t=te, message=f"gap {idx} reached the collision threshold",
                            detail={"index": float(idx), "gap": float(gaps[idx])}))
        status = "collision"
    elif sol.status == -1:
        t_fail = float(sol.t[-1]) if len(sol.t) else t0
        events.append(Event(kind="step_underflow", t=t_fail, message=str(sol.message)))
        status = "step_underflow"

    if ts.size == 0:
        ts = np.array([t0])
        ys = y0[None, :]

    p, q_lift = ys[:, :n], ys[:, n:]
    q = q_lift.copy()
    if domain == "circle":
        p, q = _renormalize_circle(p, q_lift)

    traj = PeakonTrajectory(domain=domain, params=params, t=ts, p=p, q=q, q_lift=q_lift,
                            events=events, status=status)
    traj._dense = sol.sol
    return traj


def integrate_two_peakon_transformed(state0: PeakonState, params: ModelParams, t_end: float,
                                     opts: Optional[IntegratorOptions] = None):
    """Integrate the (P+-, Q+-) system and map back to (p1, p2, q1, q2) samples"""
    opts = opts or IntegratorOptions()
    p1, p2 = state0.p
    q1, q2 = state0.q
    y0 = np.array([p1 + p2, q1 + q2, p1 - p2, q1 - q2])
    t_eval = np.linspace(state0.t, t_end, max(opts.samples, 2))
    sol = solve_ivp(lambda t, y: transformed_vector_field(y, params), (state0.t, t_end), y0,
                    method=opts.method, t_eval=t_eval, atol=opts.atol, rtol=opts.rtol)
    Pp, Qp, Pm, Qm = sol.y
    p = np.stack([(Pp + Pm) / 2, (Pp - Pm) / 2], axis=1)
    q = np.stack([(Qp + Qm) / 2, (Qp - Qm) / 2], axis=1)
    return np.asarray(sol.t), p, q
