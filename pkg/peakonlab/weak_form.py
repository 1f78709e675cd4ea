"""
Weak-form residual of a peakon trajectory against a smooth test function

R = int int { u phi_t + (k1+k2)/3 u^3 phi_x + k1/3 u_x^3 phi + k3/2 u^2 phi_x
              - K*[(k1/3 + k2/2) u_x^3] phi
              + K*[(2k1/3 + k2) u^3 + (k1 + 3k2/2) u u_x^2 + k3 u^2 + k3/2 u_x^2] phi_x } dx dt
    + int u(t0, x) phi(t0, x) dx

with K = p on the line and G on the unit circle. Space is integrated with Gauss-Legendre
panels split at the peaks; K* is evaluated by forward/backward exponential sweeps over the
same kind of panels, so the kink of the kernel and the slope jumps of u never fall inside a
panel. Time uses composite Gauss-Legendre on the trajectory's dense output.
"""
from typing import Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from peakonlab.errors import TestFunctionSupportError
from peakonlab.peakons import field_arrays
from peakonlab.state import ModelParams, PeakonTrajectory, TestFunction, WeakResidualReport


LINE_PAD = 20.0
MAX_SEGMENT = 0.5


def _panel_nodes(breaks: np.ndarray, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss nodes and weights on each [breaks[k], breaks[k+1]], shape (segments, order)"""
    xg, wg = leggauss(order)
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * xg[None, :], half * wg[None, :]


def _refine(points: np.ndarray, max_len: float) -> np.ndarray:
    pts = np.unique(points)
    out = [pts[:1]]
    for a, b in zip(pts[:-1], pts[1:]):
        pieces = max(1, int(np.ceil((b - a) / max_len)))
        out.append(np.linspace(a, b, pieces + 1)[1:])
    return np.concatenate(out)


def _peaks_in(q: np.ndarray, lo: float, hi: float, periodic: bool) -> np.ndarray:
    if periodic:
        q = np.mod(q, 1.0)
        q = np.concatenate([q + k for k in range(int(np.floor(lo)) - 1, int(np.ceil(hi)) + 2)])
    return q[(q > lo) & (q < hi)]


def _sources(p, q, y, domain, params):
    k1, k2, k3 = params.as_tuple()
    u, ux, _ = field_arrays(p, q, y.ravel(), domain)
    u, ux = u.reshape(y.shape), ux.reshape(y.shape)
    f1 = (k1 / 3.0 + k2 / 2.0) * ux ** 3
    f2 = ((2.0 * k1 / 3.0 + k2) * u ** 3 + (k1 + 1.5 * k2) * u * ux ** 2
          + k3 * u ** 2 + 0.5 * k3 * ux ** 2)
    return f1, f2


def kernel_convolve_at(p, q, targets: np.ndarray, domain: str, params: ModelParams, order: int):
    """K*f1 and K*f2 at sorted target points (line kernel p or unit-circle kernel G)"""
    periodic = domain == "circle"
    if periodic:
        lo = float(targets.min())
        hi = lo + 1.0
        peaks = _peaks_in(q, lo, hi, True)
    else:
        lo = float(min(q.min(), targets.min())) - LINE_PAD
        hi = float(max(q.max(), targets.max())) + LINE_PAD
        peaks = q
    breaks = _refine(np.concatenate([[lo, hi], peaks, targets]), MAX_SEGMENT)
    y, w = _panel_nodes(breaks, order)
    f1, f2 = _sources(p, q, y, domain, params)
    f = np.stack([f1, f2])                                # (2, segments, order)

    right = breaks[1:, None]
    left = breaks[:-1, None]
    seg_plus = np.sum(w * np.exp(y - right) * f, axis=-1)   # (2, segments)
    seg_minus = np.sum(w * np.exp(left - y) * f, axis=-1)
    decay = np.exp(-np.diff(breaks))

    nb = breaks.size
    fwd = np.zeros((2, nb))
    bwd = np.zeros((2, nb))
    for k in range(nb - 1):
        fwd[:, k + 1] = decay[k] * fwd[:, k] + seg_plus[:, k]
    for k in range(nb - 2, -1, -1):
        bwd[:, k] = decay[k] * bwd[:, k + 1] + seg_minus[:, k]

    if periodic:
        wrap = 1.0 / (1.0 - np.exp(-1.0))
        start = fwd[:, -1] * wrap
        end = bwd[:, 0] * wrap
        fwd = fwd + np.exp(-(breaks - lo))[None, :] * start[:, None]
        bwd = bwd + np.exp(-(hi - breaks))[None, :] * end[:, None]

    idx = np.searchsorted(breaks, targets)
    conv = 0.5 * (fwd[:, idx] + bwd[:, idx])
    return conv[0], conv[1]


def _space_integral(traj: PeakonTrajectory, params: ModelParams, phi: TestFunction, t: float,
                    order: int, initial: bool = False) -> Tuple[float, float]:
    """Spatial integral of the weak-form integrand (or of u*phi at t0 when initial) and its absolute size"""
    k1, k2, k3 = params.as_tuple()
    periodic = traj.domain == "circle"
    p, q = traj.state_at(t)
    lo, hi = phi.x_support
    peaks = _peaks_in(q, lo, hi, periodic)
    breaks = _refine(np.concatenate([[lo, hi], peaks]), phi.x_half_width / 4.0)
    x, w = _panel_nodes(breaks, order)
    x, w = x.ravel(), w.ravel()

    period = 1.0 if periodic else None
    vals, dt_vals, dx_vals = phi.evaluate(t, x, period)
    u, ux, _ = field_arrays(p, q, x, traj.domain)

    if initial:
        integrand = u * vals
        return float(np.sum(w * integrand)), float(np.sum(w * np.abs(integrand)))

    conv1, conv2 = kernel_convolve_at(p, q, x, traj.domain, params, order)
    terms = np.stack([
        u * dt_vals,
        (k1 + k2) / 3.0 * u ** 3 * dx_vals,
        k1 / 3.0 * ux ** 3 * vals,
        0.5 * k3 * u ** 2 * dx_vals,
        -conv1 * vals,
        conv2 * dx_vals,
    ])
    return float(np.sum(w * terms.sum(axis=0))), float(np.sum(w * np.abs(terms).sum(axis=0)))


def _residual(traj, params, phi, time_panels: int, order: int) -> Tuple[float, float]:
    t0 = float(traj.t[0])
    t_lo, t_hi = phi.t_support
    a = max(t_lo, t0)
    breaks = np.linspace(a, t_hi, time_panels + 1)
    tn, tw = _panel_nodes(breaks, order)
    total, scale = 0.0, 0.0
    for t, w in zip(tn.ravel(), tw.ravel()):
        val, size = _space_integral(traj, params, phi, float(t), order)
        total += w * val
        scale += w * size
    if t_lo < t0:
        val, size = _space_integral(traj, params, phi, t0, order, initial=True)
        total += val
        scale += size
    return total, scale


def _check_support(traj: PeakonTrajectory, phi: TestFunction) -> None:
    t0, t1 = float(traj.t[0]), float(traj.t[-1])
    t_lo, t_hi = phi.t_support
    if t_hi > t1 + 1e-12 or phi.t_center < t0:
        raise TestFunctionSupportError(
            f"time support [{t_lo:.6g}, {t_hi:.6g}] leaves the sampled window [{t0:.6g}, {t1:.6g}]"
        )
    if traj.domain == "circle" and phi.x_half_width > 0.5:
        raise TestFunctionSupportError("spatial support wider than the circle")


def weak_residual_report(traj: PeakonTrajectory, params: ModelParams, phi: TestFunction,
                         time_panels: int = 4, order: int = 10, safety: float = 10.0,
                         relative_floor: float = 1e-7) -> WeakResidualReport:
    """Residual at two resolutions; the bound is safety*|fine - coarse| plus a floor for trajectory error"""
    _check_support(traj, phi)
    coarse, _ = _residual(traj, params, phi, time_panels, order)
    fine, scale = _residual(traj, params, phi, 2 * time_panels, 2 * order)
    err = abs(fine - coarse)
    return WeakResidualReport(
        value=fine, coarse_value=coarse, error_estimate=err, scale=scale,
        bound=safety * err + relative_floor * scale + 1e-300,
    )


def weak_residual(traj: PeakonTrajectory, params: ModelParams, phi: TestFunction, **kwargs) -> float:
    """Left-hand side of the weak-solution identity for a peakon trajectory"""
    return weak_residual_report(traj, params, phi, **kwargs).value


def random_test_function(rng: np.random.Generator, traj: PeakonTrajectory) -> TestFunction:
    """Bump with time support inside the trajectory window and space support near the peaks"""
    t0, t1 = float(traj.t[0]), float(traj.t[-1])
    span = t1 - t0
    tw = rng.uniform(0.15, 0.45) * span
    tc = rng.uniform(t0 + tw, t1 - tw)
    if traj.domain == "circle":
        xw = rng.uniform(0.1, 0.4)
        xc = rng.uniform(0.0, 1.0)
    else:
        q_mid = traj.q_lift[len(traj.t) // 2]
        xc = rng.uniform(q_mid.min() - 1.0, q_mid.max() + 1.0)
        xw = rng.uniform(0.5, 2.5)
    return TestFunction(t_center=tc, t_half_width=tw, x_center=xc, x_half_width=xw)
