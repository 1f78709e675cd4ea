"""
PDE Solver - method-of-lines pseudospectral integration of the nonlocal weak form

    u_t = -[ (k1+k2)/3 (u^3)_x - k1/3 u_x^3 + k3/2 (u^2)_x
             + p_x * ((2k1/3 + k2) u^3 + (k1 + 3k2/2) u u_x^2 + k3 u^2 + k3/2 u_x^2)
             + p * ((k1/3 + k2/2) u_x^3) ]

with an independent transport form for the momentum,

    m_t = -[k1(u^2 - u_x^2) + k2 u^2 + k3 u] m_x - (2 k1 m + 3 k2 u + 2 k3) u_x m,

used for cross-validation. Both right-hand sides are truncated to the 2/3 band, so modes
above it never pick up aliased content. Time stepping drives scipy's embedded RK step objects one
accepted step at a time so every step can be monitored.
"""
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import DOP853, RK45, DenseOutput, OdeSolution

from peakonlab.breaking import blowup_time_estimate
from peakonlab.diagnostics import DiagnosticsRecorder
from peakonlab.errors import BlowupSuspectedError
from peakonlab.kernels import (
    wavenumbers, derivative_multiplier, dealias_mask, exponential_filter,
    helmholtz_array, momentum_array,
)
from peakonlab.state import Event, Field, FieldTrajectory, GridSpec, IntegratorOptions, ModelParams


STEPPERS = {"RK45": RK45, "DOP853": DOP853}


class WeakFormOperator:
    """du/dt of the nonlocal weak form on a fixed grid"""

    def __init__(self, grid: GridSpec, params: ModelParams):
        self.grid = grid
        self.params = params
        xi = wavenumbers(grid)
        self.ik = derivative_multiplier(grid)
        self.inv_helm = 1.0 / (1.0 + xi * xi)
        self.mask = dealias_mask(grid)

    def __call__(self, t: float, u: np.ndarray) -> np.ndarray:
        k1, k2, k3 = self.params.as_tuple()
        n = self.grid.n
        ik, inv_helm = self.ik, self.inv_helm
        u_hat = np.fft.rfft(u) * self.mask
        ud = np.fft.irfft(u_hat, n=n)
        uxd = np.fft.irfft(ik * u_hat, n=n)

        cube = ud ** 3
        square = ud * ud
        ux2 = uxd * uxd
        ux3 = ux2 * uxd
        nonlocal_x = (2.0 * k1 / 3.0 + k2) * cube + (k1 + 1.5 * k2) * ud * ux2 + k3 * square + 0.5 * k3 * ux2
        nonlocal_0 = (k1 / 3.0 + k2 / 2.0) * ux3

        rhs_hat = (
            (k1 + k2) / 3.0 * ik * np.fft.rfft(cube)
            - k1 / 3.0 * np.fft.rfft(ux3)
            + 0.5 * k3 * ik * np.fft.rfft(square)
            + ik * inv_helm * np.fft.rfft(nonlocal_x)
            + inv_helm * np.fft.rfft(nonlocal_0)
        )
        out = -np.fft.irfft(rhs_hat * self.mask, n=n)
        if not np.all(np.isfinite(out)):
            raise BlowupSuspectedError(t)
        return out


class MomentumFormOperator:
    """dm/dt of the transport form; the state vector is m"""

    def __init__(self, grid: GridSpec, params: ModelParams):
        self.grid = grid
        self.params = params
        self.ik = derivative_multiplier(grid)
        xi = wavenumbers(grid)
        self.inv_helm = 1.0 / (1.0 + xi * xi)
        self.mask = dealias_mask(grid)

    def from_u(self, t: float, u: np.ndarray) -> np.ndarray:
        return self(t, momentum_array(u, self.grid))

    def __call__(self, t: float, m: np.ndarray) -> np.ndarray:
        k1, k2, k3 = self.params.as_tuple()
        n = self.grid.n
        m_hat = np.fft.rfft(m) * self.mask
        md = np.fft.irfft(m_hat, n=n)
        mx = np.fft.irfft(self.ik * m_hat, n=n)
        u_hat = m_hat * self.inv_helm
        u = np.fft.irfft(u_hat, n=n)
        ux = np.fft.irfft(self.ik * u_hat, n=n)
        speed = k1 * (u * u - ux * ux) + k2 * u * u + k3 * u
        out = -speed * mx - (2.0 * k1 * md + 3.0 * k2 * u + 2.0 * k3) * ux * md
        out = np.fft.irfft(np.fft.rfft(out) * self.mask, n=n)
        if not np.all(np.isfinite(out)):
            raise BlowupSuspectedError(t)
        return out


def weak_rhs(u: Field, params: ModelParams, t: Optional[float] = None) -> Field:
    """du/dt of the weak nonlocal form"""
    return Field(grid=u.grid, values=WeakFormOperator(u.grid, params)(t, u.values))


def m_form_rhs(u: Field, params: ModelParams, t: Optional[float] = None) -> Field:
    """dm/dt of the transport form, m = (1 - d^2/dx^2) u"""
    return Field(grid=u.grid, values=MomentumFormOperator(u.grid, params).from_u(t, u.values))


def mollified_peakon(a: float, x0: float, width: float, grid: GridSpec) -> Field:
    """Peakon smoothed by replacing its momentum 2a*delta with a Gaussian of the same mass"""
    if width <= 4.0 * grid.h:
        raise ValueError(f"width {width:.3g} must exceed 4h = {4.0 * grid.h:.3g}")
    x = grid.x
    m = np.zeros(grid.n)
    for k in range(-2, 3):
        d = x - x0 - k * grid.period
        m += np.exp(-0.5 * (d / width) ** 2)
    m *= 2.0 * a / (np.sqrt(2.0 * np.pi) * width)
    return Field(grid=grid, values=helmholtz_array(m, grid), role="u")


def gaussian_bump(amplitude: float, x0: float, width: float, grid: GridSpec) -> Field:
    """u = helmholtz_solve(m0) for a periodized Gaussian momentum of given peak height"""
    x = grid.x
    m = np.zeros(grid.n)
    for k in range(-2, 3):
        d = x - x0 - k * grid.period
        m += amplitude * np.exp(-0.5 * (d / width) ** 2)
    return Field(grid=grid, values=helmholtz_array(m, grid), role="u")


class FilteredDenseOutput(DenseOutput):
    """Step interpolant whose right end is moved onto the filtered state

    The shift grows linearly across the step, so both step ends match the states the
    integrator actually continued from.
    """

    def __init__(self, base: DenseOutput, correction: np.ndarray):
        super().__init__(base.t_old, base.t)
        self.base = base
        self.correction = correction

    def _call_impl(self, t):
        y = self.base(t)
        w = (np.asarray(t, dtype=float) - self.t_old) / (self.t - self.t_old)
        if y.ndim == 1:
            return y + w * self.correction
        return y + np.outer(self.correction, w)


def integrate_pde(u0: Field, params: ModelParams, t_end: float,
                  opts: Optional[IntegratorOptions] = None,
                  output_times: Optional[Sequence[float]] = None) -> FieldTrajectory:
    """Adaptive RK integration with per-step diagnostics and breakdown detection

    Breakdown (step failure, non-finite right-hand side, |u_x| above guard_ux, min M below
    -guard_M or lost resolution) ends the run with a breakdown event; it is a result, not an
    exception. Resolution is lost once the spectral tail of m exceeds
    max(guard_tail, 100 * its initial value), which caps how far Gibbs ripples can grow before
    the run stops. The event carries T_est, the extrapolated zero of 1/min M.
    """
    opts = opts or IntegratorOptions(rtol=1e-8, atol=1e-10)
    grid = u0.grid
    if opts.form == "m":
        fun = MomentumFormOperator(grid, params)
        y0 = momentum_array(u0.values, grid)
        to_u = lambda y: helmholtz_array(y, grid)
    else:
        fun = WeakFormOperator(grid, params)
        y0 = np.array(u0.values, dtype=float)
        to_u = lambda y: y

    if output_times is None:
        output_times = np.linspace(0.0, t_end, max(opts.samples, 2))
    output_times = np.asarray(sorted(output_times), dtype=float)

    recorder = DiagnosticsRecorder(grid, params, u0.values)
    recorder.record(0.0, u0.values)
    tail_limit = max(opts.guard_tail, 100.0 * recorder.series().m_tail[0])
    sigma = exponential_filter(grid) if opts.filter else None

    stepper = STEPPERS[opts.method](fun, 0.0, y0, t_end, rtol=opts.rtol, atol=opts.atol,
                                    max_step=opts.max_step)
    times: List[float] = [0.0]
    snaps: List[np.ndarray] = [np.array(u0.values)]
    next_out = 1 if output_times.size and output_times[0] <= 0.0 else 0
    ts_dense: List[float] = [0.0]
    interps = []
    events: List[Event] = []
    status = "complete"
    breakdown_time = None
    steps = 0
    flagged = set()

    while stepper.status == "running":
        t_prev = stepper.t
        try:
            stepper.step()
        except BlowupSuspectedError as exc:
            status, breakdown_time = "breakdown", t_prev
            events.append(Event(kind="blowup_suspected", t=t_prev, message=str(exc)))
            break
        if stepper.status == "failed":
            status, breakdown_time = "breakdown", t_prev
            events.append(Event(kind="step_underflow", t=t_prev, message="step size underflow"))
            break
        steps += 1

        interp = stepper.dense_output()
        if sigma is not None:
            filtered = np.fft.irfft(np.fft.rfft(stepper.y) * sigma, n=grid.n)
            interp = FilteredDenseOutput(interp, filtered - stepper.y)
            stepper.y = filtered
            stepper.f = fun(stepper.t, filtered)

        interps.append(interp)
        ts_dense.append(stepper.t)
        while next_out < output_times.size and output_times[next_out] <= stepper.t:
            times.append(float(output_times[next_out]))
            snaps.append(to_u(interp(output_times[next_out])))
            next_out += 1

        u = to_u(stepper.y)
        monitor = recorder.record(stepper.t, u)
        for kind in ("m_bound_breach", "positivity_breach"):
            if monitor[kind] and kind not in flagged:
                flagged.add(kind)
                events.append(Event(kind=kind, t=stepper.t, message=f"{kind.replace('_', ' ')} at first occurrence"))

        if stepper.step_size < opts.min_step:
            status, breakdown_time = "breakdown", stepper.t
            events.append(Event(kind="step_underflow", t=stepper.t, message="step size below min_step",
                                detail={"step": float(stepper.step_size)}))
            break
        if monitor["ux_sup"] > opts.guard_ux or monitor["M_min"] < -opts.guard_M:
            status, breakdown_time = "breakdown", stepper.t
            events.append(Event(kind="breakdown", t=stepper.t, message="slope guard exceeded",
                                detail={"ux_sup": monitor["ux_sup"], "M_min": monitor["M_min"]}))
            break
        if monitor["m_tail"] > tail_limit:
            status, breakdown_time = "breakdown", stepper.t
            events.append(Event(kind="breakdown", t=stepper.t, message="resolution lost",
                                detail={"m_tail": monitor["m_tail"], "tail_limit": tail_limit,
                                        "M_min": monitor["M_min"]}))
            break

    if status == "breakdown" and (not times or times[-1] < ts_dense[-1]):
        times.append(float(ts_dense[-1]))
        snaps.append(to_u(stepper.y) if interps else np.array(u0.values))

    last_step = float(ts_dense[-1] - ts_dense[-2]) if len(ts_dense) > 1 else None
    if status == "breakdown" and events:
        series = recorder.series()
        T_est = blowup_time_estimate(series.t, series.M_min)
        if T_est is None:
            T_est = float(ts_dense[-1] + 0.5 * (last_step or 0.0))
        events[-1].detail["T_est"] = T_est

    traj = FieldTrajectory(
        grid=grid, params=params, form=opts.form, times=np.asarray(times), snapshots=np.asarray(snaps),
        diagnostics=recorder.series(), events=events, status=status,
        breakdown_time=breakdown_time if status == "breakdown" else None,
        last_step=last_step, steps=steps,
    )
    if interps:
        traj._dense = OdeSolution(ts_dense, interps)
    return traj


def restrict(values: np.ndarray, factor: int) -> np.ndarray:
    """Samples of a fine grid at the points of a grid `factor` times coarser"""
    return values[::factor]


def refinement_study(make_u0: Callable[[GridSpec], Field], params: ModelParams, t_end: float,
                     base: GridSpec, levels: int = 3, opts: Optional[IntegratorOptions] = None) -> Dict[str, List[float]]:
    """Self-convergence: sup differences between successive grid doublings on the coarse grid"""
    finals = []
    for level in range(levels):
        grid = GridSpec(period=base.period, n=base.n * 2 ** level, origin=base.origin)
        traj = integrate_pde(make_u0(grid), params, t_end, opts, output_times=[0.0, t_end])
        finals.append(traj.snapshots[-1])
    errors = [
        float(np.max(np.abs(restrict(finals[i], 2 ** i) - restrict(finals[i + 1], 2 ** (i + 1)))))
        for i in range(levels - 1)
    ]
    ratios = [errors[i] / errors[i + 1] if errors[i + 1] > 0 else float("inf") for i in range(len(errors) - 1)]
    return {"n": [base.n * 2 ** i for i in range(levels)], "errors": errors, "ratios": ratios}


def compare_forms(u0: Field, params: ModelParams, t_end: float, opts: Optional[IntegratorOptions] = None) -> float:
    """Sup difference at t_end between the weak-form and transport-form solutions"""
    opts = opts or IntegratorOptions(rtol=1e-10, atol=1e-12)
    weak = integrate_pde(u0, params, t_end, opts.model_copy(update={"form": "weak"}), output_times=[0.0, t_end])
    mform = integrate_pde(u0, params, t_end, opts.model_copy(update={"form": "m"}), output_times=[0.0, t_end])
    return float(np.max(np.abs(weak.snapshots[-1] - mform.snapshots[-1])))
