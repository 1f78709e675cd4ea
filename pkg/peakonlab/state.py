from typing import TypedDict, List, Dict, Optional, Literal, Any, Tuple, Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, PrivateAttr, field_validator, model_validator


Domain = Literal["line", "circle"]
FieldRole = Literal["u", "u_x", "m", "M", "generic"]


# ============================================================
# Model and discretization
# ============================================================

class ModelParams(BaseModel):
    """Coefficients (k1, k2, k3) of the mCH-Novikov-CH family"""
    model_config = ConfigDict(frozen=True)

    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0

    @field_validator("k1", "k2", "k3")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not np.isfinite(v):
            raise ValueError("coefficient must be finite")
        return float(v)

    @property
    def label(self) -> str:
        """Name of the reduction this triple belongs to"""
        nonzero = tuple(k != 0.0 for k in (self.k1, self.k2, self.k3))
        names = {
            (False, False, False): "trivial",
            (False, False, True): "CH",
            (True, False, False): "mCH",
            (False, True, False): "Novikov",
            (True, False, True): "mCH-CH",
            (True, True, False): "mCH-Novikov",
            (False, True, True): "Novikov-CH",
            (True, True, True): "mCH-Novikov-CH",
        }
        return names[nonzero]

    def supports_gradient_breaking(self) -> bool:
        """k1 > 0, k2 >= 0, k3 >= 0"""
        return self.k1 > 0 and self.k2 >= 0 and self.k3 >= 0

    def gradient_breaking_case(self) -> Optional[int]:
        """Case number (1-4) of the initial-gradient breaking criterion, None if not applicable"""
        if not self.supports_gradient_breaking():
            return None
        if self.k2 > 0 and self.k3 > 0:
            return 1
        if self.k2 == 0 and self.k3 > 0:
            return 2
        if self.k2 > 0 and self.k3 == 0:
            return 3
        return 4

    def supports_rate_estimate(self) -> bool:
        """k1, k2, k3 all strictly positive"""
        return self.k1 > 0 and self.k2 > 0 and self.k3 > 0

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.k1, self.k2, self.k3)


class GridSpec(BaseModel):
    """Uniform periodic grid x_j = origin + j*period/n"""
    model_config = ConfigDict(frozen=True)

    period: float = 1.0
    n: int = 256
    origin: float = 0.0

    @field_validator("n")
    @classmethod
    def _power_of_two(cls, v: int) -> int:
        if v < 8 or (v & (v - 1)) != 0:
            raise ValueError("n must be a power of two and at least 8")
        return v

    @field_validator("period")
    @classmethod
    def _positive(cls, v: float) -> float:
        if not (np.isfinite(v) and v > 0):
            raise ValueError("period must be a positive finite number")
        return float(v)

    @classmethod
    def line_box(cls, half_width: float, n: int) -> "GridSpec":
        """Periodic box [-L, L) standing in for the real line"""
        return cls(period=2.0 * half_width, n=n, origin=-half_width)

    @property
    def h(self) -> float:
        return self.period / self.n

    @property
    def x(self) -> np.ndarray:
        return self.origin + self.h * np.arange(self.n)


class Field(BaseModel):
    """Sampled periodic real field on a GridSpec"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    grid: GridSpec
    values: np.ndarray
    role: FieldRole = "generic"

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> np.ndarray:
        arr = np.array(v, dtype=float)
        if arr.ndim != 1:
            raise ValueError("field values must be one-dimensional")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _matches_grid(self) -> "Field":
        if self.values.shape[0] != self.grid.n:
            raise ValueError(f"expected {self.grid.n} samples, got {self.values.shape[0]}")
        return self

    def with_values(self, values: np.ndarray, role: FieldRole = "generic") -> "Field":
        return Field(grid=self.grid, values=values, role=role)


# ============================================================
# Peakons
# ============================================================

class PeakonState(BaseModel):
    """N amplitudes p_i and strictly increasing positions q_i"""
    model_config = ConfigDict(frozen=True)

    t: float = 0.0
    domain: Domain = "line"
    p: List[float]
    q: List[float]

    @model_validator(mode="after")
    def _check(self) -> "PeakonState":
        if len(self.p) < 1:
            raise ValueError("at least one peakon is required")
        if len(self.p) != len(self.q):
            raise ValueError("p and q must have the same length")
        if not (np.all(np.isfinite(self.p)) and np.all(np.isfinite(self.q))):
            raise ValueError("amplitudes and positions must be finite")
        if np.any(np.diff(self.q) <= 0):
            raise ValueError("positions must be strictly increasing")
        if self.domain == "circle" and (self.q[0] < 0.0 or self.q[-1] >= 1.0):
            raise ValueError("circle positions must lie in [0, 1)")
        return self

    @property
    def n_peakons(self) -> int:
        return len(self.p)

    @property
    def p_array(self) -> np.ndarray:
        return np.asarray(self.p, dtype=float)

    @property
    def q_array(self) -> np.ndarray:
        return np.asarray(self.q, dtype=float)


class IntegratorOptions(BaseModel):
    """Adaptive Runge-Kutta settings shared by the peakon and PDE integrators"""
    atol: float = 1e-10
    rtol: float = 1e-10
    method: Literal["RK45", "DOP853"] = "DOP853"
    collide_eps: float = 1e-8
    max_step: float = float("inf")
    samples: int = 201
    guard_ux: float = 1e6
    guard_M: float = 1e4
    guard_tail: float = 1e-7
    filter: bool = False
    form: Literal["weak", "m"] = "weak"
    min_step: float = 1e-12


class TestFunction(BaseModel):
    """Smooth compactly supported bump phi(t, x) = B((t-tc)/tw) * B((x-xc)/xw)"""
    __test__ = False  # not a pytest class

    t_center: float
    t_half_width: float
    x_center: float
    x_half_width: float

    @field_validator("t_half_width", "x_half_width")
    @classmethod
    def _positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("half widths must be positive")
        return v

    @property
    def t_support(self) -> Tuple[float, float]:
        return (self.t_center - self.t_half_width, self.t_center + self.t_half_width)

    @property
    def x_support(self) -> Tuple[float, float]:
        return (self.x_center - self.x_half_width, self.x_center + self.x_half_width)

    @staticmethod
    def _bump(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        s = np.asarray(s, dtype=float)
        inside = np.abs(s) < 1.0
        val = np.zeros_like(s)
        der = np.zeros_like(s)
        si = s[inside]
        w = 1.0 - si * si
        val[inside] = np.exp(-1.0 / w)
        der[inside] = val[inside] * (-2.0 * si / (w * w))
        return val, der

    def _local_x(self, x: np.ndarray, period: Optional[float]) -> np.ndarray:
        d = np.asarray(x, dtype=float) - self.x_center
        if period is not None:
            d = (d + 0.5 * period) % period - 0.5 * period
        return d / self.x_half_width

    def evaluate(self, t: float, x: np.ndarray, period: Optional[float] = None):
        """Return (phi, phi_t, phi_x) at time t on points x"""
        bt, dbt = self._bump(np.array([(t - self.t_center) / self.t_half_width]))
        bx, dbx = self._bump(self._local_x(x, period))
        phi = bt[0] * bx
        phi_t = dbt[0] / self.t_half_width * bx
        phi_x = bt[0] * dbx / self.x_half_width
        return phi, phi_t, phi_x


# ============================================================
# Results
# ============================================================

class Event(BaseModel):
    """Structured event emitted by integrators and monitors"""
    kind: Literal[
        "collision", "step_underflow", "breakdown", "blowup_suspected",
        "truncated", "m_bound_breach", "positivity_breach", "probe_aborted",
    ]
    t: float
    message: str = ""
    detail: Dict[str, float] = {}


class AmplitudeReport(BaseModel):
    """Amplitudes a solving the speed relation c = A a^2 + B a"""
    c: float
    domain: Domain
    quadratic_coeff: float
    linear_coeff: float
    branch: Literal["quadratic", "complex", "degenerate", "every", "none"]
    real_roots: List[float] = []
    complex_roots: List[Tuple[float, float]] = []


class ReductionRow(BaseModel):
    """One line of the speed-relation reduction table"""
    name: str
    domain: Domain
    k: Tuple[float, float, float]
    c: float
    closed_form: List[float]
    computed: List[float]
    max_error: float
    exact: bool


class PeakonTrajectory(BaseModel):
    """Sampled peakon evolution with its event log"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    domain: Domain
    params: ModelParams
    t: np.ndarray
    p: np.ndarray           # (samples, N)
    q: np.ndarray           # (samples, N), circle positions renormalized to [0, 1)
    q_lift: np.ndarray      # (samples, N), continuous positions
    events: List[Event] = []
    status: Literal["complete", "collision", "step_underflow"] = "complete"

    _dense: Optional[Callable[[float], np.ndarray]] = PrivateAttr(default=None)

    @property
    def n_peakons(self) -> int:
        return self.p.shape[1]

    @property
    def t_final(self) -> float:
        return float(self.t[-1])

    def state_at(self, t: float) -> Tuple[np.ndarray, np.ndarray]:
        """(p, q_lift) at time t from the dense interpolant or a cubic spline of the samples"""
        if self._dense is not None:
            y = np.asarray(self._dense(t), dtype=float)
            n = self.n_peakons
            return y[:n], y[n:]
        from scipy.interpolate import CubicSpline
        if len(self.t) < 2:
            return self.p[0].copy(), self.q_lift[0].copy()
        p = CubicSpline(self.t, self.p, axis=0)(t)
        q = CubicSpline(self.t, self.q_lift, axis=0)(t)
        return np.asarray(p), np.asarray(q)

    def state(self, idx: int) -> PeakonState:
        """Sample idx as a PeakonState (circle positions renormalized)"""
        return PeakonState(
            t=float(self.t[idx]), domain=self.domain,
            p=[float(v) for v in self.p[idx]], q=[float(v) for v in self.q[idx]],
        )

    @classmethod
    def frozen(cls, state: PeakonState, params: ModelParams, t_end: float, samples: int = 11) -> "PeakonTrajectory":
        """Non-evolving trajectory holding state fixed over [state.t, t_end]"""
        t = np.linspace(state.t, t_end, samples)
        p = np.tile(state.p_array, (samples, 1))
        q = np.tile(state.q_array, (samples, 1))
        traj = cls(domain=state.domain, params=params, t=t, p=p, q=q, q_lift=q.copy())
        y = np.concatenate([state.p_array, state.q_array])
        traj._dense = lambda _t: y
        return traj


class WeakResidualReport(BaseModel):
    """Weak-form residual with its quadrature error estimate"""
    value: float
    coarse_value: float
    error_estimate: float
    scale: float
    bound: float

    @property
    def within_bound(self) -> bool:
        return abs(self.value) < self.bound


class DiagnosticsSeries(BaseModel):
    """Per-step monitors of a PDE run"""
    t: List[float] = []
    h1: List[float] = []
    m_min: List[float] = []
    m_max: List[float] = []
    m_sup: List[float] = []
    M_min: List[float] = []
    M_max: List[float] = []
    ux_sup: List[float] = []
    u_plus_ux_min: List[float] = []
    u_minus_ux_min: List[float] = []
    criterion_integral: List[float] = []
    m_bound_breach: List[bool] = []
    positivity_breach: List[bool] = []
    m_tail: List[float] = []
    m_bound: Optional[float] = None
    sign_checks_active: bool = False

    def __len__(self) -> int:
        return len(self.t)


class FieldTrajectory(BaseModel):
    """Output of the pseudospectral integrator"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: GridSpec
    params: ModelParams
    form: Literal["weak", "m"] = "weak"
    times: np.ndarray
    snapshots: np.ndarray   # (samples, n) values of u
    diagnostics: DiagnosticsSeries
    events: List[Event] = []
    status: Literal["complete", "breakdown"] = "complete"
    breakdown_time: Optional[float] = None
    last_step: Optional[float] = None
    steps: int = 0

    _dense: Any = PrivateAttr(default=None)

    @property
    def t_final(self) -> float:
        return float(self.diagnostics.t[-1]) if self.diagnostics.t else float(self.times[-1])

    def field_at(self, t: float) -> np.ndarray:
        """u(t) on the grid from the stepper's dense output"""
        if self._dense is None:
            raise ValueError("trajectory has no dense output")
        y = np.asarray(self._dense(t), dtype=float)
        if self.form == "m":
            from peakonlab.kernels import helmholtz_array
            return helmholtz_array(y, self.grid)
        return y

    def snapshot(self, idx: int) -> Field:
        return Field(grid=self.grid, values=self.snapshots[idx], role="u")


class CharacteristicTrace(BaseModel):
    """Samples along q(t, x0) with the dual computations of q_x and m(t, q)"""
    seed: float
    t: List[float] = []
    q: List[float] = []
    q_x: List[float] = []
    q_x_direct: List[float] = []
    u: List[float] = []
    u_x: List[float] = []
    m: List[float] = []
    m_transported: List[float] = []
    M: List[float] = []
    truncated: bool = False
    max_qx_rel_error: float = 0.0
    max_m_rel_error: float = 0.0
    qx_positive: bool = True
    m_sign_preserved: bool = True


class BreakingCertificate(BaseModel):
    """Evaluated sufficient condition for wave breaking with its constants"""
    theorem: Literal["T1.7-case1", "T1.7-case2", "T1.7-case3", "T1.7-case4", "T1.8", "none"]
    status: Literal["satisfied", "unsatisfied", "not-applicable", "precondition-failed"]
    satisfied: bool = False
    point: Optional[float] = None
    params: ModelParams
    u0: Optional[float] = None
    ux0: Optional[float] = None
    m0: Optional[float] = None
    h1_norm: Optional[float] = None
    preconditions: Dict[str, bool] = {}
    gamma_branches: List[float] = []
    branch_satisfied: List[bool] = []
    alpha: Optional[float] = None
    constants: Dict[str, Optional[float]] = {}
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    margin: Optional[float] = None
    T_upper: Optional[float] = None
    t_minus: Optional[float] = None
    t_plus: Optional[float] = None
    complex_roots: List[Tuple[float, float]] = []
    rate_target: Optional[float] = None
    notes: List[str] = []


class HolderReport(BaseModel):
    """Empirical data-to-solution continuity probe"""
    s: float
    r: float
    region: Optional[Literal["D1", "D2", "D3", "D4"]] = None
    beta: Optional[float] = None
    eps: List[float] = []
    differences: List[float] = []
    slope: Optional[float] = None
    aborted: bool = False
    reason: str = ""


class CheckResult(BaseModel):
    """Outcome of one invariant check run by the verifier"""
    name: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None
    detail: str = ""


class ScenarioState(TypedDict, total=False):
    """Scenario pipeline state"""
    # Input
    config: Any                 # peakonlab.config.ScenarioConfig
    run_dir: str

    # Prepared inputs
    initial: Dict[str, Any]

    # Results by producer name
    results: Dict[str, Any]
    events: List[Event]

    # Verification
    checks: List[CheckResult]

    # Output
    artifacts: Dict[str, str]
    status: str
