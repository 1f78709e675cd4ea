"""
Scenario configuration - INI text validated by pydantic

    [model]       k1, k2, k3
    [scenario]    kind, seed, name
    [grid]        domain, n, period, L
    [integrator]  t_end, atol, rtol, method, collide_eps, max_step, guard_ux, guard_M, guard_tail, filter, form, min_step
    [output]      dir, cadence, samples, run_id
    [peakons] [initial] [breaking] [probe] [characteristics]   per scenario kind
    [sweep]       section.key = v1, v2, ...
"""
import configparser
import itertools
import os
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, BeforeValidator, ValidationError, field_validator, model_validator

from peakonlab.errors import ConfigError
from peakonlab.state import GridSpec, IntegratorOptions, ModelParams


ScenarioKind = Literal[
    "peakon-sim", "periodic-peakon-sim", "pde-sim", "breaking-check",
    "reduce-check", "holder-probe", "characteristics",
]

OUTPUT_ENV = "PEAKONLAB_OUTPUT_DIR"


def _split_floats(v: Any) -> Any:
    if isinstance(v, str):
        return [float(x) for x in v.replace(";", ",").split(",") if x.strip()]
    return v


# comma-separated list of floats in INI text
FloatList = Annotated[List[float], BeforeValidator(_split_floats)]


class ModelSection(BaseModel):
    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0


class ScenarioSection(BaseModel):
    kind: ScenarioKind
    seed: int = 0
    name: Optional[str] = None


class GridSection(BaseModel):
    domain: Literal["line", "circle"] = "circle"
    n: int = 256
    period: float = 1.0
    L: float = 16.0


class IntegratorSection(BaseModel):
    t_end: float = 1.0
    atol: float = 1e-10
    rtol: float = 1e-10
    method: Literal["RK45", "DOP853"] = "DOP853"
    collide_eps: float = 1e-8
    max_step: float = float("inf")
    guard_ux: float = 1e6
    guard_M: float = 1e4
    guard_tail: float = 1e-7
    filter: bool = False
    form: Literal["weak", "m"] = "weak"
    min_step: float = 1e-12

    @field_validator("t_end")
    @classmethod
    def _positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("t_end must be positive")
        return v


class OutputSection(BaseModel):
    dir: str = "runs"
    cadence: Optional[float] = None
    samples: int = 201
    run_id: Optional[str] = None


class PeakonsSection(BaseModel):
    amplitudes: FloatList
    positions: FloatList
    residual_checks: int = 0

    @model_validator(mode="after")
    def _lengths(self) -> "PeakonsSection":
        if len(self.amplitudes) != len(self.positions):
            raise ValueError("amplitudes and positions must have the same length")
        return self


class InitialSection(BaseModel):
    profile: Literal["gaussian", "mollified_peakon", "constant", "sine"] = "gaussian"
    amplitude: float = 1.0
    center: float = 0.5
    width: float = 0.1


class BreakingSection(BaseModel):
    theorem: Literal["T1.7", "T1.8"] = "T1.7"
    x0: Optional[float] = None
    c2: Union[float, Literal["auto"]] = "auto"
    point: Optional[FloatList] = None     # u0(x0), u0_x(x0), m0(x0)
    h1_norm: Optional[float] = None
    simulate: bool = False

    @field_validator("point")
    @classmethod
    def _three(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None and len(v) != 3:
            raise ValueError("point takes three values: u0, u0_x, m0")
        return v

    @model_validator(mode="after")
    def _rate_needs_norm(self) -> "BreakingSection":
        if self.theorem == "T1.8" and self.point is not None and self.h1_norm is None:
            raise ValueError("T1.8 with a point needs h1_norm")
        return self


class ProbeSection(BaseModel):
    s: float = 3.0
    r: float = 1.0
    eps: FloatList = [1e-2, 5e-3, 2.5e-3, 1.25e-3]
    mode: int = 1


class CharacteristicsSection(BaseModel):
    seeds: FloatList = []
    count: int = 20
    margin: float = 1.0


REQUIRED_SECTIONS = {
    "peakon-sim": ("peakons",),
    "periodic-peakon-sim": ("peakons",),
    "pde-sim": ("initial",),
    "breaking-check": ("breaking",),
    "reduce-check": (),
    "holder-probe": ("initial", "probe"),
    "characteristics": ("initial",),
}


class ScenarioConfig(BaseModel):
    """Validated scenario"""
    model: ModelSection = ModelSection()
    scenario: ScenarioSection
    grid: GridSection = GridSection()
    integrator: IntegratorSection = IntegratorSection()
    output: OutputSection = OutputSection()
    peakons: Optional[PeakonsSection] = None
    initial: Optional[InitialSection] = None
    breaking: Optional[BreakingSection] = None
    probe: Optional[ProbeSection] = None
    characteristics: Optional[CharacteristicsSection] = None
    sweep: Dict[str, List[float]] = {}

    @field_validator("sweep", mode="before")
    @classmethod
    def _sweep_lists(cls, v: Any) -> Any:
        if isinstance(v, dict):
            return {k: _split_floats(vals) for k, vals in v.items()}
        return v

    @model_validator(mode="after")
    def _sections_for_kind(self) -> "ScenarioConfig":
        kind = self.scenario.kind
        for section in REQUIRED_SECTIONS[kind]:
            if getattr(self, section) is None:
                raise ValueError(f"scenario kind '{kind}' needs a [{section}] section")
        if kind == "periodic-peakon-sim" and self.grid.domain != "circle":
            raise ValueError("periodic-peakon-sim runs on the circle")
        if kind == "peakon-sim" and self.grid.domain != "line":
            raise ValueError("peakon-sim runs on the line")
        if kind == "breaking-check" and self.breaking.point is None and self.initial is None:
            raise ValueError("breaking-check needs [breaking] point or an [initial] section")
        for key in self.sweep:
            if "." not in key:
                raise ValueError(f"sweep key '{key}' must look like section.key")
        return self

    @property
    def name(self) -> str:
        return self.scenario.name or self.scenario.kind.replace("-", "_")

    def params(self) -> ModelParams:
        return ModelParams(k1=self.model.k1, k2=self.model.k2, k3=self.model.k3)

    def grid_spec(self) -> GridSpec:
        if self.grid.domain == "line":
            return GridSpec.line_box(self.grid.L, self.grid.n)
        return GridSpec(period=self.grid.period, n=self.grid.n)

    def integrator_options(self) -> IntegratorOptions:
        data = self.integrator.model_dump(exclude={"t_end"})
        return IntegratorOptions(samples=self.output.samples, **data)

    def output_times(self) -> np.ndarray:
        t_end = self.integrator.t_end
        if self.output.cadence:
            count = int(np.floor(t_end / self.output.cadence + 1e-9))
            times = self.output.cadence * np.arange(count + 1)
            return times if times[-1] >= t_end else np.append(times, t_end)
        return np.linspace(0.0, t_end, self.output.samples)

    def output_dir(self) -> str:
        return os.getenv(OUTPUT_ENV) or self.output.dir


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        where = ".".join(str(p) for p in err["loc"]) or "config"
        lines.append(f"{where}: {err['msg']}")
    return "\n".join(lines)


def parse_config(text: str) -> ScenarioConfig:
    """Parse INI text into a validated ScenarioConfig"""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    data: Dict[str, Any] = {name: dict(parser.items(name)) for name in parser.sections()}
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]["loc"] if exc.errors() else ()
        raise ConfigError(_format_validation(exc), field=".".join(str(p) for p in first) or None) from exc


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())


def expand_sweep(cfg: ScenarioConfig) -> List[ScenarioConfig]:
    """Cartesian product of the [sweep] entries as independent scenarios"""
    if not cfg.sweep:
        return [cfg]
    keys = sorted(cfg.sweep)
    variants = []
    for values in itertools.product(*(cfg.sweep[k] for k in keys)):
        data = cfg.model_dump()
        data["sweep"] = {}
        suffix = []
        for key, value in zip(keys, values):
            section, field = key.split(".", 1)
            if data.get(section) is None:
                raise ConfigError(f"sweep targets missing section [{section}]", field=key)
            data[section][field] = value
            suffix.append(f"{field}={value:g}")
        data["scenario"]["name"] = f"{cfg.name}_" + "_".join(suffix)
        data["output"]["run_id"] = None
        try:
            variants.append(ScenarioConfig.model_validate(data))
        except ValidationError as exc:
            raise ConfigError(_format_validation(exc), field=",".join(keys)) from exc
    return variants
