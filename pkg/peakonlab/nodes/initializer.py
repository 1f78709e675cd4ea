"""
Initializer Node - 설정에서 초기 데이터 구성

- peakon 시나리오: PeakonState
- PDE 시나리오: 격자 위의 u0 Field (gaussian / mollified_peakon / constant / sine)
- holder-probe: 섭동 방향이 더해진 v0
"""
from typing import Any, Dict, Optional

import numpy as np
from pydantic import ValidationError

from peakonlab.config import ScenarioConfig
from peakonlab.errors import ConfigError
from peakonlab.log_utils import log_execution
from peakonlab.pde_solver import gaussian_bump, mollified_peakon
from peakonlab.state import Field, GridSpec, PeakonState, ScenarioState


def build_initial_field(cfg: ScenarioConfig, grid: GridSpec) -> Field:
    """u0 on the grid from the [initial] section"""
    ini = cfg.initial
    if ini.profile == "gaussian":
        return gaussian_bump(ini.amplitude, ini.center, ini.width, grid)
    if ini.profile == "mollified_peakon":
        return mollified_peakon(ini.amplitude, ini.center, ini.width, grid)
    if ini.profile == "constant":
        return Field(grid=grid, values=np.full(grid.n, ini.amplitude), role="u")
    phase = 2.0 * np.pi * (grid.x - ini.center) / grid.period
    return Field(grid=grid, values=ini.amplitude * np.sin(phase), role="u")


def probe_partner(u0: Field, mode: int) -> Field:
    """u0 plus a single Fourier mode; the probe rescales the difference per rung"""
    grid = u0.grid
    wave = np.sin(2.0 * np.pi * mode * (grid.x - grid.origin) / grid.period)
    return Field(grid=grid, values=u0.values + 1e-2 * wave, role="u")


class Initializer:
    """Turns a validated ScenarioConfig into initial data"""

    def __init__(self, run_dir: Optional[str] = None):
        self.run_dir = run_dir

    def __call__(self, state: ScenarioState) -> Dict[str, Any]:
        cfg: ScenarioConfig = state["config"]
        kind = cfg.scenario.kind
        print(f"[INIT] Scenario '{cfg.name}' ({kind}), model {cfg.params().label} k={cfg.params().as_tuple()}")

        initial: Dict[str, Any] = {"params": cfg.params()}
        try:
            if cfg.peakons is not None and kind in ("peakon-sim", "periodic-peakon-sim"):
                initial["state"] = PeakonState(
                    t=0.0, domain=cfg.grid.domain,
                    p=cfg.peakons.amplitudes, q=cfg.peakons.positions,
                )
                print(f"[INIT] {len(cfg.peakons.amplitudes)} peakon(s) on the {cfg.grid.domain}")
            if cfg.initial is not None:
                grid = cfg.grid_spec()
                initial["grid"] = grid
                initial["u0"] = build_initial_field(cfg, grid)
                print(f"[INIT] u0 = {cfg.initial.profile} on n={grid.n}, period={grid.period:g}")
                if kind == "holder-probe":
                    initial["v0"] = probe_partner(initial["u0"], cfg.probe.mode)
        except ValidationError as exc:
            raise ConfigError(f"invalid initial data: {exc.errors()[0]['msg']}") from exc
        except ValueError as exc:
            raise ConfigError(f"invalid initial data: {exc}") from exc

        update = {
            "initial": initial,
            "results": {},
            "events": [],
            "checks": [],
            "status": "initialized",
        }
        log_execution(self.run_dir, "initializer", update)
        return update
