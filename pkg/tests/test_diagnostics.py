import numpy as np
import pytest
from scipy.integrate import quad

from peakonlab.diagnostics import (
    DiagnosticsRecorder, h1_energy, h1_energy_peakons, holder_probe, holder_region_classify,
)
from peakonlab.kernels import sobolev_norm
from peakonlab.pde_solver import gaussian_bump
from peakonlab.peakons import field_arrays
from peakonlab.state import Field, GridSpec, IntegratorOptions, ModelParams, PeakonState


GENERAL = ModelParams(k1=1.0, k2=1.0, k3=1.0)


class TestEnergy:
    def test_h1_of_sine(self):
        grid = GridSpec(period=1.0, n=64)
        u = Field(grid=grid, values=np.sin(2 * np.pi * grid.x))
        assert h1_energy(u) == pytest.approx(0.5 * (1 + 4 * np.pi ** 2), rel=1e-12)

    def test_h1_matches_sobolev_norm(self):
        grid = GridSpec(period=1.0, n=256)
        u = gaussian_bump(1.0, 0.5, 0.1, grid)
        assert h1_energy(u) == pytest.approx(sobolev_norm(u, 1.0) ** 2, rel=1e-10)

    def test_line_peakon_energy(self):
        """int (u^2 + u_x^2) dx = 2 p^2 for one line peakon"""
        assert h1_energy_peakons(PeakonState(p=[1.5], q=[0.0])) == pytest.approx(4.5)

    def test_circle_peakon_energy_by_quadrature(self):
        state = PeakonState(domain="circle", p=[0.8, -0.3], q=[0.2, 0.7])

        def density(x):
            u, ux, _ = field_arrays(state.p_array, state.q_array, [x], "circle")
            return u[0] ** 2 + ux[0] ** 2

        cuts = [0.0, 0.2, 0.7, 1.0]
        direct = sum(quad(density, a, b, epsabs=1e-13)[0] for a, b in zip(cuts[:-1], cuts[1:]))
        assert h1_energy_peakons(state) == pytest.approx(direct, rel=1e-8)


class TestRecorder:
    def test_positive_momentum_arms_checks(self):
        grid = GridSpec(period=1.0, n=128)
        u0 = gaussian_bump(1.0, 0.5, 0.1, grid)
        recorder = DiagnosticsRecorder(grid, GENERAL, u0.values)
        out = recorder.record(0.0, u0.values)
        assert set(out) == {"ux_sup", "M_min", "m_bound_breach", "positivity_breach", "m_tail"}
        assert not out["m_bound_breach"] and not out["positivity_breach"]
        series = recorder.series()
        assert series.sign_checks_active
        assert series.m_bound > 0
        assert len(series) == 1

    def test_signed_momentum_disarms_checks(self):
        grid = GridSpec(period=1.0, n=64)
        u0 = np.sin(2 * np.pi * grid.x)
        recorder = DiagnosticsRecorder(grid, GENERAL, u0)
        recorder.record(0.0, u0)
        assert not recorder.series().sign_checks_active
        assert recorder.series().m_bound is None

    def test_criterion_integral_accumulates(self):
        grid = GridSpec(period=1.0, n=64)
        u0 = gaussian_bump(1.0, 0.5, 0.1, grid).values
        recorder = DiagnosticsRecorder(grid, GENERAL, u0)
        recorder.record(0.0, u0)
        recorder.record(0.5, u0)
        s = recorder.series()
        assert s.criterion_integral[-1] == pytest.approx(0.5 * s.m_sup[0] ** 2)


class TestHolderRegions:
    @pytest.mark.parametrize("s, r, region, beta", [
        (3.0, 1.0, "D1", 1.0),
        (4.0, 2.5, "D1", 1.0),
        (2.75, 0.1, "D2", 2.5 / 2.65),
        (2.7, 0.1, "D2", 12.0 / 13.0),
        (3.0, 1.2, "D3", 0.9),
        (4.0, 3.5, "D4", 0.5),
    ])
    def test_classification(self, s, r, region, beta):
        got_region, got_beta = holder_region_classify(s, r)
        assert got_region == region
        assert got_beta == pytest.approx(beta)

    def test_outside(self):
        assert holder_region_classify(2.0, 1.0) == (None, None)
        assert holder_region_classify(3.0, 3.0) == (None, None)

    def test_admissible_plane_is_covered(self):
        """Every s > 5/2, 0 <= r < s falls in a region with 0 < beta <= 1"""
        for s in np.linspace(2.5 + 1e-6, 6.0, 300):
            for r in s * np.linspace(0.0, 1.0, 300, endpoint=False):
                region, beta = holder_region_classify(s, r)
                assert region in ("D1", "D2", "D3", "D4"), (s, r)
                assert 0.0 < beta <= 1.0 + 1e-12, (s, r, region)


class TestHolderProbe:
    def test_zero_direction(self):
        grid = GridSpec(period=1.0, n=32)
        u0 = gaussian_bump(1.0, 0.5, 0.1, grid)
        report = holder_probe(u0, u0, 3.0, 1.0, 0.1, GENERAL)
        assert report.eps == [0.0]
        assert report.differences == [0.0]
        assert report.slope is None

    def test_smooth_data_is_lipschitz(self):
        grid = GridSpec(period=1.0, n=64)
        u0 = gaussian_bump(1.0, 0.5, 0.1, grid)
        v0 = Field(grid=grid, values=u0.values + 1e-2 * np.sin(4 * np.pi * grid.x), role="u")
        opts = IntegratorOptions(rtol=1e-10, atol=1e-12, samples=5)
        report = holder_probe(u0, v0, 3.0, 1.0, 0.05, GENERAL, eps=[1e-2, 5e-3, 2.5e-3], opts=opts)
        assert report.region == "D1"
        assert not report.aborted
        assert len(report.differences) == 3
        assert report.slope == pytest.approx(1.0, abs=0.1)
