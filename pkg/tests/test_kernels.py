import numpy as np
import pytest

from peakonlab.kernels import (
    kernel_eval, helmholtz_solve, momentum, oneside_convolve, spectral_derivative,
    sobolev_norm, spectral_interpolate, derivative_multiplier, line_box_halfwidth,
)
from peakonlab.state import Field, GridSpec


def circle_field(values_fn, n=128):
    grid = GridSpec(period=1.0, n=n)
    return Field(grid=grid, values=values_fn(grid.x))


class TestKernelEval:
    def test_line_kernel_peak(self):
        """p(0) = 1/2 and p decays like exp(-|x|)/2"""
        assert kernel_eval(0.0) == pytest.approx(0.5)
        assert kernel_eval(-2.0) == pytest.approx(0.5 * np.exp(-2.0))

    def test_circle_kernel_periodic(self):
        """G is 1-periodic with G(0) = cosh(1/2)/(2 sinh(1/2))"""
        g0 = kernel_eval(0.0, "circle")
        assert g0 == pytest.approx(np.cosh(0.5) / (2.0 * np.sinh(0.5)))
        x = np.array([0.1, 0.37, 0.8])
        assert np.allclose(kernel_eval(x + 1.0, "circle"), kernel_eval(x, "circle"))


class TestHelmholtz:
    def test_single_mode(self):
        """(1 - d^2/dx^2)^{-1} cos(2 pi x) = cos(2 pi x)/(1 + 4 pi^2)"""
        m = circle_field(lambda x: np.cos(2 * np.pi * x))
        u = helmholtz_solve(m)
        expected = np.cos(2 * np.pi * m.grid.x) / (1 + 4 * np.pi ** 2)
        assert np.max(np.abs(u.values - expected)) < 1e-14
        assert u.role == "u"

    def test_momentum_inverts_solve(self):
        """momentum(helmholtz_solve(m)) returns m"""
        m = circle_field(lambda x: np.exp(np.cos(2 * np.pi * x)))
        back = momentum(helmholtz_solve(m))
        assert np.max(np.abs(back.values - m.values)) < 1e-10

    def test_line_box_matches_kernel(self):
        """A narrow unit-mass Gaussian momentum gives u close to p away from the bump"""
        sigma = 0.05
        grid = GridSpec.line_box(20.0, 4096)
        x = grid.x
        m = Field(grid=grid, values=np.exp(-0.5 * (x / sigma) ** 2) / (np.sqrt(2 * np.pi) * sigma))
        u = helmholtz_solve(m).values
        far = (np.abs(x) > 0.5) & (np.abs(x) < 5.0)
        expected = 0.5 * np.exp(-np.abs(x[far])) * np.exp(0.5 * sigma ** 2)
        assert np.max(np.abs(u[far] - expected)) < 1e-6


class TestOneSided:
    def test_sides_add_to_helmholtz(self):
        """p_plus * m + p_minus * m = p * m"""
        m = circle_field(lambda x: np.exp(np.sin(2 * np.pi * x)) + 0.3 * np.cos(6 * np.pi * x))
        plus = oneside_convolve(m, "plus").values
        minus = oneside_convolve(m, "minus").values
        assert np.max(np.abs(plus + minus - helmholtz_solve(m).values)) < 1e-13

    def test_quadrature_agrees_with_spectral(self):
        """The O(n) recurrence is a second-order approximation of the spectral result"""
        m = circle_field(lambda x: np.exp(np.cos(2 * np.pi * x)), n=1024)
        for side in ("plus", "minus"):
            spectral = oneside_convolve(m, side, "spectral").values
            quad = oneside_convolve(m, side, "quadrature").values
            assert np.max(np.abs(spectral - quad)) < 1e-4

    def test_constant_density(self):
        """p_plus * 1 = 1/2 on any period"""
        grid = GridSpec(period=3.0, n=64)
        one = Field(grid=grid, values=np.ones(64))
        assert np.allclose(oneside_convolve(one, "plus").values, 0.5)
        assert np.allclose(oneside_convolve(one, "minus", "quadrature").values, 0.5, atol=1e-3)


class TestDerivativesAndNorms:
    def test_derivative_of_sine(self):
        u = circle_field(lambda x: np.sin(2 * np.pi * x))
        ux = spectral_derivative(Field(grid=u.grid, values=u.values, role="u"))
        assert np.max(np.abs(ux.values - 2 * np.pi * np.cos(2 * np.pi * u.grid.x))) < 1e-12
        assert ux.role == "u_x"

    def test_nyquist_zeroed(self):
        grid = GridSpec(period=1.0, n=16)
        assert derivative_multiplier(grid)[-1] == 0

    def test_sobolev_norm_of_cosine(self):
        """|cos(2 pi x)|_{H^s}^2 = (1 + 4 pi^2)^s / 2"""
        f = circle_field(lambda x: np.cos(2 * np.pi * x))
        assert sobolev_norm(f, 0.0) == pytest.approx(np.sqrt(0.5), rel=1e-12)
        assert sobolev_norm(f, 2.0) == pytest.approx(np.sqrt(0.5 * (1 + 4 * np.pi ** 2) ** 2), rel=1e-12)

    def test_sobolev_negative_index(self):
        f = circle_field(np.sin)
        with pytest.raises(ValueError):
            sobolev_norm(f, -1.0)


class TestInterpolation:
    def test_off_grid_values(self):
        """Trigonometric interpolation is exact for resolved modes"""
        f = circle_field(lambda x: np.sin(2 * np.pi * x) + 0.5 * np.cos(4 * np.pi * x), n=32)
        pts = np.array([0.123, 0.5, 0.987])
        expected = np.sin(2 * np.pi * pts) + 0.5 * np.cos(4 * np.pi * pts)
        assert np.allclose(spectral_interpolate(f, pts), expected, atol=1e-13)
        d_expected = 2 * np.pi * np.cos(2 * np.pi * pts) - 2 * np.pi * np.sin(4 * np.pi * pts)
        assert np.allclose(spectral_interpolate(f, pts, derivative=1), d_expected, atol=1e-11)

    def test_line_box_origin(self):
        """Points are measured from the box origin"""
        grid = GridSpec.line_box(10.0, 256)
        f = Field(grid=grid, values=np.exp(-grid.x ** 2))
        assert spectral_interpolate(f, [0.3])[0] == pytest.approx(np.exp(-0.09), abs=1e-10)

    def test_box_halfwidth(self):
        assert line_box_halfwidth(1.0, 1e-12) == pytest.approx(np.log(1e12))
