"""
Kernels - Helmholtz kernel machinery on the periodic grid

p(x) = exp(-|x|)/2 inverts 1 - d^2/dx^2 on the line, G(x) = cosh(x - 1/2 - floor(x))/(2 sinh(1/2))
on the unit circle. Line problems live on a periodic box [-L, L) wide enough that u is
negligible at its ends; on the box the Fourier multiplier 1/(1 + xi^2) is the periodized kernel.

All functions are pure. Array-level helpers (suffix _array) skip Field validation and are
used in the solver inner loops.
"""
from typing import Literal, Union

import numpy as np
from scipy.signal import lfilter

from peakonlab.state import Field, GridSpec, Domain


Side = Literal["plus", "minus"]


# ============================================================
# Wavenumbers and multipliers
# ============================================================

def wavenumbers(grid: GridSpec) -> np.ndarray:
    """rfft wavenumbers xi_k = 2 pi k / period"""
    return 2.0 * np.pi * np.fft.rfftfreq(grid.n, d=grid.h)


def derivative_multiplier(grid: GridSpec) -> np.ndarray:
    """i*xi with the Nyquist mode zeroed"""
    ik = 1j * wavenumbers(grid)
    ik[-1] = 0.0
    return ik


def dealias_mask(grid: GridSpec) -> np.ndarray:
    """2/3-rule mask over rfft modes"""
    k = np.arange(grid.n // 2 + 1)
    return (k <= grid.n // 3).astype(float)


def exponential_filter(grid: GridSpec, order: int = 36, strength: float = 36.0) -> np.ndarray:
    """sigma(k) = exp(-strength * (k/k_max)^order)"""
    k = np.arange(grid.n // 2 + 1)
    return np.exp(-strength * (k / (grid.n // 2)) ** order)


def spectral_tail(values: np.ndarray, grid: GridSpec) -> float:
    """Share of sum |c_k| carried by the top third of the dealiased band (0 for a zero field)"""
    coeffs = np.abs(np.fft.rfft(values))
    total = float(coeffs.sum())
    if total == 0.0:
        return 0.0
    cut = grid.n // 3
    return float(coeffs[(2 * cut) // 3:cut + 1].sum() / total)


def _check_finite(values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        raise ValueError("input samples must be finite")


# ============================================================
# Kernels
# ============================================================

def kernel_eval(x: Union[float, np.ndarray], domain: Domain = "line", period: float = 1.0):
    """Evaluate p(x) on the line or the periodic Green's function on a circle of given period"""
    x = np.asarray(x, dtype=float)
    if domain == "line":
        out = 0.5 * np.exp(-np.abs(x))
    else:
        y = np.mod(x, period)
        out = np.cosh(0.5 * period - y) / (2.0 * np.sinh(0.5 * period))
    return out if out.ndim else float(out)


def helmholtz_array(m: np.ndarray, grid: GridSpec) -> np.ndarray:
    xi = wavenumbers(grid)
    return np.fft.irfft(np.fft.rfft(m) / (1.0 + xi * xi), n=grid.n)


def helmholtz_solve(m: Field) -> Field:
    """u = (1 - d^2/dx^2)^{-1} m via the multiplier 1/(1 + xi^2)"""
    _check_finite(m.values)
    return Field(grid=m.grid, values=helmholtz_array(m.values, m.grid), role="u")


def momentum_array(u: np.ndarray, grid: GridSpec) -> np.ndarray:
    """m = u - u_xx spectrally (exact inverse of helmholtz_array)"""
    xi = wavenumbers(grid)
    return np.fft.irfft(np.fft.rfft(u) * (1.0 + xi * xi), n=grid.n)


def momentum(u: Field) -> Field:
    return Field(grid=u.grid, values=momentum_array(u.values, u.grid), role="m")


def _oneside_spectral(f: np.ndarray, grid: GridSpec, side: Side) -> np.ndarray:
    xi = wavenumbers(grid)
    sign = 1.0 if side == "plus" else -1.0
    mult = 0.5 / (1.0 + sign * 1j * xi)
    return np.fft.irfft(np.fft.rfft(f) * mult, n=grid.n)


def _oneside_quadrature(f: np.ndarray, grid: GridSpec, side: Side) -> np.ndarray:
    # a_j = e^{-h} a_{j-1} + (h/4)(f_j + e^{-h} f_{j-1}) with a_{-1} = a_{n-1}
    h, n = grid.h, grid.n
    decay = np.exp(-h)
    src = f if side == "plus" else f[::-1]
    b = 0.25 * h * (src + decay * np.roll(src, 1))
    zero_start = lfilter([1.0], [1.0, -decay], b)
    wrap = zero_start[-1] / (1.0 - decay ** n)
    swept = zero_start + decay ** (np.arange(n) + 1.0) * wrap
    return swept if side == "plus" else swept[::-1]


def oneside_convolve(m: Field, side: Side, method: Literal["spectral", "quadrature"] = "spectral") -> Field:
    """One-sided convolution p_plus * m or p_minus * m

    p_plus * f(x) = 1/2 int_{y<x} e^{-(x-y)} f(y) dy solves a' + a = f/2, so on the periodic box
    it is the multiplier 1/(2(1 + i xi)); p_minus is its mirror image. The quadrature method is
    the O(n) trapezoid recurrence of the causal integral (second order in h).
    """
    _check_finite(m.values)
    if method == "spectral":
        out = _oneside_spectral(m.values, m.grid, side)
    else:
        out = _oneside_quadrature(m.values, m.grid, side)
    return Field(grid=m.grid, values=out, role="generic")


# ============================================================
# Derivatives and norms
# ============================================================

def derivative_array(f: np.ndarray, grid: GridSpec, order: int = 1) -> np.ndarray:
    xi = wavenumbers(grid)
    if order == 1:
        mult = derivative_multiplier(grid)
    else:
        mult = (1j * xi) ** order
        if order % 2:
            mult[-1] = 0.0
    return np.fft.irfft(np.fft.rfft(f) * mult, n=grid.n)


def spectral_derivative(f: Field, order: int = 1) -> Field:
    """Fourier-multiplier derivative; exact on band-limited data"""
    role = "u_x" if (f.role == "u" and order == 1) else "generic"
    return Field(grid=f.grid, values=derivative_array(f.values, f.grid, order), role=role)


def sobolev_norm(f: Union[Field, np.ndarray], s: float, grid: GridSpec = None) -> float:
    """H^s norm with Parseval normalization (s=0 is the L2 integral norm)

    The Nyquist mode carries weight 1, matching the zeroed derivative multiplier.
    """
    if s < 0:
        raise ValueError("Sobolev index s must be non-negative")
    if isinstance(f, Field):
        values, grid = f.values, f.grid
    else:
        values = np.asarray(f, dtype=float)
    coeffs = np.fft.fft(values) / grid.n
    xi = 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.h)
    xi[grid.n // 2] = 0.0
    weight = (1.0 + xi * xi) ** s
    return float(np.sqrt(grid.period * np.sum(weight * np.abs(coeffs) ** 2)))


def spectral_interpolate(f: Union[Field, np.ndarray], points, derivative: int = 0, grid: GridSpec = None) -> np.ndarray:
    """Evaluate the trigonometric interpolant of f (or its derivative) at arbitrary points"""
    if isinstance(f, Field):
        values, grid = f.values, f.grid
    else:
        values = np.asarray(f, dtype=float)
    pts = np.atleast_1d(np.asarray(points, dtype=float)) - grid.origin
    n = grid.n
    coeffs = np.fft.rfft(values) / n
    xi = wavenumbers(grid)

    weights = np.full(xi.shape, 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0
    mult = (1j * xi) ** derivative
    if derivative % 2:
        mult[-1] = 0.0

    phase = np.exp(1j * np.outer(pts, xi[:-1]))
    out = np.real(phase @ (weights[:-1] * mult[:-1] * coeffs[:-1]))
    # Nyquist mode as a real cosine
    nyq = np.real(coeffs[-1] * mult[-1]) * np.cos(xi[-1] * pts)
    return out + nyq


def line_box_halfwidth(amplitude: float, tol: float = 1e-12, decay_rate: float = 1.0) -> float:
    """Half-width L at which amplitude * exp(-decay_rate * L) drops below tol"""
    amplitude = max(abs(amplitude), tol)
    return float(np.log(amplitude / tol) / decay_rate)
