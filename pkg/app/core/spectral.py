"""Fourier analysis of spectral densities and their inverses"""
import logging
from typing import Iterable

import numpy as np

from models.coefficients import Factorization, FourierCoeffs
from models.density import SpectralDensity
from models.errors import (FactorizationInaccurate, InvalidParameters, MaskViolation,
                           NonPositiveDensity, NotPositive, TruncationTooShort)
from models.grid import DEFAULT_GRID, fourier_coefficients, trig_polynomial

logger = logging.getLogger(__name__)

DEFAULT_HALF_LENGTH = 256
POSITIVITY_TOL = 1e-9
TAIL_TOL = 1e-10
MASK_TOL = 1e-8
RECONSTRUCTION_TOL = 1e-8
ROOT_PAIR_TOL = 1e-8


def check_positive(f: SpectralDensity, grid: int = DEFAULT_GRID) -> np.ndarray:
    """Density values on the grid; raises NonPositiveDensity below the relative floor"""
    values = f.values(grid)
    if not np.all(np.isfinite(values)):
        raise NonPositiveDensity("Density is not finite on the grid")
    peak = float(np.max(np.abs(values)))
    low = float(np.min(values))
    if peak == 0.0 or low <= POSITIVITY_TOL * peak:
        raise NonPositiveDensity(f"Density minimum {low:.3e} is not positive (max {peak:.3e})",
                                 minimum=low, maximum=peak)
    return values


def inverse_fourier_coeffs(f: SpectralDensity, half_length: int = DEFAULT_HALF_LENGTH,
                           grid: int = DEFAULT_GRID, check_tail: bool = True) -> FourierCoeffs:
    """Fourier coefficients b(m), |m| <= L, of 1/f"""
    if half_length < 0 or grid < 4 * half_length:
        raise InvalidParameters(f"Grid {grid} must be at least four times the half-length {half_length}")
    check_positive(f, grid)

    exact = f.exact_inverse_coeffs()
    if exact is not None:
        extent = max((abs(m) for m, v in exact.items() if v != 0), default=0)
        if check_tail and extent > half_length:
            raise TruncationTooShort(
                f"1/f has {extent} lags, more than the half-length {half_length}", extent=extent)
        trimmed = {m: v for m, v in exact.items() if abs(m) <= half_length}
        return FourierCoeffs.from_mapping(trimmed, half_length).hermitian()

    lags = np.arange(-half_length, half_length + 1)
    coeffs = FourierCoeffs(fourier_coefficients(f.inverse_values(grid), lags)).hermitian()
    if check_tail:
        edge = max(abs(coeffs[half_length]), abs(coeffs[-half_length]))
        ratio = edge / abs(coeffs[0])
        if ratio >= TAIL_TOL:
            raise TruncationTooShort(
                f"|b(L)|/|b(0)| = {ratio:.3e} at L={half_length}", ratio=ratio, half_length=half_length)
    return coeffs


def minimality_value(f: SpectralDensity, grid: int = DEFAULT_GRID) -> float:
    """(1/2pi) int 1/f; a finite positive value means the process is minimal"""
    check_positive(f, grid)
    exact = f.exact_inverse_coeffs()
    if exact is not None:
        return float(np.real(exact.get(0, 0.0)))
    return float(np.mean(f.inverse_values(grid)))


def covariances(f: SpectralDensity, max_lag: int, grid: int = DEFAULT_GRID) -> np.ndarray:
    """r(0..max_lag) with r(n) = (1/2pi) int e^{in lambda} f(lambda) d lambda"""
    if max_lag < 0 or grid < 4 * max_lag:
        raise InvalidParameters(f"Grid {grid} too small for lag {max_lag}")
    values = check_positive(f, grid)
    return fourier_coefficients(values.astype(complex), -np.arange(max_lag + 1))


def covariance(f: SpectralDensity, n: int, grid: int = DEFAULT_GRID) -> complex:
    if abs(n) > grid // 4:
        raise InvalidParameters(f"|n|={abs(n)} exceeds grid/4 = {grid // 4}")
    r = covariances(f, abs(n), grid)[abs(n)]
    return complex(r if n >= 0 else np.conj(r))


def factorize_inverse(b: FourierCoeffs, mask: Iterable[int] = ()) -> Factorization:
    """Outer factor gamma of the positive trigonometric polynomial with coefficients b.

    Roots of z^L * sum_m b(m) z^m come in pairs (r, 1/conj r); gamma collects
    the ones inside the unit circle and is scaled to reproduce b(0).
    """
    mask = frozenset(int(n) for n in mask)
    degree = b.effective_half_length()
    grid = max(DEFAULT_GRID, 8 * degree)
    values = b.trig_values(grid)
    peak = float(np.max(np.abs(values)))
    if peak == 0.0 or values.min() <= POSITIVITY_TOL * peak:
        raise NotPositive(f"Trigonometric polynomial minimum {values.min():.3e} is not positive",
                          minimum=float(values.min()))

    if degree == 0:
        gamma = np.array([np.sqrt(b[0].real)], dtype=complex)
    else:
        poly = np.array([b[m] for m in range(degree, -degree - 1, -1)], dtype=complex)
        roots = np.roots(poly)
        inside = roots[np.abs(roots) < 1.0]
        if inside.size != degree or np.any(np.abs(np.abs(roots) - 1.0) < ROOT_PAIR_TOL):
            raise NotPositive(f"Expected {degree} roots inside the unit circle, found {inside.size}")
        # np.poly gives prod (x - r_k) highest power first, i.e. gamma_0..gamma_L up to scale
        gamma = np.poly(inside).astype(complex)
        lags = -np.arange(gamma.size)
        outer = np.abs(trig_polynomial(lags, gamma, grid)) ** 2
        gamma *= np.sqrt(np.mean(values) / np.mean(outer))

    factor = Factorization(gamma, mask)
    error = float(np.max(np.abs(np.abs(factor.values(grid)) ** 2 - values)) / peak)
    if error > RECONSTRUCTION_TOL:
        raise FactorizationInaccurate(f"Factor reproduces 1/f only to {error:.3e}", error=error)
    factor = Factorization(gamma, mask, error)

    violated = [n for n in sorted(mask) if n <= factor.degree and abs(gamma[n]) > MASK_TOL]
    if violated:
        raise MaskViolation(f"gamma_n nonzero at masked positions {violated}",
                            positions=violated, magnitudes=[float(abs(gamma[n])) for n in violated])
    return factor
