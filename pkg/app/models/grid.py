"""Uniform quadrature grid on [-pi, pi) and FFT-based Fourier transforms"""
from typing import Iterable, Union

import numpy as np

DEFAULT_GRID = 4096

LagsLike = Union[Iterable[int], np.ndarray]


def frequency_grid(grid: int = DEFAULT_GRID) -> np.ndarray:
    return -np.pi + 2.0 * np.pi * np.arange(grid) / grid


def _alternating_sign(lags: np.ndarray) -> np.ndarray:
    return np.where(lags % 2 == 0, 1.0, -1.0)


def fourier_coefficients(values: np.ndarray, lags: LagsLike) -> np.ndarray:
    """Coefficients (1/G) sum v(lambda) exp(-i m lambda) for each m in ``lags``"""
    values = np.asarray(values)
    grid = values.shape[-1]
    lags = np.asarray(list(lags) if not isinstance(lags, np.ndarray) else lags, dtype=int)
    spectrum = np.fft.fft(values, axis=-1) / grid
    return spectrum[..., lags % grid] * _alternating_sign(lags)


def trig_polynomial(lags: LagsLike, coeffs: np.ndarray, grid: int = DEFAULT_GRID) -> np.ndarray:
    """Evaluate sum_m coeffs[m] exp(i m lambda) on the grid.

    Lags must be distinct modulo ``grid`` for the result to be exact.
    """
    lags = np.asarray(list(lags) if not isinstance(lags, np.ndarray) else lags, dtype=int)
    coeffs = np.asarray(coeffs, dtype=complex)
    folded = np.zeros(grid, dtype=complex)
    np.add.at(folded, lags % grid, coeffs * _alternating_sign(lags))
    return np.fft.ifft(folded) * grid


def periodic_resample(values: np.ndarray, grid: int) -> np.ndarray:
    """Linear interpolation of a periodic table onto another uniform grid"""
    values = np.asarray(values, dtype=float)
    if values.size == grid:
        return values.copy()
    source = frequency_grid(values.size)
    return np.interp(frequency_grid(grid), source, values, period=2.0 * np.pi)


def next_power_of_two(n: int) -> int:
    return 1 << max(int(n) - 1, 0).bit_length()
