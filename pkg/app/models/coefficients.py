from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Mapping

import numpy as np

from models.grid import DEFAULT_GRID, trig_polynomial


@dataclass(frozen=True, eq=False)
class FourierCoeffs:
    """Hermitian sequence b(-L..L) stored as an array indexed by m + L"""
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 1 or values.size % 2 != 1:
            raise ValueError("Fourier coefficients need an odd-length 1-D array")
        object.__setattr__(self, "values", values)

    @property
    def half_length(self) -> int:
        return (self.values.size - 1) // 2

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-self.half_length, self.half_length + 1)

    def __getitem__(self, lag: int) -> complex:
        if abs(lag) > self.half_length:
            return 0j
        return complex(self.values[lag + self.half_length])

    def at(self, lags: np.ndarray) -> np.ndarray:
        """Vectorised lookup; callers check the range"""
        return self.values[np.asarray(lags) + self.half_length]

    @classmethod
    def from_mapping(cls, coeffs: Mapping[int, complex], half_length: int = None) -> "FourierCoeffs":
        """Build from {lag: value}; missing negative lags are filled by conjugation"""
        extent = max((abs(int(m)) for m in coeffs), default=0)
        half = extent if half_length is None else half_length
        if half < extent:
            raise ValueError(f"half_length {half} shorter than largest lag {extent}")
        values = np.zeros(2 * half + 1, dtype=complex)
        for lag, value in coeffs.items():
            values[int(lag) + half] = value
        for lag, value in coeffs.items():
            mirrored = -int(lag)
            if mirrored not in coeffs:
                values[mirrored + half] = np.conj(value)
        return cls(values)

    def hermitian(self) -> "FourierCoeffs":
        """Exact Hermitian symmetrisation b(m) <- (b(m) + conj b(-m)) / 2"""
        symmetric = 0.5 * (self.values + np.conj(self.values[::-1]))
        return FourierCoeffs(symmetric)

    def effective_half_length(self, rel_tol: float = 1e-14) -> int:
        """Largest lag whose coefficient is not negligible against b(0)"""
        scale = max(abs(self[0]), np.max(np.abs(self.values)))
        if scale == 0.0:
            return 0
        significant = np.nonzero(np.abs(self.values) > rel_tol * scale)[0]
        return int(np.max(np.abs(significant - self.half_length)))

    def trig_values(self, grid: int = DEFAULT_GRID) -> np.ndarray:
        """Real values of sum_m b(m) exp(i m lambda) on the grid"""
        return trig_polynomial(self.lags, self.values, grid).real

    def to_dict(self) -> Dict[str, Dict[str, float]]:
        return {str(int(m)): {"re": float(v.real), "im": float(v.imag)}
                for m, v in zip(self.lags, self.values)}


@dataclass(frozen=True, eq=False)
class Factorization:
    """Outer factor gamma with sum_{m} b(m) e^{im lambda} = |sum_n gamma_n e^{-in lambda}|^2"""
    gamma: np.ndarray
    mask: FrozenSet[int] = field(default_factory=frozenset)
    reconstruction_error: float = 0.0

    @property
    def degree(self) -> int:
        return int(self.gamma.size) - 1

    def values(self, grid: int = DEFAULT_GRID) -> np.ndarray:
        """Values of sum_n gamma_n exp(-i n lambda) on the grid"""
        lags = -np.arange(self.gamma.size)
        return trig_polynomial(lags, self.gamma, grid)

    def to_dict(self) -> dict:
        return {
            "gamma": [{"re": float(g.real), "im": float(g.imag)} for g in self.gamma],
            "mask": sorted(self.mask),
            "reconstruction_error": self.reconstruction_error,
        }
