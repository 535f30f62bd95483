import hashlib
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from models.coefficients import FourierCoeffs
from models.enums import DensityKind
from models.grid import DEFAULT_GRID, periodic_resample, trig_polynomial


def parse_complex(value: Any) -> complex:
    """Accept plain numbers, [re, im] pairs and {"re": .., "im": ..} objects"""
    if isinstance(value, dict):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"Complex pair must have two entries, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, bool):
        raise ValueError("Boolean is not a number")
    return complex(value)


def complex_to_dict(value: complex) -> Dict[str, float]:
    return {"re": float(np.real(value)), "im": float(np.imag(value))}


class SpectralDensity:
    """Base class for the three density representations"""
    kind: DensityKind

    def values(self, grid: int = DEFAULT_GRID) -> np.ndarray:
        raise NotImplementedError

    def inverse_values(self, grid: int = DEFAULT_GRID) -> np.ndarray:
        return 1.0 / self.values(grid)

    def exact_inverse_coeffs(self) -> Optional[Dict[int, complex]]:
        """Finite Fourier expansion of 1/f when one is known in closed form"""
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _fingerprint_parts(self) -> Tuple[bytes, ...]:
        raise NotImplementedError

    def fingerprint(self) -> str:
        digest = hashlib.md5(self.kind.value.encode())
        for part in self._fingerprint_parts():
            digest.update(part)
        return digest.hexdigest()


@dataclass(frozen=True, eq=False)
class RationalAR(SpectralDensity):
    """f = sigma2 / |1 - sum_k alpha_k exp(-ik lambda)|^2"""
    alpha: Tuple[complex, ...] = ()
    sigma2: float = 1.0
    kind = DensityKind.RATIONAL_AR

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(complex(a) for a in self.alpha))
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def order(self) -> int:
        return len(self.alpha)

    @property
    def is_real(self) -> bool:
        return all(a.imag == 0.0 for a in self.alpha)

    def _transfer(self, grid: int) -> np.ndarray:
        phi = np.concatenate([[1.0 + 0j], -np.asarray(self.alpha, dtype=complex)])
        return trig_polynomial(-np.arange(phi.size), phi, grid)

    def values(self, grid: int = DEFAULT_GRID) -> np.ndarray:
        return self.sigma2 / np.abs(self._transfer(grid)) ** 2

    def inverse_values(self, grid: int = DEFAULT_GRID) -> np.ndarray:
        return np.abs(self._transfer(grid)) ** 2 / self.sigma2

    def exact_inverse_coeffs(self) -> Dict[int, complex]:
        # 1/f = |phi|^2 / sigma2, so b(m) = sum_n phi_n conj(phi_{n+m}) / sigma2
        phi = np.concatenate([[1.0 + 0j], -np.asarray(self.alpha, dtype=complex)])
        order = phi.size - 1
        coeffs = {}
        for m in range(-order, order + 1):
            total = 0j
            for n in range(phi.size):
                k = n + m
                if 0 <= k < phi.size:
                    total += phi[n] * np.conj(phi[k])
            coeffs[m] = total / self.sigma2
        return coeffs

    def to_dict(self) -> dict:
        return {
            "type": self.kind.value,
            "alpha": [complex_to_dict(a) if a.imag else a.real for a in self.alpha],
            "sigma2": self.sigma2,
        }

    def _fingerprint_parts(self):
        return (np.asarray(self.alpha, dtype=complex).tobytes(), np.float64(self.sigma2).tobytes())


@dataclass(frozen=True, eq=False)
class InversePolynomial(SpectralDensity):
    """f = 1 / sum_{|m|<=L} b(m) exp(i m lambda) with b Hermitian"""
    coeffs: FourierCoeffs = None
    kind = DensityKind.INVERSE_POLY

    def __post_init__(self):
        if self.coeffs is None:
            raise ValueError("InversePolynomial needs coefficients")
        object.__setattr__(self, "coeffs", self.coeffs.hermitian())

    def inverse_values(self, grid: int = DEFAULT_GRID) -> np.ndarray:
        return self.coeffs.trig_values(grid)

    def values(self, grid: int = DEFAULT_GRID) -> np.ndarray:
        return 1.0 / self.inverse_values(grid)

    def exact_inverse_coeffs(self) -> Dict[int, complex]:
        return {int(m): complex(v) for m, v in zip(self.coeffs.lags, self.coeffs.values)}

    def to_dict(self) -> dict:
        return {"type": self.kind.value, "coeffs": self.coeffs.to_dict()}

    def _fingerprint_parts(self):
        return (self.coeffs.values.tobytes(),)


@dataclass(frozen=True, eq=False)
class Tabulated(SpectralDensity):
    """Density values on the uniform grid of size len(table)"""
    table: np.ndarray = None
    kind = DensityKind.TABULATED

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        if table.ndim != 1 or table.size < 2:
            raise ValueError("Tabulated density needs a 1-D table with at least two values")
        object.__setattr__(self, "table", table)

    @property
    def grid(self) -> int:
        return int(self.table.size)

    def values(self, grid: int = DEFAULT_GRID) -> np.ndarray:
        return periodic_resample(self.table, grid)

    def to_dict(self) -> dict:
        return {"type": self.kind.value, "values": self.table.tolist()}

    def _fingerprint_parts(self):
        return (self.table.tobytes(),)


def _coeff_mapping(raw: Mapping[str, Any]) -> Dict[int, complex]:
    return {int(lag): parse_complex(value) for lag, value in raw.items()}


def density_from_dict(data: dict) -> SpectralDensity:
    """function to create the appropriate density representation from JSON"""
    kind = DensityKind(data["type"])

    if kind == DensityKind.RATIONAL_AR:
        alpha = tuple(parse_complex(a) for a in data.get("alpha", []))
        return RationalAR(alpha, float(data.get("sigma2", 1.0)))
    elif kind == DensityKind.INVERSE_POLY:
        return InversePolynomial(FourierCoeffs.from_mapping(_coeff_mapping(data["coeffs"])))
    elif kind == DensityKind.TABULATED:
        return Tabulated(np.asarray(data["values"], dtype=float))
    else:
        raise ValueError(f"Unknown density type: {kind}")
