from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from models.coefficients import FourierCoeffs
from models.density import SpectralDensity, density_from_dict
from models.enums import ClassKind, Mechanism
from models.errors import InvalidParameters
from models.grid import DEFAULT_GRID, frequency_grid

POSITIVITY_TOL = 1e-9


class DensityClass:
    kind: ClassKind

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class D0Minus(DensityClass):
    """Densities whose inverse has mean at least p"""
    p: float
    kind = ClassKind.D0_MINUS

    def __post_init__(self):
        if not self.p > 0:
            raise InvalidParameters(f"D0- level p must be positive, got {self.p}")

    def to_dict(self) -> dict:
        return {"type": self.kind.value, "p": self.p}


@dataclass(frozen=True)
class DW(DensityClass):
    """Densities whose inverse has the Fourier coefficients b(0..W) fixed"""
    b: Tuple[float, ...]
    kind = ClassKind.DW

    def __post_init__(self):
        b = tuple(float(x) for x in self.b)
        object.__setattr__(self, "b", b)
        if not b or b[0] <= 0:
            raise InvalidParameters("D_W needs b(0) > 0")
        values = self.coefficients().trig_values(DEFAULT_GRID)
        if values.min() <= POSITIVITY_TOL * abs(values).max():
            raise InvalidParameters(
                f"D_W moments are not strictly positive: min of trig polynomial {values.min():.3e}")

    @property
    def W(self) -> int:
        return len(self.b) - 1

    def coefficients(self) -> FourierCoeffs:
        return FourierCoeffs.from_mapping({n: self.b[n] for n in range(len(self.b))})

    def to_dict(self) -> dict:
        return {"type": self.kind.value, "b": list(self.b)}


@dataclass(frozen=True, eq=False)
class DVU(DensityClass):
    """Densities between v and u whose inverse has mean exactly p"""
    v: SpectralDensity
    u: SpectralDensity
    p: float
    kind = ClassKind.DVU

    def __post_init__(self):
        lower, upper = self.bounds(DEFAULT_GRID)
        if np.any(lower > upper * (1 + POSITIVITY_TOL)):
            raise InvalidParameters("D_v^u needs v <= u on the whole grid")
        inv_mean_u = float(np.mean(1.0 / upper))
        inv_mean_v = float(np.mean(1.0 / lower))
        tol = POSITIVITY_TOL * max(abs(self.p), 1.0)
        if not inv_mean_u - tol <= self.p <= inv_mean_v + tol:
            raise InvalidParameters(
                f"D_v^u level p={self.p} outside [{inv_mean_u:.6g}, {inv_mean_v:.6g}]")

    def bounds(self, grid: int) -> Tuple[np.ndarray, np.ndarray]:
        return self.v.values(grid), self.u.values(grid)

    def contains(self, values: np.ndarray, rel_tol: float = POSITIVITY_TOL) -> bool:
        lower, upper = self.bounds(values.size)
        return bool(np.all(values >= lower * (1 - rel_tol)) and np.all(values <= upper * (1 + rel_tol)))

    def to_dict(self) -> dict:
        return {"type": self.kind.value, "v": self.v.to_dict(), "u": self.u.to_dict(), "p": self.p}


def class_from_dict(data: dict) -> DensityClass:
    kind = ClassKind(data["type"])

    if kind == ClassKind.D0_MINUS:
        return D0Minus(float(data["p"]))
    elif kind == ClassKind.DW:
        return DW(tuple(float(x) for x in data["b"]))
    elif kind == ClassKind.DVU:
        return DVU(density_from_dict(data["v"]), density_from_dict(data["u"]), float(data["p"]))
    else:
        raise ValueError(f"Unknown class type: {kind}")


@dataclass
class Validity:
    closed_form_applicable: bool
    positivity_ok: bool
    factorization_ok: bool
    bounds_ok: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "closed_form_applicable": self.closed_form_applicable,
            "positivity_ok": self.positivity_ok,
            "factorization_ok": self.factorization_ok,
            "bounds_ok": self.bounds_ok,
        }


@dataclass(eq=False)
class LeastFavourableResult:
    class_kind: ClassKind
    mechanism: Mechanism
    f0: Optional[SpectralDensity]
    b0: FourierCoeffs
    h0_grid: np.ndarray
    delta0: float
    validity: Validity
    grid: int
    lagrange: Dict[str, Any] = field(default_factory=dict)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "class": self.class_kind.value,
            "mechanism": self.mechanism.value,
            "grid": self.grid,
            "delta0": self.delta0,
            "validity": self.validity.to_dict(),
            "b0": self.b0.to_dict(),
            "lagrange": self.lagrange,
            "diagnostics": self.diagnostics,
        }

    def grid_rows(self) -> List[tuple]:
        """(lambda, f0, Re h0, Im h0) rows; f0 is blank where 1/f0 is not positive"""
        lam = frequency_grid(self.grid)
        inverse = self.b0.trig_values(self.grid) if self.f0 is None else self.f0.inverse_values(self.grid)
        rows = []
        for x, g, h in zip(lam, inverse, self.h0_grid):
            density = float(1.0 / g) if g > 0 else float("nan")
            rows.append((float(x), density, float(h.real), float(h.imag)))
        return rows


@dataclass
class SaddleReport:
    n_samples: int
    worst_case_pass: int = 0
    worst_case_fail: int = 0
    max_excess: float = 0.0
    optimality_pass: int = 0
    optimality_fail: int = 0
    max_deficit: float = 0.0

    @property
    def passed(self) -> bool:
        return self.worst_case_fail == 0 and self.optimality_fail == 0

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "worst_case": {"pass": self.worst_case_pass, "fail": self.worst_case_fail, "max_excess": self.max_excess},
            "optimality": {"pass": self.optimality_pass, "fail": self.optimality_fail, "max_deficit": self.max_deficit},
            "passed": self.passed,
        }
