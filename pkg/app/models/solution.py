from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from models.density import complex_to_dict
from models.grid import frequency_grid
from models.pattern import ObservationPattern


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Hermitian matrix B[u][v] = b(t_u - t_v) over the canonical order of K"""
    matrix: np.ndarray
    indices: np.ndarray

    @property
    def size(self) -> int:
        return int(self.indices.size)

    def block(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        position = {int(t): k for k, t in enumerate(self.indices)}
        r = [position[int(t)] for t in rows]
        c = [position[int(t)] for t in cols]
        return self.matrix[np.ix_(r, c)]


@dataclass(eq=False)
class InterpolationSolution:
    """Optimal estimate of A xi from the observed values, in spectral form"""
    pattern: ObservationPattern
    indices: np.ndarray
    c: np.ndarray
    a: np.ndarray
    h_grid: np.ndarray
    h_coeffs: np.ndarray
    h_window: int
    delta: float
    grid: int

    def coefficient(self, j: int) -> complex:
        """c(j) for j in the truncated K"""
        hits = np.nonzero(self.indices == j)[0]
        if hits.size == 0:
            raise KeyError(f"{j} is not a missing index")
        return complex(self.c[hits[0]])

    def characteristic_coefficient(self, j: int) -> complex:
        """Fourier coefficient h^(j) = (1/2pi) int h(lambda) e^{-ij lambda} d lambda"""
        if abs(j) > self.h_window:
            return 0j
        return complex(self.h_coeffs[j + self.h_window])

    def characteristic_lags(self) -> np.ndarray:
        return np.arange(-self.h_window, self.h_window + 1)

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern.to_dict(),
            "grid": self.grid,
            "delta": self.delta,
            "c": [{"index": int(j), **complex_to_dict(v)} for j, v in zip(self.indices, self.c)],
        }

    def grid_rows(self) -> List[tuple]:
        """(lambda, Re h, Im h) rows for CSV export"""
        lam = frequency_grid(self.grid)
        return [(float(x), float(h.real), float(h.imag)) for x, h in zip(lam, self.h_grid)]


@dataclass
class ConvergenceReport:
    truncations: List[int] = field(default_factory=list)
    deltas: List[float] = field(default_factory=list)
    tail_bounds: List[float] = field(default_factory=list)
    converged: bool = False
    relative_change: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "truncations": list(self.truncations),
            "deltas": list(self.deltas),
            "tail_bounds": list(self.tail_bounds),
            "converged": self.converged,
            "relative_change": self.relative_change,
        }
