"""Euclidean projections of grid values g = 1/f onto the uncertainty classes"""
import logging
from typing import Optional

import numpy as np

from models.errors import InfeasibleClass, InvalidParameters
from models.grid import frequency_grid
from models.uncertainty import D0Minus, DensityClass, DVU, DW

logger = logging.getLogger(__name__)

BISECTION_STEPS = 200
DYKSTRA_STEPS = 500


def shift_to_mean(y: np.ndarray, lo: np.ndarray, hi: np.ndarray, target: float) -> np.ndarray:
    """clip(y + mu, lo, hi) with the scalar mu chosen so the mean equals ``target``"""
    def mean_at(mu):
        return float(np.mean(np.clip(y + mu, lo, hi)))

    finite_lo = np.where(np.isfinite(lo), lo, np.min(y))
    finite_hi = np.where(np.isfinite(hi), hi, np.max(y) + abs(target) + 1.0)
    left = float(np.min(finite_lo - y)) - 1.0
    right = float(np.max(finite_hi - y)) + abs(target) + 1.0
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (left + right)
        if mean_at(mid) < target:
            left = mid
        else:
            right = mid
        if right - left <= 1e-15 * max(1.0, abs(right)):
            break

    # the mean is linear in mu between breakpoints; solve exactly on the final bracket
    shifted = y + right
    free = (shifted > lo) & (shifted < hi)
    if np.any(free):
        clipped_sum = float(np.sum(np.clip(shifted, lo, hi)[~free]))
        mu = (target * y.size - clipped_sum - float(np.sum(y[free]))) / int(np.sum(free))
        candidate = np.clip(y + mu, lo, hi)
        if abs(float(np.mean(candidate)) - target) <= abs(mean_at(right) - target):
            return candidate
    return np.clip(shifted, lo, hi)


class Projection:
    grid: int

    def project(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def extreme_point(self, direction: np.ndarray) -> Optional[np.ndarray]:
        """Maximiser of <direction, g> over the set, or None when there is no closed form"""
        return None

    def start(self) -> np.ndarray:
        raise NotImplementedError


class MeanFloorProjection(Projection):
    """{g >= floor, mean(g) >= p}"""

    def __init__(self, p: float, grid: int, floor_ratio: float):
        self.p = p
        self.grid = grid
        self.floor = floor_ratio * p

    def project(self, y: np.ndarray) -> np.ndarray:
        floored = np.maximum(y, self.floor)
        if np.mean(floored) >= self.p:
            return floored
        lo = np.full(self.grid, self.floor)
        hi = np.full(self.grid, np.inf)
        return shift_to_mean(y, lo, hi, self.p)

    def extreme_point(self, direction: np.ndarray) -> Optional[np.ndarray]:
        # unbounded along any positive component
        if np.max(direction) > 0:
            return None
        vertex = np.full(self.grid, self.floor)
        vertex[int(np.argmax(direction))] += self.grid * (self.p - self.floor)
        return vertex

    def start(self) -> np.ndarray:
        return np.full(self.grid, self.p)


class MomentProjection(Projection):
    """Fixes the Fourier coefficients of g at lags |n| <= W; sine moments are zero"""

    def __init__(self, b: tuple, grid: int, floor_ratio: float):
        if 2 * len(b) >= grid:
            raise InvalidParameters(f"Grid {grid} too coarse for W={len(b) - 1}")
        self.grid = grid
        self.floor = floor_ratio * b[0]
        lam = frequency_grid(grid)
        rows = [np.ones(grid)]
        targets = [b[0]]
        for n in range(1, len(b)):
            rows.append(np.cos(n * lam))
            targets.append(b[n])
            rows.append(np.sin(n * lam))
            targets.append(0.0)
        self.basis = np.array(rows)
        self.norms = np.mean(self.basis ** 2, axis=1)
        self.targets = np.array(targets)
        self.b = b

    def affine(self, y: np.ndarray) -> np.ndarray:
        moments = self.basis @ y / self.grid
        return y + ((self.targets - moments) / self.norms) @ self.basis

    def project(self, y: np.ndarray) -> np.ndarray:
        x = self.affine(y)
        if x.min() >= self.floor:
            return x
        # Dykstra's alternating projections onto the affine set and the floor
        x = y.copy()
        p_aff = np.zeros_like(y)
        q_box = np.zeros_like(y)
        z = x
        for _ in range(DYKSTRA_STEPS):
            z = self.affine(x + p_aff)
            p_aff = x + p_aff - z
            new_x = np.maximum(z + q_box, self.floor)
            q_box = z + q_box - new_x
            if np.max(np.abs(new_x - x)) <= 1e-13 * max(1.0, np.max(np.abs(x))):
                x = new_x
                break
            x = new_x
        return z

    def start(self) -> np.ndarray:
        lam = frequency_grid(self.grid)
        values = np.full(self.grid, self.b[0])
        for n in range(1, len(self.b)):
            values = values + 2.0 * self.b[n] * np.cos(n * lam)
        return values


class BoxMeanProjection(Projection):
    """{lo <= g <= hi, mean(g) = p}"""

    def __init__(self, lo: np.ndarray, hi: np.ndarray, p: float):
        self.lo = lo
        self.hi = hi
        self.p = p
        self.grid = lo.size
        tol = 1e-9 * max(1.0, abs(p))
        if np.mean(lo) > p + tol or np.mean(hi) < p - tol:
            raise InfeasibleClass(
                f"No grid density has mean of 1/f equal to {p}: attainable [{np.mean(lo):.6g}, {np.mean(hi):.6g}]")

    def project(self, y: np.ndarray) -> np.ndarray:
        if np.all(self.lo == self.hi):
            return self.lo.copy()
        return shift_to_mean(y, self.lo, self.hi, self.p)

    def extreme_point(self, direction: np.ndarray) -> Optional[np.ndarray]:
        """Fills the room above lo in decreasing order of direction until the mean reaches p"""
        order = np.argsort(-direction, kind="stable")
        room = (self.hi - self.lo)[order]
        budget = self.grid * self.p - float(np.sum(self.lo))
        before = np.cumsum(room) - room
        vertex = self.lo.copy()
        vertex[order] += np.clip(budget - before, 0.0, room)
        return vertex

    def start(self) -> np.ndarray:
        return self.project(0.5 * (self.lo + self.hi))


def make_projection(cls: DensityClass, grid: int, floor_ratio: float = 1e-3) -> Projection:
    if isinstance(cls, D0Minus):
        return MeanFloorProjection(cls.p, grid, floor_ratio)
    elif isinstance(cls, DW):
        return MomentProjection(cls.b, grid, floor_ratio)
    elif isinstance(cls, DVU):
        lower, upper = cls.bounds(grid)
        return BoxMeanProjection(1.0 / upper, 1.0 / lower, cls.p)
    else:
        raise ValueError(f"Unknown class: {cls!r}")
