"""Optimal linear interpolation of a stationary sequence over a gap set K"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from core.coeff_cache import CoefficientCache
from core.gram_builder import GramBuilder
from core.spectral import DEFAULT_HALF_LENGTH, check_positive, inverse_fourier_coeffs
from models.coefficients import FourierCoeffs
from models.density import SpectralDensity
from models.errors import GridMismatch, InvalidParameters, NotConverged, NotPositiveDefinite
from models.grid import DEFAULT_GRID, fourier_coefficients, next_power_of_two, trig_polynomial
from models.pattern import FunctionalWeights, ObservationPattern
from models.solution import ConvergenceReport, InterpolationSolution

logger = logging.getLogger(__name__)

DEFAULT_SCHEDULE = (25, 50, 100, 200, 400)
PLATEAU_TOL = 1e-8
IMAG_TOL = 1e-10
H_WINDOW_MARGIN = 64

shared_cache = CoefficientCache()


def solve_hermitian(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve B x = rhs for Hermitian positive-definite B.

    Cholesky first; when it breaks down on round-off an LDL^H factorisation
    decides whether B is still positive definite.
    """
    try:
        factor = linalg.cho_factor(matrix, lower=True)
        return linalg.cho_solve(factor, rhs)
    except linalg.LinAlgError:
        _, d, _ = linalg.ldl(matrix, lower=True, hermitian=True)
        eigenvalues = linalg.eigvalsh(d)
        if eigenvalues.min() <= 0:
            raise NotPositiveDefinite(
                f"Gram matrix is not positive definite (smallest pivot eigenvalue {eigenvalues.min():.3e})",
                smallest=float(eigenvalues.min()))
        logger.warning("Cholesky failed, solving through LDL^H (smallest pivot %.3e)", eigenvalues.min())
        return linalg.solve(matrix, rhs, assume_a="her")


class Interpolator:
    """Solves interpolation problems on a fixed quadrature grid"""

    def __init__(self, grid: int = DEFAULT_GRID, half_length: int = DEFAULT_HALF_LENGTH,
                 cache: Optional[CoefficientCache] = None):
        self.grid = grid
        self.half_length = half_length
        self.cache = cache if cache is not None else shared_cache
        self.gram_builder = GramBuilder()

    def gram_coefficients(self, f: SpectralDensity, half_length: int, grid: int) -> FourierCoeffs:
        """Coefficients of 1/f for Gram assembly; only the lags used matter, so no tail check"""
        cached = self.cache.get(f, half_length, grid)
        if cached is not None:
            return cached
        coeffs = inverse_fourier_coeffs(f, half_length, grid, check_tail=False)
        self.cache.put(f, half_length, grid, coeffs)
        return coeffs

    def working_grid(self, pattern: ObservationPattern) -> Tuple[int, int, int]:
        """(half_length, h_window, grid) large enough for the pattern"""
        indices = pattern.missing_indices()
        half = max(self.half_length, pattern.max_lag)
        grid = max(self.grid, next_power_of_two(4 * half))
        h_window = min(2 * int(np.max(np.abs(indices))) + H_WINDOW_MARGIN, grid // 2 - 1)
        return half, h_window, grid

    def solve(self, pattern: ObservationPattern, weights: FunctionalWeights,
              f: SpectralDensity) -> InterpolationSolution:
        a = weights.weight_vector(pattern)
        indices = pattern.missing_indices()
        half, h_window, grid = self.working_grid(pattern)
        if grid != self.grid:
            logger.debug("Grid enlarged from %d to %d for %s", self.grid, grid, pattern.kind.value)

        coeffs = self.gram_coefficients(f, half, grid)
        gram = self.gram_builder.build_gram(pattern, coeffs)
        c = solve_hermitian(gram.matrix, a)

        inner = np.vdot(a, c)
        if abs(inner.imag) > IMAG_TOL * max(1.0, abs(inner)):
            logger.warning("Delta has imaginary part %.3e", inner.imag)
        delta = float(inner.real)

        big_a = trig_polynomial(indices, a, grid)
        big_c = trig_polynomial(indices, c, grid)
        h_grid = big_a - big_c * f.inverse_values(grid)
        h_coeffs = fourier_coefficients(h_grid, np.arange(-h_window, h_window + 1))

        return InterpolationSolution(
            pattern=pattern,
            indices=indices,
            c=c,
            a=a,
            h_grid=h_grid,
            h_coeffs=h_coeffs,
            h_window=h_window,
            delta=delta,
            grid=grid,
        )

    def solve_truncated(self, pattern: ObservationPattern, weights: FunctionalWeights, f: SpectralDensity,
                        schedule: Sequence[int] = DEFAULT_SCHEDULE) -> Tuple[InterpolationSolution, ConvergenceReport]:
        """Solve along an increasing truncation schedule until Delta plateaus"""
        if not pattern.kind.is_infinite:
            raise InvalidParameters(f"{pattern.kind.value} is finite; use solve")
        schedule = list(schedule)
        if len(schedule) < 2 or any(t <= 0 for t in schedule) or schedule != sorted(set(schedule)):
            raise InvalidParameters(f"Truncation schedule must be increasing and positive: {schedule}")

        report = ConvergenceReport()
        solution = None
        for T in schedule:
            truncated = pattern.with_truncation(T)
            solution = self.solve(truncated, weights, f)
            report.truncations.append(T)
            report.deltas.append(solution.delta)
            report.tail_bounds.append(weights.tail_bound(truncated))
            logger.debug("T=%d delta=%.17g", T, solution.delta)

        last, previous = report.deltas[-1], report.deltas[-2]
        change = abs(last - previous)
        report.relative_change = change / abs(last) if last != 0 else change
        report.converged = report.relative_change < PLATEAU_TOL

        mass = float(np.linalg.norm(solution.a))
        if mass > 0 and report.tail_bounds[-1] >= 1e-10 * mass:
            logger.warning("Weights beyond T=%d carry %.3e of the l2 mass", schedule[-1],
                           report.tail_bounds[-1] / mass)
        if not report.converged:
            raise NotConverged(
                f"Delta did not plateau: relative change {report.relative_change:.3e} at T={schedule[-1]}",
                report=report.to_dict())
        logger.info("Truncation converged at T=%d, delta=%.12g", schedule[-1], last)
        return solution, report

    def mse_of_characteristic(self, h_grid: np.ndarray, pattern: ObservationPattern,
                              weights: FunctionalWeights, f: SpectralDensity,
                              grid: Optional[int] = None) -> float:
        """(1/2pi) int |A - h|^2 f for an arbitrary characteristic h on the grid"""
        size = int(np.asarray(h_grid).size)
        expected = self.grid if grid is None else grid
        if size != expected:
            raise GridMismatch(f"h is sampled on {size} points, grid is {expected}", size=size, grid=expected)
        values = check_positive(f, size)
        big_a = trig_polynomial(pattern.missing_indices(), weights.weight_vector(pattern), size)
        return float(np.mean(np.abs(big_a - h_grid) ** 2 * values))

    def solve_many(self, pattern: ObservationPattern, weights: FunctionalWeights,
                   densities: Sequence[SpectralDensity], max_workers: Optional[int] = None) -> List[InterpolationSolution]:
        """Solve one problem under each density of a family, in input order"""
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(lambda f: self.solve(pattern, weights, f), densities))


def solve(pattern: ObservationPattern, weights: FunctionalWeights, f: SpectralDensity,
          grid: int = DEFAULT_GRID, half_length: int = DEFAULT_HALF_LENGTH) -> InterpolationSolution:
    return Interpolator(grid, half_length).solve(pattern, weights, f)


def solve_truncated(pattern: ObservationPattern, weights: FunctionalWeights, f: SpectralDensity,
                    schedule: Sequence[int] = DEFAULT_SCHEDULE,
                    grid: int = DEFAULT_GRID) -> Tuple[InterpolationSolution, ConvergenceReport]:
    return Interpolator(grid).solve_truncated(pattern, weights, f, schedule)


def mse_of_characteristic(h_grid: np.ndarray, pattern: ObservationPattern, weights: FunctionalWeights,
                          f: SpectralDensity, grid: Optional[int] = None) -> float:
    size = int(np.asarray(h_grid).size) if grid is None else grid
    return Interpolator(size).mse_of_characteristic(h_grid, pattern, weights, f, grid)


def solve_many(pattern: ObservationPattern, weights: FunctionalWeights, densities: Sequence[SpectralDensity],
               grid: int = DEFAULT_GRID, max_workers: Optional[int] = None) -> List[InterpolationSolution]:
    return Interpolator(grid).solve_many(pattern, weights, densities, max_workers)
