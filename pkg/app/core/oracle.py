"""Finite-window time-domain projection used as an independent check"""
import logging
from dataclasses import dataclass
from typing import Dict

import numpy as np
from scipy import linalg

from core.spectral import covariances
from models.density import SpectralDensity
from models.errors import InvalidParameters, NotPositiveDefinite, SingularCovariance
from models.grid import next_power_of_two
from models.pattern import FunctionalWeights, ObservationPattern
from models.solution import InterpolationSolution

logger = logging.getLogger(__name__)

PSD_TOL = 1e-8


@dataclass(eq=False)
class TimeDomainProblem:
    """Covariances r(0..max lag) with the observed and target index sets"""
    cov: np.ndarray
    observed: np.ndarray
    missing: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        span = np.concatenate([self.observed, self.missing])
        if span.size and int(span.max() - span.min()) >= self.cov.size:
            raise InvalidParameters(f"Covariances stop at lag {self.cov.size - 1}, need {int(span.max() - span.min())}")

    def covariance_matrix(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        lags = rows[:, None] - cols[None, :]
        r = self.cov[np.abs(lags)]
        return np.where(lags >= 0, r, np.conj(r))

    def check_psd(self):
        joint = np.concatenate([self.observed, self.missing])
        matrix = self.covariance_matrix(joint, joint)
        smallest = float(linalg.eigvalsh(matrix)[0])
        if smallest < -PSD_TOL * abs(self.cov[0]):
            raise NotPositiveDefinite(f"Covariance matrix has eigenvalue {smallest:.3e}", smallest=smallest)


@dataclass(eq=False)
class ProjectionResult:
    observed: np.ndarray
    coefficients: np.ndarray
    mse: float

    def as_dict(self) -> Dict[int, complex]:
        return {int(o): complex(w) for o, w in zip(self.observed, self.coefficients)}


def build_problem(pattern: ObservationPattern, weights: FunctionalWeights, f: SpectralDensity,
                  window: int) -> TimeDomainProblem:
    """Observations S within [min K - window, max K + window]"""
    missing = pattern.missing_indices()
    lo = int(missing.min()) - window
    hi = int(missing.max()) + window
    observed = pattern.observed_between(lo, hi)
    max_lag = hi - lo
    grid = next_power_of_two(4 * max(max_lag, 1))
    cov = covariances(f, max_lag, max(grid, 4096))
    return TimeDomainProblem(cov, observed, missing, weights.weight_vector(pattern))


def project(problem: TimeDomainProblem, check_psd: bool = True) -> ProjectionResult:
    if check_psd:
        problem.check_psd()
    a = problem.weights
    r_oo = problem.covariance_matrix(problem.observed, problem.observed)
    r_ok = problem.covariance_matrix(problem.observed, problem.missing)
    r_kk = problem.covariance_matrix(problem.missing, problem.missing)
    rhs = r_ok @ np.conj(a)
    try:
        factor = linalg.cho_factor(r_oo, lower=True)
    except linalg.LinAlgError as exc:
        raise SingularCovariance("Covariance of the observations is singular") from exc
    u = linalg.cho_solve(factor, rhs)
    total = float(np.real(np.vdot(np.conj(a), r_kk @ np.conj(a))))
    explained = float(np.real(np.vdot(rhs, u)))
    mse = total - explained
    logger.debug("Projection over %d observations: mse=%.12g", problem.observed.size, mse)
    return ProjectionResult(problem.observed, np.conj(u), mse)


def estimate_weights(solution: InterpolationSolution, window: int) -> ProjectionResult:
    """Filter weights h^(j) of the spectral estimate at observed j inside the window"""
    pattern = solution.pattern
    lo = int(solution.indices.min()) - window
    hi = int(solution.indices.max()) + window
    if max(abs(lo), abs(hi)) > solution.h_window:
        raise InvalidParameters(f"Window {window} reaches past the stored coefficients ({solution.h_window})")
    observed = pattern.observed_between(lo, hi)
    coefficients = np.array([solution.characteristic_coefficient(int(j)) for j in observed], dtype=complex)
    return ProjectionResult(observed, coefficients, solution.delta)
