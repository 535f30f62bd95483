"""Monte-Carlo sample paths of stationary Gaussian sequences"""
import logging
from typing import Dict, Tuple

import numpy as np
from scipy import signal

from core.spectral import covariances
from models.density import RationalAR, SpectralDensity
from models.errors import EmbeddingNotPSD, IndexOutOfPath, InvalidParameters
from models.grid import next_power_of_two

logger = logging.getLogger(__name__)

EMBEDDING_TOL = 1e-10
REAL_TOL = 1e-10


def replicate_rng(seed: int, replicate: int) -> np.random.Generator:
    return np.random.default_rng([seed, replicate])


def circulant_embedding(cov: np.ndarray, size: int) -> np.ndarray:
    """Square roots of the eigenvalues of the circulant of size ``size`` built from r(0..size/2)"""
    half = size // 2
    if cov.size < half + 1:
        raise InvalidParameters(f"Need covariances up to lag {half}, got {cov.size - 1}")
    row = np.concatenate([cov[:half + 1], cov[1:half][::-1]]).real
    eigenvalues = np.fft.fft(row).real
    peak = float(np.max(np.abs(eigenvalues)))
    smallest = float(eigenvalues.min())
    if smallest < -EMBEDDING_TOL * peak:
        raise EmbeddingNotPSD(f"Circulant embedding has eigenvalue {smallest:.3e}", smallest=smallest)
    return np.sqrt(np.clip(eigenvalues, 0.0, None) / size)


def _warm_up(alpha: np.ndarray) -> int:
    roots = np.roots(np.concatenate([[1.0], -alpha])) if alpha.size else np.array([])
    radius = float(np.max(np.abs(roots))) if roots.size else 0.0
    if radius >= 1.0:
        raise InvalidParameters(f"AR polynomial is not stable (root modulus {radius:.6f})")
    if radius == 0.0:
        return alpha.size
    return int(np.ceil(np.log(1e-16) / np.log(radius))) + alpha.size


def _is_real_ar(f: SpectralDensity) -> bool:
    return isinstance(f, RationalAR) and f.is_real


def simulate(f: SpectralDensity, length: int, n_replicates: int, seed: int,
             first_replicate: int = 0) -> np.ndarray:
    """(n_replicates, length) array of real sample paths indexed 0..length-1"""
    if length < 1 or n_replicates < 1:
        raise InvalidParameters("length and n_replicates must be positive")
    replicates = range(first_replicate, first_replicate + n_replicates)

    if _is_real_ar(f):
        alpha = np.array([a.real for a in f.alpha])
        burn = _warm_up(alpha)
        noise = np.stack([replicate_rng(seed, r).standard_normal(burn + length) for r in replicates])
        paths = signal.lfilter([np.sqrt(f.sigma2)], np.concatenate([[1.0], -alpha]), noise, axis=1)
        return paths[:, burn:]

    size = next_power_of_two(8 * length)
    cov = covariances(f, size // 2, max(4096, 2 * size))
    if np.max(np.abs(cov.imag)) > REAL_TOL * abs(cov[0]):
        raise InvalidParameters("Monte-Carlo simulation needs a real (symmetric) density")
    scale = circulant_embedding(cov.real, size)
    paths = np.empty((n_replicates, length))
    for k, r in enumerate(replicates):
        rng = replicate_rng(seed, r)
        z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        paths[k] = np.fft.fft(scale * z).real[:length]
    return paths


def squared_errors(paths: np.ndarray, origin: int, estimate: Dict[int, complex],
                   target: Dict[int, complex]) -> np.ndarray:
    """|sum a(k) x(k) - sum w(o) x(o)|^2 per replicate; column c of ``paths`` holds time origin + c"""
    length = paths.shape[1]

    def column(j: int) -> int:
        c = int(j) - origin
        if not 0 <= c < length:
            raise IndexOutOfPath(f"Index {j} is outside the simulated window [{origin}, {origin + length - 1}]",
                                 index=int(j))
        return c

    error = np.zeros(paths.shape[0], dtype=complex)
    for k, a in target.items():
        error += a * paths[:, column(k)]
    for o, w in estimate.items():
        error -= w * paths[:, column(o)]
    return np.abs(error) ** 2


def empirical_mse(paths: np.ndarray, origin: int, estimate: Dict[int, complex],
                  target: Dict[int, complex]) -> Tuple[float, float]:
    """Mean and standard error of the squared estimation error over replicates"""
    return summarize(squared_errors(paths, origin, estimate, target))


def summarize(squared: np.ndarray) -> Tuple[float, float]:
    mean = float(np.mean(squared))
    stderr = float(np.std(squared, ddof=1) / np.sqrt(squared.size)) if squared.size > 1 else float("nan")
    return mean, stderr
