from typing import List

import numpy as np

from core.projections import BoxMeanProjection
from models.coefficients import FourierCoeffs
from models.density import InversePolynomial, SpectralDensity, Tabulated
from models.uncertainty import D0Minus, DensityClass, DVU, DW

SHAPE_ORDER = 3


def _autocorrelation(phi: np.ndarray) -> dict:
    order = phi.size - 1
    return {m: float(np.dot(phi[:phi.size - m], phi[m:])) for m in range(order + 1)}


def _sample_d0minus(cls: D0Minus, rng: np.random.Generator) -> SpectralDensity:
    # g = p * s * (1/2 + |phi|^2 / (2 |phi|^2_0)), mean p * s with s >= 1
    phi = np.concatenate([[1.0], rng.normal(0.0, 0.3, SHAPE_ORDER)])
    shape = _autocorrelation(phi)
    level = cls.p * (1.0 + rng.exponential(0.5))
    coeffs = {m: level * 0.5 * v / shape[0] for m, v in shape.items()}
    coeffs[0] += level * 0.5
    return InversePolynomial(FourierCoeffs.from_mapping(coeffs))


def _sample_dw(cls: DW, rng: np.random.Generator) -> SpectralDensity:
    base = cls.coefficients()
    headroom = 0.5 * float(base.trig_values(1024).min())
    bumps = rng.normal(size=SHAPE_ORDER)
    bumps *= headroom / (2.0 * np.sum(np.abs(bumps)))
    coeffs = {n: cls.b[n] for n in range(len(cls.b))}
    for k, value in enumerate(bumps, start=cls.W + 1):
        coeffs[k] = float(value)
    return InversePolynomial(FourierCoeffs.from_mapping(coeffs))


def _sample_dvu(cls: DVU, rng: np.random.Generator, grid: int) -> SpectralDensity:
    lower, upper = cls.bounds(grid)
    lo, hi = 1.0 / upper, 1.0 / lower
    projection = BoxMeanProjection(lo, hi, cls.p)
    g = projection.project(lo + rng.uniform(size=grid) * (hi - lo))
    return Tabulated(1.0 / g)


def sample_members(cls: DensityClass, n: int, rng: np.random.Generator, grid: int = 512) -> List[SpectralDensity]:
    """Draw ``n`` feasible densities of ``cls``; tabulated draws live on ``grid``"""
    if isinstance(cls, D0Minus):
        return [_sample_d0minus(cls, rng) for _ in range(n)]
    elif isinstance(cls, DW):
        return [_sample_dw(cls, rng) for _ in range(n)]
    elif isinstance(cls, DVU):
        return [_sample_dvu(cls, rng, grid) for _ in range(n)]
    else:
        raise ValueError(f"Unknown class: {cls!r}")
