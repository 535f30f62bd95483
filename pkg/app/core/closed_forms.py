"""Closed-form pieces of the least-favourable constructions"""
from typing import FrozenSet, Optional

import numpy as np

from models.coefficients import FourierCoeffs
from models.enums import PatternKind
from models.errors import InvalidParameters, NotCovered, WeightsNotPositive
from models.pattern import FunctionalWeights, ObservationPattern


def require_positive_weights(pattern: ObservationPattern, weights: FunctionalWeights) -> np.ndarray:
    vector = weights.weight_vector(pattern)
    if not weights.is_positive(pattern):
        bad = [int(j) for j, v in zip(pattern.missing_indices(), vector) if not (v.real > 0 and v.imag == 0)]
        raise WeightsNotPositive(f"Closed forms need real positive weights; offending indices {bad}", indices=bad)
    return vector.real


def anchored_coefficients(pattern: ObservationPattern, weights: FunctionalWeights, p: float) -> FourierCoeffs:
    """b0(t - t*) = p a(t) / a(t*) for t in K, extended by Hermitian symmetry"""
    anchor = pattern.anchor
    if anchor is None:
        raise InvalidParameters(f"No anchored closed form for {pattern.kind.value}; use the numerical maximiser")
    vector = require_positive_weights(pattern, weights)
    indices = pattern.missing_indices()
    a_star = vector[int(np.nonzero(indices == anchor)[0][0])]
    coeffs = {int(t - anchor): p * (a_t / a_star) for t, a_t in zip(indices, vector)}
    return FourierCoeffs.from_mapping(coeffs)


def gamma_mask(pattern: ObservationPattern, degree: int, W: Optional[int] = None) -> FrozenSet[int]:
    """Positions n <= degree where the outer factor of 1/f0 should vanish; ``W`` selects the D_W pattern"""
    if W is not None:
        return _dw_gamma_mask(pattern, degree, W)
    N, M1, N1, M2, N2 = pattern.N, pattern.M1, pattern.N1, pattern.M2, pattern.N2
    kind = pattern.kind
    if kind == PatternKind.S1:
        mask = set(range(N + 1, N + M1 + 1))
    elif kind == PatternKind.S2:
        mask = set(range(N + 1, N + M2 + 1))
    elif kind == PatternKind.S4:
        mask = set(range(N + 1, N + M1 + 1)) | set(range(N + M1 + N1 + 1, degree + 1))
    elif kind == PatternKind.S5:
        mask = set(range(N + 1, N + M2 + 1)) | set(range(N + M2 + N2 + 1, degree + 1))
    elif kind == PatternKind.S6:
        top = N + M2 + N2
        mask = (set(range(N2, M2 + N2))
                | set(range(top + 1, top + M1 + 1))
                | set(range(top + M1 + N1 + 1, degree + 1)))
    else:
        mask = set()
    return frozenset(n for n in mask if n <= degree)


def _dw_gamma_mask(pattern: ObservationPattern, degree: int, W: int) -> FrozenSet[int]:
    N, M1, N1, M2, N2 = pattern.N, pattern.M1, pattern.N1, pattern.M2, pattern.N2
    kind = pattern.kind
    if kind in (PatternKind.S1, PatternKind.S4):
        inner = set(range(N + 1, M1 + 1))
    elif kind in (PatternKind.S2, PatternKind.S5):
        inner = set(range(N + 1, N + M2 + 1))
    elif kind == PatternKind.S6:
        inner = set(range(N + 1, M1 + 1)) | set(range(M1 + N1 + 1, N + M2 + 1))
    else:
        return frozenset()
    mask = inner - set(range(W + 1))
    if kind == PatternKind.S4:
        mask |= set(range(M1 + N1 + 1, degree + 1))
    elif kind in (PatternKind.S5, PatternKind.S6):
        mask |= set(range(N + M2 + N2 + 1, degree + 1))
    return frozenset(n for n in mask if n <= degree)


def _check_coverage(pattern: ObservationPattern):
    kind = pattern.kind
    if kind == PatternKind.S3:
        raise NotCovered("D_W has no cutoff rule for S3")
    if kind in (PatternKind.S1, PatternKind.S4, PatternKind.S6) and pattern.M1 < pattern.N:
        raise NotCovered(f"{kind.value}: cutoff rule needs M1 >= N (M1={pattern.M1}, N={pattern.N})")
    if kind == PatternKind.S6 and pattern.N + pattern.M2 < pattern.M1 + pattern.N1:
        raise NotCovered("S6: cutoff rule needs N + M2 >= M1 + N1")


def dw_cutoff(pattern: ObservationPattern, W: int) -> int:
    """Last canonical position of K carrying a nonzero multiplier for the class D_W"""
    _check_coverage(pattern)
    N, M1, N1, M2, N2 = pattern.N, pattern.M1, pattern.N1, pattern.M2, pattern.N2
    last = pattern.size - 1
    if W <= N:
        return W
    kind = pattern.kind
    if kind in (PatternKind.S1, PatternKind.S4):
        if W <= M1:
            cutoff = N
        elif kind == PatternKind.S1 or W < M1 + N1:
            cutoff = N + W - M1
        else:
            cutoff = last
    elif kind in (PatternKind.S2, PatternKind.S5):
        if W <= N + M2:
            cutoff = N
        elif kind == PatternKind.S2 or W < N + M2 + N2:
            cutoff = W - M2
        else:
            cutoff = last
    else:
        if W <= M1:
            cutoff = N
        elif W <= M1 + N1:
            cutoff = N + W - M1
        elif W <= N + M2:
            cutoff = N + N1
        elif W < N + M2 + N2:
            cutoff = N1 + W - M2
        else:
            cutoff = last
    return min(cutoff, last)


def covers_dw(pattern: ObservationPattern) -> bool:
    """True when the D_W multiplier system has a cutoff rule for the pattern"""
    try:
        _check_coverage(pattern)
    except NotCovered:
        return False
    return True
