import sys
from pathlib import Path

project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

app_dir = project_root / 'app'
sys.path.append(str(app_dir))

import numpy as np
import pytest

from core.coeff_cache import CoefficientCache  # type: ignore
from core.interpolator import Interpolator, mse_of_characteristic, solve, solve_hermitian, solve_many  # type: ignore
from models.density import InversePolynomial, RationalAR, Tabulated  # type: ignore
from models.coefficients import FourierCoeffs  # type: ignore
from models.enums import PatternKind  # type: ignore
from models.errors import GridMismatch, NotPositiveDefinite  # type: ignore
from models.grid import fourier_coefficients, trig_polynomial  # type: ignore
from models.pattern import FunctionalWeights, ObservationPattern, weights_on  # type: ignore


S4 = ObservationPattern(PatternKind.S4, N=1, M1=2, N1=3)
S6 = ObservationPattern(PatternKind.S6, N=2, M1=2, N1=2, M2=3, N2=2)


def test_white_noise_estimate_is_zero():
    """Observations carry no information: c = a and Delta = |a|^2"""
    weights = weights_on(S4, [1.0, 2.0, -1.0, 0.5j, 3.0])
    solution = solve(S4, weights, RationalAR(()))

    assert np.allclose(solution.c, solution.a, atol=1e-14)
    assert solution.delta == pytest.approx(1 + 4 + 1 + 0.25 + 9, abs=1e-12)
    assert np.max(np.abs(solution.h_coeffs)) < 1e-12


def test_single_missing_point():
    pattern = ObservationPattern(PatternKind.S5, N=0, M2=1, N2=0)
    solution = solve(pattern, FunctionalWeights({0: 1.0}), RationalAR((0.5,)))

    assert solution.delta == pytest.approx(0.8, abs=1e-14)
    assert solution.coefficient(0) == pytest.approx(0.8)


def test_characteristic_vanishes_on_gaps():
    f = RationalAR((0.4 + 0.2j, -0.3))
    weights = weights_on(S6, np.arange(1, S6.size + 1) * (1 - 0.5j))
    solution = solve(S6, weights, f)

    norm = np.linalg.norm(solution.a)
    for j in S6.missing_indices():
        assert abs(solution.characteristic_coefficient(int(j))) <= 1e-8 * norm


def test_two_error_formulas_agree():
    f = Tabulated(1.0 / RationalAR((0.6, -0.2)).inverse_values(4096))
    weights = FunctionalWeights.constant(S6)
    solution = solve(S6, weights, f)

    direct = mse_of_characteristic(solution.h_grid, S6, weights, f)
    assert direct == pytest.approx(solution.delta, rel=1e-10)


def test_delta_is_real_and_positive():
    weights = weights_on(S6, np.exp(1j * np.arange(S6.size)))
    solution = solve(S6, weights, RationalAR((0.3 + 0.4j,)))
    assert solution.delta > 0
    assert solution.to_dict()["delta"] == solution.delta


def test_mse_grid_mismatch():
    interpolator = Interpolator(grid=4096)
    with pytest.raises(GridMismatch):
        interpolator.mse_of_characteristic(np.zeros(100, dtype=complex), S4, FunctionalWeights.constant(S4),
                                           RationalAR((0.5,)))


def test_solve_hermitian_rejects_indefinite_matrix():
    with pytest.raises(NotPositiveDefinite):
        solve_hermitian(np.array([[1.0, 2.0], [2.0, 1.0]], dtype=complex), np.ones(2, dtype=complex))


def test_solve_many_keeps_input_order():
    weights = FunctionalWeights.constant(S4)
    densities = [RationalAR((0.5,)), RationalAR(()), RationalAR((-0.3, 0.2)),
                 InversePolynomial(FourierCoeffs.from_mapping({0: 2.0, 2: 0.5}))]

    solutions = solve_many(S4, weights, densities, max_workers=3)

    expected = [solve(S4, weights, f).delta for f in densities]
    assert [s.delta for s in solutions] == pytest.approx(expected, rel=1e-14)
    assert solutions[1].delta == pytest.approx(5.0)


def test_coefficients_are_memoised():
    cache = CoefficientCache()
    interpolator = Interpolator(cache=cache)
    f = RationalAR((0.5,))

    first = interpolator.solve(S4, FunctionalWeights.constant(S4), f)
    assert len(cache.cache) == 1
    assert cache.get(f, 256, 4096) is not None

    second = interpolator.solve(S4, FunctionalWeights.constant(S4, 2.0), f)
    assert len(cache.cache) == 1
    assert second.delta == pytest.approx(4 * first.delta)


def test_cache_evicts_oldest_entry():
    cache = CoefficientCache(max_size=2)
    coeffs = FourierCoeffs.from_mapping({0: 1.0})
    densities = [RationalAR((a,)) for a in (0.1, 0.2, 0.3)]
    for f in densities:
        cache.put(f, 4, 64, coeffs)

    assert cache.get(densities[0], 4, 64) is None
    assert cache.get(densities[2], 4, 64) is coeffs
    cache.clear()
    assert cache.get(densities[2], 4, 64) is None


def test_working_grid_grows_with_the_pattern():
    interpolator = Interpolator(grid=64, half_length=4)
    pattern = ObservationPattern(PatternKind.S5, N=10, M2=5, N2=20)

    half, h_window, grid = interpolator.working_grid(pattern)

    assert half == pattern.max_lag == 35
    assert grid == 256
    assert h_window <= grid // 2 - 1


def test_error_is_orthogonal_to_nearby_observations():
    f = RationalAR((0.4 + 0.2j, -0.3))
    weights = weights_on(S6, np.arange(1, S6.size + 1) * (1 - 0.5j))
    solution = solve(S6, weights, f)

    missing = S6.missing_indices()
    candidates = [j for j in range(int(missing.min()) - 20, int(missing.max()) + 21) if S6.is_observed(j)]
    nearest = sorted(candidates, key=lambda j: (int(np.min(np.abs(missing - j))), j))[:20]
    residual = (trig_polynomial(missing, solution.a, solution.grid) - solution.h_grid) * f.values(solution.grid)

    on_observed = fourier_coefficients(residual, np.array(nearest))
    assert np.max(np.abs(on_observed)) <= 1e-8 * np.linalg.norm(solution.a)


def test_characteristic_is_optimal_only_for_its_own_density():
    weights = FunctionalWeights.constant(S6)
    solved_for = solve(S6, weights, RationalAR((0.5,)))
    actual = RationalAR((-0.3, 0.2))

    mismatched = mse_of_characteristic(solved_for.h_grid, S6, weights, actual)
    assert mismatched >= solve(S6, weights, actual).delta * (1 - 1e-10)


def test_empty_right_block_reduces_to_left_gap():
    reduced = ObservationPattern(PatternKind.S6, N=1, M1=2, N1=3, M2=1, N2=0)
    weights = weights_on(S4, [1.0, 2.0, -1.0, 0.5j, 3.0])
    f = RationalAR((0.6, -0.2))

    assert reduced.missing_indices().tolist() == S4.missing_indices().tolist()
    expected = solve(S4, weights, f)
    actual = solve(reduced, weights, f)
    assert actual.delta == pytest.approx(expected.delta, rel=1e-12)
    assert np.allclose(actual.c, expected.c, atol=1e-12)
