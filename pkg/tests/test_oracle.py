import sys
from pathlib import Path

project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

app_dir = project_root / 'app'
sys.path.append(str(app_dir))

import numpy as np
import pytest

from core.interpolator import solve  # type: ignore
from core.oracle import TimeDomainProblem, build_problem, estimate_weights, project  # type: ignore
from models.density import RationalAR  # type: ignore
from models.enums import PatternKind  # type: ignore
from models.errors import InvalidParameters, NotPositiveDefinite, SingularCovariance  # type: ignore
from models.pattern import FunctionalWeights, ObservationPattern, weights_on  # type: ignore

S4 = ObservationPattern(PatternKind.S4, N=1, M1=2, N1=3)
AR1 = RationalAR((0.5,))


def test_white_noise_projection_is_zero():
    weights = FunctionalWeights.constant(S4)
    result = project(build_problem(S4, weights, RationalAR(()), window=10))

    assert np.max(np.abs(result.coefficients)) < 1e-12
    assert result.mse == pytest.approx(5.0, abs=1e-12)


def test_example_one_against_projection():
    result = project(build_problem(S4, FunctionalWeights.constant(S4), AR1, window=500))
    assert result.mse == pytest.approx(412 / 51, rel=1e-6)


def test_single_missing_point():
    pattern = ObservationPattern(PatternKind.S5, N=0, M2=1, N2=0)
    result = project(build_problem(pattern, FunctionalWeights({0: 1.0}), AR1, window=50))
    assert result.mse == pytest.approx(0.8, rel=1e-10)


def test_window_monotonicity_and_upper_bound():
    pattern = ObservationPattern(PatternKind.S6, N=2, M1=1, N1=2, M2=2, N2=1)
    weights = weights_on(pattern, np.linspace(1.0, 2.0, pattern.size))
    f = RationalAR((0.9,))
    problem = build_problem(pattern, weights, f, window=5)
    a = problem.weights
    total = float(np.real(np.vdot(a, problem.covariance_matrix(problem.missing, problem.missing) @ a)))

    previous = total
    for window in (1, 2, 5, 10, 20):
        mse = project(build_problem(pattern, weights, f, window=window)).mse
        assert 0 <= mse <= previous + 1e-12
        previous = mse


def test_projection_weights_match_spectral_characteristic():
    weights = weights_on(S4, [1.0, 0.5 - 0.5j, 2.0, 1j, -1.0])
    f = RationalAR((0.4 + 0.3j,))
    solution = solve(S4, weights, f)

    oracle = project(build_problem(S4, weights, f, window=20))
    spectral = estimate_weights(solution, window=20)

    assert oracle.observed.tolist() == spectral.observed.tolist()
    assert np.allclose(oracle.coefficients, spectral.coefficients, atol=1e-10)
    assert oracle.mse == pytest.approx(solution.delta, rel=1e-10)


@pytest.mark.parametrize("case", range(10))
def test_random_finite_patterns(case):
    rng = np.random.default_rng(100 + case)
    kind = [PatternKind.S4, PatternKind.S5, PatternKind.S6][case % 3]
    params = {"N": int(rng.integers(0, 9))}
    if kind in (PatternKind.S4, PatternKind.S6):
        params.update(M1=int(rng.integers(1, 9)), N1=int(rng.integers(1, 9)))
    if kind in (PatternKind.S5, PatternKind.S6):
        params.update(M2=int(rng.integers(1, 9)), N2=int(rng.integers(1, 9)))
    pattern = ObservationPattern(kind, **params)
    weights = weights_on(pattern, rng.normal(size=pattern.size))

    roots = rng.uniform(-0.8, 0.8, size=int(rng.integers(1, 3)))
    alpha = tuple(-np.poly(roots)[1:])
    f = RationalAR(alpha)

    delta = solve(pattern, weights, f).delta
    mse = project(build_problem(pattern, weights, f, window=500)).mse
    assert mse == pytest.approx(delta, rel=1e-6)


def test_estimate_window_beyond_stored_coefficients():
    solution = solve(S4, FunctionalWeights.constant(S4), AR1)
    with pytest.raises(InvalidParameters):
        estimate_weights(solution, window=10000)


def test_singular_covariance():
    problem = TimeDomainProblem(
        cov=np.ones(5, dtype=complex),
        observed=np.array([1, 2]),
        missing=np.array([0]),
        weights=np.array([1.0 + 0j]),
    )
    with pytest.raises(SingularCovariance):
        project(problem, check_psd=False)


def test_indefinite_covariance_rejected():
    problem = TimeDomainProblem(
        cov=np.array([1.0, 2.0], dtype=complex),
        observed=np.array([1]),
        missing=np.array([0]),
        weights=np.array([1.0 + 0j]),
    )
    with pytest.raises(NotPositiveDefinite):
        project(problem)
