import sys
from pathlib import Path

project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

app_dir = project_root / 'app'
sys.path.append(str(app_dir))

import pytest

from core.interpolator import Interpolator, solve_truncated  # type: ignore
from core.oracle import build_problem, project  # type: ignore
from models.density import RationalAR  # type: ignore
from models.enums import PatternKind  # type: ignore
from models.errors import InvalidParameters, NotConverged  # type: ignore
from models.pattern import FunctionalWeights, GeometricDecay, ObservationPattern  # type: ignore

GEOMETRIC = FunctionalWeights({}, GeometricDecay(1.0, 0.5))
F = RationalAR((0.5,))


@pytest.mark.parametrize("pattern", [
    ObservationPattern(PatternKind.S1, N=0, M1=2, T=25),
    ObservationPattern(PatternKind.S2, N=1, M2=1, T=25),
    ObservationPattern(PatternKind.S3, N=0, M1=1, M2=2, T=25),
])
def test_delta_plateaus(pattern):
    solution, report = solve_truncated(pattern, GEOMETRIC, F)

    assert report.converged
    assert report.truncations == [25, 50, 100, 200, 400]
    assert len(report.deltas) == 5
    assert abs(report.deltas[3] - report.deltas[4]) <= 1e-8 * report.deltas[4]
    assert report.tail_bounds[-1] < report.tail_bounds[0]
    assert solution.pattern.T == 400
    assert solution.delta == report.deltas[-1]


def test_truncated_delta_matches_time_domain_projection():
    pattern = ObservationPattern(PatternKind.S1, N=0, M1=2, T=25)
    solution, _ = solve_truncated(pattern, GEOMETRIC, F, schedule=(50, 100, 200))

    oracle = project(build_problem(solution.pattern, GEOMETRIC, F, window=1000))

    assert oracle.mse == pytest.approx(solution.delta, rel=1e-5)


def test_slow_decay_does_not_converge():
    pattern = ObservationPattern(PatternKind.S1, N=0, M1=1, T=25)
    weights = FunctionalWeights({}, GeometricDecay(1.0, 0.95))

    with pytest.raises(NotConverged) as info:
        solve_truncated(pattern, weights, F, schedule=(2, 4))
    assert info.value.details["report"]["truncations"] == [2, 4]
    assert not info.value.details["report"]["converged"]


def test_schedule_validation():
    pattern = ObservationPattern(PatternKind.S1, N=0, M1=1, T=25)
    interpolator = Interpolator()

    with pytest.raises(InvalidParameters):
        interpolator.solve_truncated(pattern, GEOMETRIC, F, schedule=(50, 25))
    with pytest.raises(InvalidParameters):
        interpolator.solve_truncated(pattern, GEOMETRIC, F, schedule=(50,))
    with pytest.raises(InvalidParameters):
        interpolator.solve_truncated(ObservationPattern(PatternKind.S4, N=1, M1=2, N1=3),
                                     FunctionalWeights({0: 1.0}), F)
