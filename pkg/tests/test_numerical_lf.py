import sys
from pathlib import Path

project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

app_dir = project_root / 'app'
sys.path.append(str(app_dir))

import numpy as np
import pytest

from core.class_sampler import sample_members  # type: ignore
from core.interpolator import Interpolator  # type: ignore
from core.ascent import ProjectedGradientAscent  # type: ignore
from core.minimax import DeltaObjective, lf_dW, numerical_lf  # type: ignore
from core.projections import BoxMeanProjection, MeanFloorProjection, MomentProjection, Projection  # type: ignore
from models.density import RationalAR  # type: ignore
from models.enums import Mechanism, PatternKind  # type: ignore
from models.errors import InvalidParameters, NotConverged  # type: ignore
from models.pattern import FunctionalWeights, GeometricDecay, ObservationPattern  # type: ignore
from models.uncertainty import D0Minus, DW  # type: ignore

GAPPED = ObservationPattern(PatternKind.S5, N=1, M2=1, N2=1)


def test_single_point_maximum():
    pattern = ObservationPattern(PatternKind.S5, N=0, M2=1, N2=0)
    result = numerical_lf(pattern, FunctionalWeights({0: 2.0}), D0Minus(1.0))

    assert result.delta0 == pytest.approx(4.0, abs=1e-4)
    assert result.grid == 512


def test_two_sided_gap_dominates_class_samples():
    pattern = ObservationPattern(PatternKind.S3, N=0, M1=1, M2=1, T=3)
    weights = FunctionalWeights({}, GeometricDecay(1.0, 0.5))
    cls = D0Minus(1.0)
    result = numerical_lf(pattern, weights, cls, seed=1)

    flat = float(np.sum(np.abs(weights.weight_vector(pattern)) ** 2))
    assert result.delta0 >= flat * (1 - 1e-9)
    assert "floor_active" in result.lagrange

    interpolator = Interpolator(512)
    for f in sample_members(cls, 10, np.random.default_rng(5)):
        assert interpolator.solve(pattern, weights, f).delta <= result.delta0 * (1 + 1e-9)


def test_grid_too_small_for_pattern():
    pattern = ObservationPattern(PatternKind.S4, N=1, M1=2, N1=3)
    with pytest.raises(InvalidParameters):
        numerical_lf(pattern, FunctionalWeights.constant(pattern), D0Minus(1.0), grid=16)


def test_stalled_moment_class_is_not_converged():
    """The line search stalls far from stationarity on this moment class"""
    weights = FunctionalWeights({0: 1.0, 1: 0.3, 3: 0.1})

    with pytest.raises(NotConverged) as info:
        numerical_lf(GAPPED, weights, DW((1.0, 0.2)), starts=2)
    assert info.value.details["stationarity"] >= 1e-7
    assert info.value.details["stalled"] is True


def test_degenerate_moment_class_is_flagged():
    weights = FunctionalWeights({0: 1.0, 1: 0.5, 3: 0.1})
    cls = DW((1.0, 0.2, 0.1, 0.05))
    result = numerical_lf(GAPPED, weights, cls)

    assert result.mechanism == Mechanism.DEGENERATE
    assert result.diagnostics["degenerate"] is True
    assert result.delta0 == pytest.approx(lf_dW(GAPPED, weights, cls).delta0, rel=1e-8)


class _Free(Projection):
    grid = 8

    def project(self, y):
        return np.array(y, dtype=float)


def test_stalled_ascent_is_not_converged():
    # the gradient points uphill but every move lowers the value
    def misleading(g):
        return -float(np.sum(g ** 2)), 2.0 * g

    result = ProjectedGradientAscent(_Free(), max_iter=100).run(misleading, np.ones(8))

    assert result.stalled
    assert not result.converged
    assert not result.degenerate
    assert result.iterations == 0
    assert result.stationarity >= 1e-7


def test_single_spike_is_the_floor_class_vertex():
    projection = MeanFloorProjection(2.0, 16, 1e-3)
    direction = -np.linspace(1.0, 2.0, 16)
    vertex = projection.extreme_point(direction)

    assert np.mean(vertex) == pytest.approx(2.0, rel=1e-14)
    assert vertex[0] == pytest.approx(2e-3 + 16 * (2.0 - 2e-3))
    assert np.all(vertex[1:] == 2e-3)
    assert projection.extreme_point(np.ones(16)) is None


def test_box_vertex_fills_in_direction_order():
    projection = BoxMeanProjection(np.full(8, 0.5), np.full(8, 1.5), 1.0)
    direction = np.array([3.0, 1.0, 7.0, 0.0, 5.0, 2.0, 6.0, 4.0])
    vertex = projection.extreme_point(direction)

    # budget 4 fills the four largest directions to the upper bound
    assert vertex.tolist() == [0.5, 0.5, 1.5, 0.5, 1.5, 0.5, 1.5, 1.5]
    assert np.mean(vertex) == pytest.approx(1.0)


def test_flat_start_climbs_to_a_vertex():
    pattern = ObservationPattern(PatternKind.S3, N=0, M1=1, M2=1, T=3)
    weights = FunctionalWeights({}, GeometricDecay(1.0, 0.5))
    result = numerical_lf(pattern, weights, D0Minus(1.0), seed=1)

    flat = float(np.sum(np.abs(weights.weight_vector(pattern)) ** 2))
    assert result.mechanism == Mechanism.NUMERICAL
    assert result.diagnostics["vertex_steps"][0] >= 1
    assert result.delta0 > flat


def test_objective_gradient_matches_finite_difference():
    weights = FunctionalWeights({0: 1.0, 1: 0.5, 3: 0.1})
    objective = DeltaObjective(GAPPED, weights, 64)
    g = 1.0 / RationalAR((0.4,)).values(64)
    value, gradient = objective(g)

    direction = np.cos(3 * np.arange(64) * 2 * np.pi / 64) + 0.5
    step = 1e-6
    plus, _ = objective(g + step * direction)
    minus, _ = objective(g - step * direction)
    # the gradient is taken with respect to the grid average
    assert (plus - minus) / (2 * step) == pytest.approx(np.mean(gradient * direction), rel=1e-5)


def test_projections_land_in_their_sets():
    rng = np.random.default_rng(0)
    y = rng.normal(size=128)

    floor = MeanFloorProjection(1.0, 128, 1e-3)
    x = floor.project(y)
    assert x.min() >= 1e-3 - 1e-15
    assert np.mean(x) >= 1.0 - 1e-12

    moments = MomentProjection((1.0, 0.2), 128, 1e-3)
    z = moments.affine(y)
    lam = -np.pi + 2 * np.pi * np.arange(128) / 128
    assert np.mean(z) == pytest.approx(1.0, abs=1e-12)
    assert np.mean(z * np.cos(lam)) == pytest.approx(0.2, abs=1e-12)
    assert np.mean(z * np.sin(lam)) == pytest.approx(0.0, abs=1e-12)
