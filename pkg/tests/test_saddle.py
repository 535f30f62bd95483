import sys
from pathlib import Path

project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

app_dir = project_root / 'app'
sys.path.append(str(app_dir))

import numpy as np
import pytest

from core.minimax import lf_d0minus, lf_dvu, saddle_check  # type: ignore
from models.density import RationalAR  # type: ignore
from models.enums import PatternKind  # type: ignore
from models.errors import ClosedFormInvalid  # type: ignore
from models.grid import frequency_grid  # type: ignore
from models.pattern import FunctionalWeights, ObservationPattern  # type: ignore
from models.uncertainty import D0Minus, DVU  # type: ignore

GAPPED = ObservationPattern(PatternKind.S5, N=1, M2=1, N2=1)
WEIGHTS = FunctionalWeights({0: 1.0, 1: 0.3, 3: 0.1})
AR = RationalAR((0.5,))
PINNED = DVU(AR, AR, 1.25)


@pytest.fixture(scope="module")
def pinned_result():
    return lf_dvu(GAPPED, WEIGHTS, PINNED, starts=2)


def test_pinned_class_passes_both_sides(pinned_result):
    report = saddle_check(pinned_result, GAPPED, WEIGHTS, PINNED, n_samples=20)

    assert report.passed
    assert report.worst_case_pass == 20
    assert report.optimality_pass == 20
    assert report.to_dict()["passed"] is True


def test_shifted_characteristic_fails_worst_case_side(pinned_result):
    # index 2 is observed, so the shift is a legal but suboptimal estimate
    lam = frequency_grid(pinned_result.grid)
    shifted = pinned_result.h0_grid + 0.5 * np.exp(2j * lam)

    report = saddle_check(pinned_result, GAPPED, WEIGHTS, PINNED, n_samples=10, h0_grid=shifted)

    assert not report.passed
    assert report.worst_case_fail == 10
    assert report.max_excess > 0.1


def test_anchored_characteristic_is_optimal_for_its_density():
    cls = D0Minus(1.0)
    result = lf_d0minus(GAPPED, WEIGHTS, cls)
    report = saddle_check(result, GAPPED, WEIGHTS, cls, n_samples=20, seed=4)

    assert report.optimality_fail == 0
    assert report.max_deficit <= 1e-10
    assert report.worst_case_pass + report.worst_case_fail == 20


def test_invalid_closed_form_cannot_be_checked():
    weights = FunctionalWeights({0: 1.0, 1: 0.5, 3: 0.25})
    cls = D0Minus(1.0)
    result = lf_d0minus(GAPPED, weights, cls)

    with pytest.raises(ClosedFormInvalid):
        saddle_check(result, GAPPED, weights, cls)
