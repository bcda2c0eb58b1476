from __future__ import annotations

import numpy as np
import pytest

from mindist.errors import PreconditionError
from mindist.generate import gen_curve, gen_landmarks
from mindist.reconstruct import CurveClassParams, build_grid, validate_curve
from mindist.sensitivity import compute_CQ


def test_grid_kind_small():
    Q = gen_landmarks("grid", L=1.0, d=2, eta=0.5)
    assert Q.n == 9


def test_grid_kind_matches_build_grid():
    a = gen_landmarks("grid", L=3.0, d=2, eta=0.25)
    b = build_grid(3.0, 0.25)
    np.testing.assert_array_equal(np.sort(a.points, axis=0), np.sort(b.points, axis=0))


def test_uniform_is_reproducible():
    a = gen_landmarks("uniform", L=1.0, d=3, n=100, seed=4)
    b = gen_landmarks("uniform", L=1.0, d=3, n=100, seed=4)
    np.testing.assert_array_equal(a.points, b.points)
    assert a.points.min() >= 0 and a.points.max() <= 1


def test_clustered_is_more_uneven_than_uniform():
    u = compute_CQ(gen_landmarks("uniform", L=1.0, d=2, n=400, seed=1)).value
    c = compute_CQ(gen_landmarks("clustered", L=1.0, d=2, n=400, seed=1)).value
    assert c > u


def test_unknown_kind():
    with pytest.raises(PreconditionError):
        gen_landmarks("spiral", L=1.0, d=2, n=5)


def test_missing_n_or_eta():
    with pytest.raises(PreconditionError):
        gen_landmarks("uniform", L=1.0, d=2)
    with pytest.raises(PreconditionError):
        gen_landmarks("grid", L=1.0, d=2)


def test_single_segment_curve_is_valid():
    gamma = gen_curve(1, 1.5, 30.0, seed=0)
    assert gamma.k == 1
    assert validate_curve(gamma, CurveClassParams(1.5, 30.0))


@pytest.mark.parametrize("seed", range(10))
def test_five_segment_curves_validate(seed):
    gamma = gen_curve(5, 30.0 / 20, 30.0, seed=seed)
    assert gamma.k == 5
    assert validate_curve(gamma, CurveClassParams(1.5, 30.0))


def test_curve_is_reproducible():
    a = gen_curve(4, 1.5, 30.0, seed=9)
    b = gen_curve(4, 1.5, 30.0, seed=9)
    np.testing.assert_array_equal(a.critical_points, b.critical_points)


def test_curve_on_rectangle_domain():
    rect = (5.0, 5.0, 25.0, 15.0)
    gamma = gen_curve(3, 1.0, rect, seed=2)
    assert validate_curve(gamma, CurveClassParams(1.0, rect))


def test_infeasible_domain_rejected():
    with pytest.raises(PreconditionError):
        gen_curve(3, 5.0, 10.0, seed=0)


def test_attempt_budget_exhaustion():
    with pytest.raises(PreconditionError, match="attempts"):
        gen_curve(40, 1.5, 12.0, seed=0, max_attempts=3)
