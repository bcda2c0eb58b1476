from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mindist.errors import PreconditionError, RankDeficientError
from mindist.generate import gen_landmarks
from mindist.sensitivity import (
    CQ_bound,
    ShapeRegime,
    compute_Cq,
    compute_Cq_all,
    compute_CQ,
    hyperplane_sensitivities,
    sample_size,
    shape_constant,
    shape_sensitivity_bound,
    total_sensitivity_bound,
)
from mindist.sketch import LandmarkSet

from oracles import cq_brute, leverage_pinv


# hyperplane sensitivities -------------------------------------------------


def test_square_design_has_unit_leverage():
    Q = LandmarkSet(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), L=1.0)
    prof = hyperplane_sensitivities(Q)
    np.testing.assert_allclose(prof.sigma, 3.0, atol=1e-12)
    assert prof.total == pytest.approx(3.0, abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("n_extra", [1, 100, 1000])
def test_total_is_d_plus_one(d, n_extra, rng):
    n = d + 1 if n_extra == 1 else n_extra
    Q = LandmarkSet(rng.random((n, d)))
    assert abs(hyperplane_sensitivities(Q).total - (d + 1)) <= 1e-9


def test_leverage_matches_pseudoinverse(rng):
    Q = LandmarkSet(rng.random((60, 3)), weights=rng.uniform(0.5, 2, 60))
    prof = hyperplane_sensitivities(Q)
    np.testing.assert_allclose(prof.weights * prof.sigma, leverage_pinv(Q.points, Q.weights), rtol=1e-9)


def test_duplicated_point_splits_its_leverage(rng):
    base = rng.random((10, 2))
    m = 4
    pts = np.vstack([base, np.repeat(base[:1], m - 1, axis=0)])
    prof = hyperplane_sensitivities(LandmarkSet(pts))
    dup = [0] + list(range(10, 10 + m - 1))
    merged = np.full(10, 1.0)
    merged[0] = m
    ref = leverage_pinv(base, merged / merged.sum())
    assert np.sum(prof.weights[dup] * prof.sigma[dup]) == pytest.approx(ref[0], rel=1e-9)


def test_rank_deficient_rejected():
    pts = np.array([[0.1 * t, 0.2 * t] for t in range(5)])
    with pytest.raises(RankDeficientError):
        hyperplane_sensitivities(LandmarkSet(pts, L=1.0))


@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(6, 40))
def test_leverage_in_unit_interval(seed, d, n):
    rng = np.random.default_rng(seed)
    prof = hyperplane_sensitivities(LandmarkSet(rng.random((n, d))))
    lev = prof.weights * prof.sigma
    assert np.all(lev > 0)
    assert np.all(lev <= 1 + 1e-12)


# C_q and C_Q --------------------------------------------------------------


def test_cq_two_points():
    Q = LandmarkSet(np.array([[0.0, 0.0], [1.0, 1.0]]), L=1.0)
    assert compute_Cq(Q, 0) == 2.0
    assert compute_Cq(Q, 1) == 2.0
    assert compute_CQ(Q).value == pytest.approx(math.sqrt(2), abs=1e-15)


def test_cq_single_point():
    assert compute_Cq(LandmarkSet(np.array([[0.3, 0.3]]), L=1.0), 0) == 1.0


def test_cq_grid_centre():
    Q = gen_landmarks("grid", L=1.0, d=2, eta=0.5)
    centre = int(np.flatnonzero(np.all(Q.points == 0.5, axis=1))[0])
    assert compute_Cq(Q, centre) == pytest.approx(2.25, abs=1e-12)
    assert compute_Cq(Q, centre) == pytest.approx(cq_brute(Q.points, centre, 1.0), abs=1e-12)


def test_cq_matches_enumeration(rng):
    for d in (1, 2, 3):
        pts = rng.random((40, d))
        pts[5] = pts[3]  # a duplicate
        Q = LandmarkSet(pts, L=1.0)
        fast = compute_Cq_all(Q)
        slow = [cq_brute(pts, i, 1.0) for i in range(40)]
        np.testing.assert_allclose(fast, slow, rtol=1e-12)


def test_constant_cq_gives_unit_CQ():
    # cell-centred lattice: every box count keeps pace with the volume
    m = 8
    axis = (np.arange(m) + 0.5) / m
    pts = np.array([(x, y) for x in axis for y in axis])
    rep = compute_CQ(LandmarkSet(pts, L=1.0))
    np.testing.assert_allclose(rep.cq, 1.0)
    assert rep.value == pytest.approx(1.0)


@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 60))
def test_cq_between_one_and_n(seed, d, n):
    rng = np.random.default_rng(seed)
    cq = compute_Cq_all(LandmarkSet(rng.random((n, d)), L=1.0))
    assert np.all(cq >= 1 - 1e-12)
    assert np.all(cq <= n + 1e-9)


def test_CQ_below_bound_random(rng):
    Q = LandmarkSet(rng.random((200, 2)), L=1.0)
    rep = compute_CQ(Q)
    assert rep.value <= rep.bound


def test_CQ_bound_without_separation_uses_log_n():
    assert CQ_bound(16, 2, 1.0, None) == pytest.approx(8 * 2 ** 0.5)
    assert CQ_bound(16, 2, 1.0, 0.0) == CQ_bound(16, 2, 1.0, None)


# shape bounds -------------------------------------------------------------


def test_shape_constant_d2():
    assert shape_constant(2) == pytest.approx(16 * math.sqrt(2), rel=1e-15)


def test_shape_bound_takes_cap():
    assert shape_sensitivity_bound(1.0, ShapeRegime(10.0, 1.0, 2)) == pytest.approx(200.0)
    assert 160 * math.sqrt(2) > 200


def test_shape_bound_large_ratio_uses_first_branch():
    reg = ShapeRegime(1000.0, 1.0, 2)
    assert shape_sensitivity_bound(1.0, reg) == pytest.approx(16 * math.sqrt(2) * 1000.0)


def test_shape_regime_needs_L_above_rho():
    with pytest.raises(PreconditionError):
        ShapeRegime(1.0, 1.0, 2)


def test_shape_bound_rejects_cq_below_one():
    with pytest.raises(PreconditionError):
        shape_sensitivity_bound(0.5, ShapeRegime(2.0, 1.0, 2))


def test_total_for_cell_centred_grid():
    m = 16
    axis = (np.arange(m) + 0.5) / m
    Q = LandmarkSet(np.array([(x, y) for x in axis for y in axis]), L=1.0)
    prof = total_sensitivity_bound(Q, ShapeRegime(1.0, 1.0 / 16, 2))
    assert prof.total <= 16 * math.sqrt(2) * 16 * (1 + 1e-12)


def test_total_for_single_point():
    reg = ShapeRegime(1.0, 0.1, 2)
    prof = total_sensitivity_bound(LandmarkSet(np.array([[0.5, 0.5]]), L=1.0), reg)
    assert prof.total == shape_sensitivity_bound(1.0, reg)


def test_total_clustered_against_CQ():
    Q = gen_landmarks("clustered", L=1.0, d=2, n=300, seed=3)
    reg = ShapeRegime(1.0, 0.05, 2)
    prof = total_sensitivity_bound(Q, reg)
    rep = compute_CQ(Q)
    assert np.all(prof.sigma <= 2 * reg.ratio ** 2)
    assert prof.total <= min(2 * reg.ratio ** 2, shape_constant(2) * rep.value * reg.ratio) * (1 + 1e-12)


# sample sizes -------------------------------------------------------------


def test_sample_size_hyperplane_weak():
    assert sample_size("hyperplane-weak", eps=0.2, delta=0.1, d=2) == 750
    assert sample_size("hyperplane-weak", eps=0.2, delta=0.2, d=2) == 375


def test_sample_size_shape_weak():
    assert sample_size("shape-weak", eps=0.5, delta=0.5, total=20) == 160


def test_sample_size_trajectory_strong():
    expect = math.ceil(80 * (27 * math.log(20) + math.log(10)))
    assert sample_size("trajectory-strong", eps=0.5, delta=0.1, total=20, k=3) == expect
    assert sample_size("trajectory-strong", eps=0.5, delta=0.1, total=20, k=4) > expect
    assert sample_size("trajectory-strong", eps=0.25, delta=0.1, total=20, k=3) > expect


def test_sample_size_hyperplane_strong_multiplier():
    base = sample_size("hyperplane-strong", eps=0.2, delta=0.1, d=3)
    assert base == math.ceil((3 / 0.04) * (3 * math.log(3) + math.log(10)))
    assert sample_size("hyperplane-strong", eps=0.2, delta=0.1, d=3, multiplier=2) >= 2 * base - 1


@pytest.mark.parametrize("eps,delta", [(0, 0.1), (1, 0.1), (0.1, 0), (0.1, 1.5)])
def test_sample_size_rejects_bad_eps_delta(eps, delta):
    with pytest.raises(PreconditionError):
        sample_size("hyperplane-weak", eps=eps, delta=delta, d=2)
