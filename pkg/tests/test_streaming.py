from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mindist.errors import PreconditionError
from mindist.geometry import hyperplane_canonical
from mindist.sketch import LandmarkSet, dist_dQ, sketch
from mindist.streaming import (
    DesignMatrix,
    OnlineSampler,
    build_design_matrix,
    distance_band,
    median_estimate,
    online_sample,
    online_sample_step,
    oversampling_constant,
    spectral_sandwich_check,
)


def test_design_row():
    A = build_design_matrix(LandmarkSet(np.array([[2.0, 3.0]]), L=5.0))
    np.testing.assert_array_equal(A.rows, [[2.0, 3.0, 1.0]])


def test_design_shape(rng):
    A = build_design_matrix(LandmarkSet(rng.random((17, 3))))
    assert (A.n, A.columns) == (17, 4)


def test_design_requires_ones_column():
    with pytest.raises(PreconditionError):
        DesignMatrix(np.array([[1.0, 2.0]]))


def test_design_norm_equals_sketch_distance(rng):
    Q = LandmarkSet(rng.random((80, 2)))
    A = build_design_matrix(Q).rows
    for _ in range(20):
        h1, h2 = hyperplane_canonical(rng.normal(size=3)), hyperplane_canonical(rng.normal(size=3))
        lhs = np.linalg.norm(A @ (h1.u - h2.u)) / math.sqrt(Q.n)
        assert lhs == pytest.approx(dist_dQ(sketch(h1, Q), sketch(h2, Q)), abs=1e-9)


def test_first_row_parameters():
    state = OnlineSampler(4, eps=0.5, delta=0.05, seed=0)
    assert state.lam == pytest.approx(0.1)
    assert state.c == pytest.approx(8 * math.log(16))
    a = np.array([1.0, 0.0, 0.0, 0.0])
    assert state.quadratic_form(a) == pytest.approx(10.0)
    _, kept, p = online_sample_step(state, a)
    assert p == 1.0 and kept


def test_zero_row_never_kept():
    state = OnlineSampler(3, eps=0.5, delta=0.05, seed=0)
    kept, p = state.step(np.zeros(3))
    assert p == 0.0 and not kept


def test_non_finite_row_rejected():
    with pytest.raises(PreconditionError):
        OnlineSampler(3, 0.5, 0.05, seed=0).step([1.0, np.nan, 1.0])


def test_oversampling_constant_log_is_configurable():
    assert oversampling_constant(4, 0.5) == pytest.approx(8 * math.log(16))
    assert oversampling_constant(4, 0.5, log=math.log2) == pytest.approx(32.0)


@given(st.integers(0, 2**32 - 1))
def test_probabilities_and_gram_consistency(seed):
    rng = np.random.default_rng(seed)
    rows = np.hstack([rng.random((120, 2)) * rng.uniform(0.1, 10), np.ones((120, 1))])
    state = OnlineSampler(3, eps=0.5, delta=0.05, seed=seed)
    for a in rows:
        kept, p = state.step(a)
        assert 0.0 <= p <= 1.0
        scale = max(1.0, float(np.max(np.abs(state.gram))))
        assert state.gram_drift() <= 1e-9 * scale
        ref = np.linalg.cholesky(state.gram)
        np.testing.assert_allclose(state.chol @ state.chol.T, ref @ ref.T, atol=1e-9 * scale)
    assert len(state.kept_rows) <= state.rows_seen


def test_kept_rows_are_bit_exact_scalings(rng):
    rows = np.hstack([rng.random((300, 3)), np.ones((300, 1))])
    res = online_sample(rows, 0.5, 0.05, seed=2)
    np.testing.assert_array_equal(res.sampled, rows[res.indices] / np.sqrt(res.p)[:, None])
    np.testing.assert_array_equal(res.weights, 1.0 / (res.p * 300))


@given(st.integers(0, 2**32 - 1))
def test_extra_kept_row_never_raises_quadratic_form(seed):
    rng = np.random.default_rng(seed)
    base = OnlineSampler(3, 0.5, 0.05, seed=0)
    more = OnlineSampler(3, 0.5, 0.05, seed=0)
    for _ in range(5):
        r = np.append(rng.random(2), 1.0)
        for s in (base, more):
            s.gram += np.outer(r, r)
            s.chol = np.linalg.cholesky(s.gram)
    extra = np.append(rng.random(2), 1.0) * rng.uniform(0.1, 3)
    more.gram += np.outer(extra, extra)
    more.chol = np.linalg.cholesky(more.gram)
    probe = np.append(rng.random(2), 1.0)
    assert more.quadratic_form(probe) <= base.quadratic_form(probe) * (1 + 1e-12)


def test_keep_everything_reproduces_A(rng):
    Q = LandmarkSet(rng.random((50, 2)))
    A = build_design_matrix(Q).rows
    res = online_sample(Q, 0.5, 0.05, seed=0, c=1e12)
    np.testing.assert_array_equal(res.sampled, A)
    for _ in range(10):
        u = rng.normal(size=3)
        assert np.linalg.norm(res.sampled @ u) == np.linalg.norm(A @ u)


def test_fixed_seed_is_deterministic(rng):
    Q = LandmarkSet(rng.random((400, 3)))
    a = online_sample(Q, 0.5, 0.05, seed=11)
    b = online_sample(Q, 0.5, 0.05, seed=11)
    np.testing.assert_array_equal(a.indices, b.indices)
    np.testing.assert_array_equal(a.sampled, b.sampled)


def test_stream_summary_fields(rng):
    res = online_sample(LandmarkSet(rng.random((50, 2))), 0.5, 0.05, seed=1)
    s = res.summary()
    assert set(s) == {"kept", "seen", "epsilon", "delta", "lambda", "c"}
    assert s["seen"] == 50 and s["kept"] == res.indices.size


def test_sandwich_identity_passes(rng):
    A = rng.random((30, 3))
    assert spectral_sandwich_check(A, A, 0.0, 0.0)
    assert spectral_sandwich_check(A, A, 0.3, 0.1)


def test_sandwich_doubled_fails():
    A = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert not spectral_sandwich_check(A, 2 * A, 0.1, 0.01)


def test_sampler_sandwich_mostly_holds():
    passes = 0
    for s in range(20):
        rng = np.random.default_rng(s)
        A = np.hstack([rng.random((500, 2)), np.ones((500, 1))])
        res = online_sample(A, 0.5, 0.05, seed=s)
        passes += spectral_sandwich_check(A, res.sampled, 0.5, 0.05)
    assert passes >= 18


def test_median():
    assert median_estimate([1, 2, 3]) == 2
    assert median_estimate([5]) == 5
    with pytest.raises(PreconditionError):
        median_estimate([])


def test_median_of_five_beats_single_run():
    rng = np.random.default_rng(0)
    n = 200
    Q = LandmarkSet(rng.random((n, 2)))
    A = build_design_matrix(Q).rows
    h1, h2 = hyperplane_canonical([1, 0.4, -0.5]), hyperplane_canonical([0.2, 1, -0.6])
    u = h1.u - h2.u
    exact = np.sum((A @ u) ** 2)
    single = median_hits = 0
    for t in range(200):
        ests = [np.sum((online_sample(A, 0.5, 0.05, seed=5 * t + j).sampled @ u) ** 2) for j in range(5)]
        single += abs(ests[0] - exact) <= 0.1 * exact
        median_hits += abs(median_estimate(ests) - exact) <= 0.1 * exact
    assert median_hits >= single


def test_band_without_ridge_slack():
    At = np.array([[3.0, 0.0], [0.0, 4.0]])
    u = np.array([1.0, 1.0])
    lo, hi = distance_band(At, u, 1, 0.2, 0.0)
    assert lo == pytest.approx(5.0 / 1.2)
    assert hi == pytest.approx(5.0 / 0.8)


def test_band_slack_uses_four_when_delta_offset_zero():
    At = np.array([[1.0, 0.0]])
    u = np.array([1.0, 0.0])
    lo, hi = distance_band(At, u, 4, 0.0, 0.5, Delta=0.0)
    assert hi == pytest.approx(math.sqrt(0.25 + 4 * 0.5 / 4))
    assert lo == pytest.approx(0.0)
    _, hi2 = distance_band(At, u, 4, 0.0, 0.5, Delta=1.0)
    assert hi2 == pytest.approx(math.sqrt(0.25 + 8 * 0.5 / 4))


def test_band_rejects_eps_one():
    with pytest.raises(PreconditionError):
        distance_band(np.eye(2), [1, 0], 2, 1.0, 0.1)


def test_band_contains_true_distance(rng):
    n = 1000
    Q = LandmarkSet(rng.random((n, 2)))
    A = build_design_matrix(Q).rows
    hits = 0
    for t in range(50):
        h1, h2 = hyperplane_canonical(rng.normal(size=3)), hyperplane_canonical(rng.normal(size=3))
        u = h1.u - h2.u
        res = online_sample(A, 0.5, 0.05, seed=t)
        Delta = max(abs(h1.offset), abs(h2.offset))
        lo, hi = distance_band(res.sampled, u, n, 0.5, 0.05, Delta)
        exact = dist_dQ(sketch(h1, Q), sketch(h2, Q))
        hits += lo <= exact <= hi
    assert hits >= 45
