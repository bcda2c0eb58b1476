from __future__ import annotations

import math

import numpy as np
import pytest

from mindist.coreset import (
    empirical_relative_error,
    identity_coreset,
    relative_errors,
    sampling_probabilities,
    sensitive_sample,
    weighted_square_estimate,
)
from mindist.errors import PreconditionError
from mindist.geometry import Trajectory, hyperplane_canonical
from mindist.sensitivity import SensitivityProfile, hyperplane_sensitivities
from mindist.sketch import LandmarkSet, dist_dQ, sketch, subset_distance
from mindist.verify import hyperplane_pair_diffs


@pytest.fixture
def Q(rng):
    return LandmarkSet(rng.random((300, 2)))


def test_equal_sensitivities_give_equal_weights(Q):
    prof = SensitivityProfile(np.full(Q.n, 2.0), Q.weights, "test", 2)
    cs = sensitive_sample(Q, prof, 50, seed=1)
    np.testing.assert_allclose(cs.weights, 1 / 50)
    np.testing.assert_allclose(sampling_probabilities(prof), 1 / Q.n)


def test_fixed_seed_reproduces(Q):
    prof = hyperplane_sensitivities(Q)
    a = sensitive_sample(Q, prof, Q.n, seed=99)
    b = sensitive_sample(Q, prof, Q.n, seed=99)
    np.testing.assert_array_equal(a.indices, b.indices)
    np.testing.assert_array_equal(a.weights, b.weights)
    c = sensitive_sample(Q, prof, Q.n, seed=100)
    assert not np.array_equal(a.indices, c.indices)


def test_weight_depends_only_on_index(Q):
    prof = hyperplane_sensitivities(Q)
    cs = sensitive_sample(Q, prof, 2000, seed=5)
    np.testing.assert_allclose(cs.weights, prof.total / (2000 * prof.sigma[cs.indices]), rtol=1e-15)
    for i in np.unique(cs.indices):
        assert np.ptp(cs.weights[cs.indices == i]) == 0


def test_draw_frequencies_follow_sensitivity(rng):
    Q = LandmarkSet(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.5]]), L=1.0)
    prof = SensitivityProfile(np.array([1.0, 2.0, 3.0, 4.0]), Q.weights, "test", 2)
    cs = sensitive_sample(Q, prof, 200_000, seed=3)
    freq = np.bincount(cs.indices, minlength=4) / 200_000
    np.testing.assert_allclose(freq, [0.1, 0.2, 0.3, 0.4], atol=0.005)


def test_uniform_weight_mode(Q):
    cs = sensitive_sample(Q, hyperplane_sensitivities(Q), 40, seed=0, uniform_weights=True)
    np.testing.assert_allclose(cs.weights, 1 / 40)
    assert cs.uniform_weights


def test_rejects_bad_inputs(Q):
    prof = hyperplane_sensitivities(Q)
    with pytest.raises(PreconditionError):
        sensitive_sample(Q, prof, 0, seed=0)
    other = LandmarkSet(Q.points[:10])
    with pytest.raises(PreconditionError):
        sensitive_sample(other, prof, 5, seed=0)


def test_unbiased_square_estimate(Q):
    prof = hyperplane_sensitivities(Q)
    h1, h2 = hyperplane_canonical([1, 1, -0.7]), hyperplane_canonical([0.3, -1, 0.4])
    diff = sketch(h1, Q).values - sketch(h2, Q).values
    exact = dist_dQ(sketch(h1, Q), sketch(h2, Q)) ** 2
    est = np.array([weighted_square_estimate(diff, sensitive_sample(Q, prof, 30, seed=s)) for s in range(3000)])
    se = est.std(ddof=1) / math.sqrt(est.size)
    assert abs(est.mean() - exact) <= 3 * se


def test_identity_coreset_is_exact(Q, rng):
    prof = hyperplane_sensitivities(Q)
    cs = identity_coreset(Q, prof)
    pairs = [(Trajectory(rng.random((3, 2))), Trajectory(rng.random((3, 2)))) for _ in range(10)]
    stats = empirical_relative_error(Q, cs, pairs, eps=0.1)
    assert stats.max <= 1e-14
    assert stats.exceed_fraction == 0.0


def test_single_pair_hand_computed():
    Q = LandmarkSet(np.array([[0.0], [1.0]]), L=1.0)
    prof = SensitivityProfile(np.array([1.0, 1.0]), Q.weights, "test", 1)
    from mindist.coreset import Coreset
    from mindist.sketch import WeightedSubset

    cs = Coreset(WeightedSubset([1], [1.0]), prof, 0, 1)
    # v(J1) - v(J2) = (1, 3): exact sqrt(5), coreset sqrt(9) = 3
    errs, excluded = relative_errors(np.array([[1.0, 3.0]]), Q.weights, cs)
    assert excluded == 0
    assert errs[0] == pytest.approx((3 - math.sqrt(5)) / math.sqrt(5), rel=1e-15)


def test_zero_distance_pairs_are_excluded(Q):
    cs = identity_coreset(Q, hyperplane_sensitivities(Q))
    h = hyperplane_canonical([1, 0, -0.5])
    stats = empirical_relative_error(Q, cs, [(h, h)], eps=0.1)
    assert stats.excluded == 1
    assert stats.evaluated == 0


def test_subset_distance_agrees_with_relative_errors(Q, rng):
    prof = hyperplane_sensitivities(Q)
    cs = sensitive_sample(Q, prof, 100, seed=4)
    h1, h2 = hyperplane_canonical(rng.normal(size=3)), hyperplane_canonical(rng.normal(size=3))
    v1, v2 = sketch(h1, Q), sketch(h2, Q)
    exact, approx = dist_dQ(v1, v2), subset_distance(v1, v2, cs.subset)
    errs, _ = relative_errors((v1.values - v2.values)[None, :], Q.weights, cs)
    assert errs[0] == pytest.approx(abs(approx - exact) / exact, rel=1e-12)


def test_weak_hyperplane_exceedance_small_run():
    rng = np.random.default_rng(8)
    Q = LandmarkSet(rng.random((2000, 2)))
    prof = hyperplane_sensitivities(Q)
    fails = 0
    trials = 100
    for t in range(trials):
        cs = sensitive_sample(Q, prof, 375, seed=t)
        errs, _ = relative_errors(hyperplane_pair_diffs(rng, Q, 1), Q.weights, cs)
        fails += int(errs[0] > 0.2)
    assert fails / trials <= 0.2 + 3 * math.sqrt(0.2 * 0.8 / trials)


def test_landmark_weights_collapse_repeats(Q, rng):
    prof = hyperplane_sensitivities(Q)
    cs = sensitive_sample(Q, prof, 5000, seed=2)
    agg = cs.landmark_weights(Q.n)
    diff = rng.normal(size=Q.n)
    assert agg @ diff ** 2 == pytest.approx(weighted_square_estimate(diff, cs), rel=1e-12)
