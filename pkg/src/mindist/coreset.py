"""Sensitivity sampling of landmarks and an empirical error harness."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import PreconditionError
from .sensitivity import SensitivityProfile
from .sketch import LandmarkSet, Sketchable, WeightedSubset, sketch_values


@dataclass(frozen=True)
class Coreset:
    subset: WeightedSubset
    source_profile: SensitivityProfile
    seed: int
    N: int
    uniform_weights: bool = False

    @property
    def indices(self) -> np.ndarray:
        return self.subset.indices

    @property
    def weights(self) -> np.ndarray:
        return self.subset.weights

    def landmark_weights(self, n: int) -> np.ndarray:
        """Total weight per parent landmark (repeat draws summed); length ``n``."""
        return np.bincount(self.indices, weights=self.weights, minlength=n)


def sampling_probabilities(profile: SensitivityProfile) -> np.ndarray:
    mass = profile.weights * profile.sigma
    total = mass.sum()
    if not total > 0:
        raise PreconditionError("total sensitivity is zero")
    return mass / total


def sensitive_sample(
    Q: LandmarkSet,
    profile: SensitivityProfile,
    N: int,
    seed: int,
    uniform_weights: bool = False,
) -> Coreset:
    """Draw ``N`` landmarks iid with probability proportional to ``mu_i sigma_i``.

    Each draw of landmark ``i`` carries weight ``S / (N sigma_i)``, which makes
    ``sum_j w_j f(q_j)`` an unbiased estimate of ``sum_i mu_i f(q_i)``.  Repeated
    draws keep separate entries.  ``uniform_weights`` replaces the weights
    with ``1/N``; that mode is biased in general and is provided for
    comparison only.
    """
    N = int(N)
    if N < 1:
        raise PreconditionError("sample count N must be >= 1")
    if len(profile) != Q.n:
        raise PreconditionError(f"profile has {len(profile)} entries, landmark set has {Q.n}")
    probs = sampling_probabilities(profile)
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, rng.random(N), side="right")
    idx = np.minimum(idx, Q.n - 1)
    if uniform_weights:
        w = np.full(N, 1.0 / N)
    else:
        w = profile.total / (N * profile.sigma[idx])
    return Coreset(WeightedSubset(idx, w), profile, int(seed), N, bool(uniform_weights))


def identity_coreset(Q: LandmarkSet, profile: SensitivityProfile) -> Coreset:
    """Every landmark once with its own measure as weight; exact by construction."""
    return Coreset(WeightedSubset(np.arange(Q.n), Q.weights), profile, 0, Q.n)


@dataclass(frozen=True)
class ErrorStats:
    errors: np.ndarray
    max: float
    mean: float
    exceed_fraction: Optional[float]
    excluded: int
    eps: Optional[float] = None

    @property
    def evaluated(self) -> int:
        return self.errors.size


def relative_errors(
    diffs: np.ndarray,
    weights: np.ndarray,
    coreset: Coreset,
    rho: float = 0.0,
) -> Tuple[np.ndarray, int]:
    """Relative errors for rows of sketch differences ``v(J1) - v(J2)``.

    Rows whose exact distance is zero or below ``rho`` are dropped; the count
    of dropped rows is returned alongside.
    """
    diffs = np.atleast_2d(np.asarray(diffs, dtype=float))
    sq = diffs * diffs
    exact = np.sqrt(sq @ weights)
    approx = np.sqrt(sq[:, coreset.indices] @ coreset.weights)
    keep = (exact > 0) & (exact >= rho)
    return np.abs(approx[keep] - exact[keep]) / exact[keep], int(np.sum(~keep))


def summarize(errors: np.ndarray, excluded: int, eps: Optional[float] = None) -> ErrorStats:
    if errors.size == 0:
        return ErrorStats(errors, float("nan"), float("nan"), None, excluded, eps)
    frac = None if eps is None else float(np.mean(errors > eps))
    return ErrorStats(errors, float(errors.max()), float(errors.mean()), frac, excluded, eps)


def empirical_relative_error(
    Q: LandmarkSet,
    coreset: Coreset,
    object_pairs: Iterable[Tuple[Sketchable, Sketchable]],
    eps: Optional[float] = None,
    rho: float = 0.0,
) -> ErrorStats:
    """Compare coreset distances with exact sketch distances on object pairs.

    Pairs at exact distance zero (or below ``rho``) are excluded and counted.
    """
    rows = [sketch_values(a, Q.points) - sketch_values(b, Q.points) for a, b in object_pairs]
    if not rows:
        return summarize(np.empty(0), 0, eps)
    errs, excluded = relative_errors(np.vstack(rows), Q.weights, coreset, rho)
    return summarize(errs, excluded, eps)


def weighted_square_estimate(diff: Sequence[float], coreset: Coreset) -> float:
    """``sum_j w_j (v1 - v2)_{i_j}^2`` for one pair of full sketches."""
    diff = np.asarray(diff, dtype=float)
    part = diff[coreset.indices]
    return float(np.sum(coreset.weights * part * part))
