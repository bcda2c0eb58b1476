"""Seeded Monte Carlo checks of coreset accuracy.

Each trial draws its own coreset and test pairs from a child of one root
``SeedSequence``, so reports are identical for any ``jobs`` setting.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .coreset import relative_errors, sensitive_sample
from .errors import PreconditionError
from .geometry import Trajectory, points_trajectory_distance
from .sensitivity import (
    SAMPLE_KINDS,
    ShapeRegime,
    hyperplane_sensitivities,
    sample_size,
    total_sensitivity_bound,
)
from .sketch import LandmarkSet


def random_hyperplane_coeffs(rng: np.random.Generator, d: int, m: int, L: float = 1.0) -> np.ndarray:
    """``m`` canonical coefficient rows for hyperplanes through random points of ``[0, L]^d``."""
    normal = rng.normal(size=(m, d))
    normal /= np.linalg.norm(normal, axis=1)[:, None]
    anchor = rng.random((m, d)) * L
    u = np.hstack([normal, -np.einsum("md,md->m", normal, anchor)[:, None]])
    # first nonzero entry positive
    first = u[np.arange(m), np.argmax(u != 0, axis=1)]
    return u * np.sign(first)[:, None]


def hyperplane_pair_diffs(rng: np.random.Generator, Q: LandmarkSet, m: int) -> np.ndarray:
    """Rows ``v(h1) - v(h2)`` of signed sketches for ``m`` random pairs."""
    u1 = random_hyperplane_coeffs(rng, Q.d, m, Q.L)
    u2 = random_hyperplane_coeffs(rng, Q.d, m, Q.L)
    du = u1 - u2
    return du[:, :-1] @ Q.points.T + du[:, -1:]


def random_polyline(rng: np.random.Generator, k: int, L: float, d: int = 2) -> Trajectory:
    while True:
        pts = rng.random((k + 1, d)) * L
        if np.all(np.linalg.norm(np.diff(pts, axis=0), axis=1) > 0):
            return Trajectory(pts)


def trajectory_pair_diffs(rng: np.random.Generator, Q: LandmarkSet, m: int, k: int) -> np.ndarray:
    rows = []
    for _ in range(m):
        g1 = random_polyline(rng, k, Q.L, Q.d)
        g2 = random_polyline(rng, k, Q.L, Q.d)
        rows.append(points_trajectory_distance(Q.points, g1) - points_trajectory_distance(Q.points, g2))
    return np.vstack(rows)


@dataclass(frozen=True)
class VerifyConfig:
    regime: str
    d: int = 2
    n: int = 2000
    eps: float = 0.2
    delta: float = 0.2
    trials: int = 400
    pairs: int = 1
    L: float = 1.0
    rho: Optional[float] = None
    k: int = 3
    multiplier: float = 1.0
    N: Optional[int] = None
    landmarks: str = "uniform"


@dataclass
class VerifyReport:
    config: dict
    N: int
    total_sensitivity: float
    trials: int
    evaluated_pairs: int
    excluded_pairs: int
    exceed_fraction: float
    allowed_fraction: float
    max_error: float
    mean_error: float
    mean_trial_max: float
    trial_max: List[float] = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def _landmarks(cfg: VerifyConfig, rng: np.random.Generator) -> LandmarkSet:
    from .generate import gen_landmarks

    seed = int(rng.integers(2 ** 63))
    return gen_landmarks(cfg.landmarks, L=cfg.L, d=cfg.d, n=cfg.n, seed=seed)


def _setup(cfg: VerifyConfig, root: np.random.SeedSequence):
    if cfg.regime not in SAMPLE_KINDS:
        raise PreconditionError(f"unknown regime {cfg.regime!r}; expected one of {SAMPLE_KINDS}")
    Q = _landmarks(cfg, np.random.default_rng(root))
    if cfg.regime.startswith("hyperplane"):
        profile = hyperplane_sensitivities(Q)
        N = sample_size(cfg.regime, eps=cfg.eps, delta=cfg.delta, d=cfg.d, multiplier=cfg.multiplier)
    else:
        if cfg.rho is None:
            raise PreconditionError("shape regimes need rho")
        profile = total_sensitivity_bound(Q, ShapeRegime(cfg.L, cfg.rho, cfg.d, cfg.k))
        N = sample_size(cfg.regime, eps=cfg.eps, delta=cfg.delta, total=profile.total, k=cfg.k, multiplier=cfg.multiplier)
    if cfg.N is not None:
        N = int(cfg.N)
    return Q, profile, N


_SETUP_CACHE: dict = {}


def _cached_setup(cfg: VerifyConfig, seq: np.random.SeedSequence):
    key = (cfg, seq.entropy, seq.spawn_key)
    if key not in _SETUP_CACHE:
        _SETUP_CACHE.clear()
        _SETUP_CACHE[key] = _setup(cfg, seq)
    return _SETUP_CACHE[key]


def _trial(args):
    cfg, child = args
    Q, profile, N = _cached_setup(cfg, child[0])
    rng = np.random.default_rng(child[1])
    cs = sensitive_sample(Q, profile, N, seed=int(rng.integers(2 ** 63)))
    if cfg.regime.startswith("hyperplane"):
        diffs = hyperplane_pair_diffs(rng, Q, cfg.pairs)
    else:
        diffs = trajectory_pair_diffs(rng, Q, cfg.pairs, cfg.k)
    return relative_errors(diffs, Q.weights, cs, rho=cfg.rho or 0.0)


def run_verify(cfg: VerifyConfig, seed: int = 0, jobs: int = 1) -> VerifyReport:
    """Sample coresets at the formula's ``N`` and measure relative errors.

    The landmark set is drawn once from ``seed``; every trial then draws a
    fresh coreset and ``cfg.pairs`` random object pairs.
    """
    if cfg.trials < 1 or cfg.pairs < 1:
        raise PreconditionError("trials and pairs must be positive")
    root = np.random.SeedSequence(seed)
    landmark_seed, trial_root = root.spawn(2)
    Q, profile, N = _cached_setup(cfg, landmark_seed)
    tasks = [(cfg, (landmark_seed, child)) for child in trial_root.spawn(cfg.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_trial, tasks, chunksize=max(1, cfg.trials // (4 * jobs))))
    else:
        results = [_trial(t) for t in tasks]
    errs = [r[0] for r in results]
    flat = np.concatenate(errs) if errs else np.empty(0)
    excluded = sum(r[1] for r in results)
    trial_max = [float(e.max()) if e.size else float("nan") for e in errs]
    allowed = cfg.delta + 3.0 * math.sqrt(cfg.delta * (1 - cfg.delta) / cfg.trials)
    return VerifyReport(
        config=asdict(cfg),
        N=int(N),
        total_sensitivity=float(profile.total),
        trials=cfg.trials,
        evaluated_pairs=int(flat.size),
        excluded_pairs=int(excluded),
        exceed_fraction=float(np.mean(flat > cfg.eps)) if flat.size else float("nan"),
        allowed_fraction=allowed,
        max_error=float(flat.max()) if flat.size else float("nan"),
        mean_error=float(flat.mean()) if flat.size else float("nan"),
        mean_trial_max=float(np.nanmean(trial_max)) if trial_max else float("nan"),
        trial_max=trial_max,
    )
