"""Sensitivity scores and sample-size formulas.

Two families are covered:

* signed hyperplane sketches, whose sensitivities are exact and equal to
  (measure-scaled) leverage scores of the design matrix ``[x_i, 1]``;
* bounded shapes in ``[0, L]^d`` with sketch distance at least ``rho``, for
  which only upper bounds are available.  Those bounds depend on the
  density-imbalance statistic ``C_q`` of each landmark.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import PreconditionError, RankDeficientError
from .sketch import LandmarkSet

EXACT_HYPERPLANE = "exact-hyperplane"
SHAPE_UPPER_BOUND = "shape-upper-bound"

RANK_RTOL = 1e-10


@dataclass(frozen=True)
class SensitivityProfile:
    sigma: np.ndarray
    weights: np.ndarray
    kind: str
    d: int
    L: Optional[float] = None
    rho: Optional[float] = None
    total: float = field(init=False)

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float).reshape(-1)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if sigma.shape != w.shape:
            raise PreconditionError("sigma and weights must have equal length")
        if not np.all(np.isfinite(sigma)) or np.any(sigma <= 0):
            raise PreconditionError("sensitivities must be positive and finite")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "total", float(np.sum(w * sigma)))

    def __len__(self) -> int:
        return self.sigma.size


@dataclass(frozen=True)
class ShapeRegime:
    L: float
    rho: float
    d: int
    k: Optional[int] = None

    def __post_init__(self):
        if not (self.L > self.rho > 0):
            raise PreconditionError(f"need L > rho > 0, got L={self.L}, rho={self.rho}")
        if int(self.d) < 1:
            raise PreconditionError("dimension must be >= 1")

    @property
    def ratio(self) -> float:
        return self.L / self.rho


# ---------------------------------------------------------------------------
# hyperplanes


def design_columns(Q: LandmarkSet) -> np.ndarray:
    """Rows ``sqrt(mu_i) * (x_i, 1)``: the transpose of the column matrix ``A``."""
    ones = np.ones((Q.n, 1))
    return np.sqrt(Q.weights)[:, None] * np.hstack([Q.points, ones])


def hyperplane_sensitivities(Q: LandmarkSet) -> SensitivityProfile:
    """Exact sensitivities for squared signed-distance differences of hyperplanes.

    ``mu_i * sigma_i`` is the leverage score of column ``sqrt(mu_i) (x_i, 1)``;
    it is read off the thin QR factor of ``A^T`` without inverting ``A A^T``.
    """
    At = design_columns(Q)
    kappa = At.shape[1]
    if Q.n < kappa:
        raise RankDeficientError(f"need at least d+1={kappa} landmarks, got {Q.n}")
    q, r = np.linalg.qr(At, mode="reduced")
    s = np.linalg.svd(r, compute_uv=False)
    if s[-1] <= RANK_RTOL * s[0]:
        rank = int(np.sum(s > RANK_RTOL * s[0]))
        raise RankDeficientError(
            f"landmarks are not full rank: affine rank {rank - 1} < d={Q.d} "
            f"(smallest/largest singular value {s[-1] / s[0]:.3e})"
        )
    leverage = np.einsum("ij,ij->i", q, q)
    return SensitivityProfile(leverage / Q.weights, Q.weights, EXACT_HYPERPLANE, Q.d, L=Q.L)


# ---------------------------------------------------------------------------
# bounded shapes


def _linf_rows(points: np.ndarray, rows: np.ndarray) -> np.ndarray:
    return np.max(np.abs(points[rows, None, :] - points[None, :, :]), axis=2)


def compute_Cq_all(Q: LandmarkSet) -> np.ndarray:
    """``C_q`` for every landmark, via the sorted-distance sweep.

    For each ``q`` the other landmarks are sorted by l-infinity distance
    ``r_1 <= ... <= r_{n-1}``; with ``r_n = L`` the statistic is
    ``max_i (r_i / L)^d * n / i``.  Ties resolve correctly because the
    maximum over a run of equal radii is attained at its first index.
    """
    pts, n, d, L = Q.points, Q.n, Q.d, Q.L
    if n == 1:
        return np.ones(1)
    counts = np.arange(1, n + 1, dtype=float)
    out = np.empty(n)
    step = max(1, 4_000_000 // (n * d))
    for lo in range(0, n, step):
        rows = np.arange(lo, min(n, lo + step))
        dist = _linf_rows(pts, rows)
        dist[np.arange(rows.size), rows] = -1.0  # drop exactly one self entry
        dist.sort(axis=1)
        radii = np.hstack([dist[:, 1:], np.full((rows.size, 1), L)])
        vals = (radii / L) ** d * n / counts
        out[rows] = vals.max(axis=1)
    return out


def compute_Cq(Q: LandmarkSet, i: int) -> float:
    if not 0 <= i < Q.n:
        raise IndexError(f"landmark index {i} out of range")
    if Q.n == 1:
        return 1.0
    others = np.delete(Q.points, i, axis=0)
    r = np.sort(np.max(np.abs(others - Q.points[i]), axis=1))
    r = np.append(r, Q.L)
    return float(np.max((r / Q.L) ** Q.d * Q.n / np.arange(1, Q.n + 1)))


@dataclass(frozen=True)
class CQReport:
    value: float
    bound: float
    cq: np.ndarray
    eta: Optional[float]


def min_linf_separation(Q: LandmarkSet) -> Optional[float]:
    if Q.n < 2:
        return None
    best = np.inf
    step = max(1, 4_000_000 // (Q.n * Q.d))
    for lo in range(0, Q.n, step):
        rows = np.arange(lo, min(Q.n, lo + step))
        dist = _linf_rows(Q.points, rows)
        dist[np.arange(rows.size), rows] = np.inf
        best = min(best, float(dist.min()))
    return best


def CQ_bound(n: int, d: int, L: float, eta: Optional[float]) -> float:
    """``2^(d+1) * min(log2(L/eta), log2(n)/d)^(2/(2+d))``."""
    logs = [math.log2(n) / d]
    if eta is not None and eta > 0:
        logs.append(math.log2(L / eta))
    return 2.0 ** (d + 1) * max(0.0, min(logs)) ** (2.0 / (2 + d))


def compute_CQ(Q: LandmarkSet) -> CQReport:
    cq = compute_Cq_all(Q)
    value = float(np.mean(cq ** (2.0 / (2 + Q.d))))
    eta = min_linf_separation(Q)
    return CQReport(value, CQ_bound(Q.n, Q.d, Q.L, eta), cq, eta)


def shape_constant(d: int) -> float:
    return 4.0 ** (2.0 / (2 + d)) * (8.0 * math.sqrt(d)) ** (2.0 * d / (2 + d))


def shape_sensitivity_bound(C_q: float, regime: ShapeRegime) -> float:
    """Per-landmark sensitivity bound, capped at ``d L^2 / rho^2``."""
    if C_q < 1:
        raise PreconditionError(f"C_q must be >= 1, got {C_q}")
    d = regime.d
    lemma = shape_constant(d) * C_q ** (2.0 / (2 + d)) * regime.ratio ** (2.0 * d / (2 + d))
    return min(lemma, d * regime.ratio ** 2)


def total_sensitivity_bound(Q: LandmarkSet, regime: ShapeRegime) -> SensitivityProfile:
    if regime.d != Q.d:
        raise PreconditionError(f"regime d={regime.d} but landmarks have d={Q.d}")
    cq = compute_Cq_all(Q)
    sigma = np.array([shape_sensitivity_bound(max(1.0, c), regime) for c in cq])
    return SensitivityProfile(sigma, Q.weights, SHAPE_UPPER_BOUND, Q.d, L=regime.L, rho=regime.rho)


# ---------------------------------------------------------------------------
# sample sizes

SAMPLE_KINDS = ("hyperplane-weak", "hyperplane-strong", "shape-weak", "trajectory-strong")


def _ceil(x: float) -> int:
    # absorb float noise such as 3 / (0.2 * 0.2**2) = 375.00000000000006
    return int(math.ceil(x * (1.0 - 1e-12)))


def sample_size(
    kind: str,
    *,
    eps: float,
    delta: float,
    d: Optional[int] = None,
    total: Optional[float] = None,
    k: Optional[int] = None,
    multiplier: float = 1.0,
) -> int:
    """Number of sensitivity-sampled landmarks for the requested guarantee.

    Logarithms are natural.  ``multiplier`` stands in for the unstated
    absolute constants of the strong-coreset bounds; the weak bounds are
    explicit and ignore it.
    """
    if not (0 < eps < 1 and 0 < delta < 1):
        raise PreconditionError(f"eps and delta must lie in (0, 1), got {eps}, {delta}")
    if multiplier <= 0:
        raise PreconditionError("multiplier must be positive")
    if kind == "hyperplane-weak":
        _need(d=d)
        return _ceil((d + 1) / (delta * eps ** 2))
    if kind == "hyperplane-strong":
        _need(d=d)
        return _ceil(multiplier * (d / eps ** 2) * (d * math.log(d) + math.log(1 / delta)))
    if kind == "shape-weak":
        _need(total=total)
        return _ceil(total / (delta * eps ** 2))
    if kind == "trajectory-strong":
        _need(total=total, k=k)
        return _ceil(multiplier * (total / eps ** 2) * (k ** 3 * math.log(total) + math.log(1 / delta)))
    raise PreconditionError(f"unknown regime {kind!r}; expected one of {SAMPLE_KINDS}")


def _need(**params) -> None:
    missing = [name for name, value in params.items() if value is None]
    if missing:
        raise PreconditionError(f"missing parameter(s): {', '.join(missing)}")
