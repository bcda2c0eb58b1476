"""One-pass landmark reduction by online ridge-leverage row sampling.

Rows of the hyperplane design matrix ``a_i = (x_i, 1)`` arrive one at a time.
Row ``i`` is kept with probability

    p_i = min(c (1 + eps) a_i^T (At^T At + lam I)^{-1} a_i, 1)

and, if kept, enters the sample as ``a_i / sqrt(p_i)``.  The ridge system is
held as a Cholesky factor that is updated in place after each kept row.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import solve_triangular

from .errors import PreconditionError
from .sketch import LandmarkSet

REFACTOR_EVERY = 256
SANDWICH_TOL = -1e-9


@dataclass(frozen=True)
class DesignMatrix:
    rows: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.rows, dtype=float)
        if A.ndim != 2 or A.shape[1] < 2:
            raise PreconditionError("design matrix must be (n, d+1)")
        if not np.all(A[:, -1] == 1.0):
            raise PreconditionError("last column of the design matrix must be all ones")
        A = A.copy()
        A.setflags(write=False)
        object.__setattr__(self, "rows", A)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def columns(self) -> int:
        return self.rows.shape[1]


def build_design_matrix(Q: LandmarkSet) -> DesignMatrix:
    return DesignMatrix(np.hstack([Q.points, np.ones((Q.n, 1))]))


def oversampling_constant(columns: int, eps: float, log: Callable[[float], float] = math.log) -> float:
    """``8 log(m / eps^2)`` with ``m`` the number of columns."""
    return 8.0 * log(columns / eps ** 2)


def _chol_update(Lf: np.ndarray, x: np.ndarray) -> None:
    """In-place rank-one update: ``Lf Lf^T + x x^T``."""
    x = x.copy()
    m = x.size
    for k in range(m):
        lkk = Lf[k, k]
        r = math.hypot(lkk, x[k])
        c, s = r / lkk, x[k] / lkk
        Lf[k, k] = r
        if k + 1 < m:
            Lf[k + 1:, k] = (Lf[k + 1:, k] + s * x[k + 1:]) / c
            x[k + 1:] = c * x[k + 1:] - s * Lf[k + 1:, k]


class OnlineSampler:
    """Sequential sampler state; feed rows with :meth:`step`."""

    def __init__(
        self,
        columns: int,
        eps: float,
        delta: float,
        seed: Optional[int] = None,
        rng: Optional[np.random.Generator] = None,
        c: Optional[float] = None,
        log: Callable[[float], float] = math.log,
    ):
        if not (0 < eps < 1 and 0 < delta < 1):
            raise PreconditionError(f"eps and delta must lie in (0, 1), got {eps}, {delta}")
        self.columns = int(columns)
        self.eps = float(eps)
        self.delta = float(delta)
        self.lam = self.delta / self.eps
        self.c = oversampling_constant(self.columns, self.eps, log) if c is None else float(c)
        self.seed = seed
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.gram = self.lam * np.eye(self.columns)
        self.chol = math.sqrt(self.lam) * np.eye(self.columns)
        self.kept_rows: list = []
        self.kept_index: list = []
        self.kept_p: list = []
        self.rows_seen = 0
        self._updates = 0

    def quadratic_form(self, a: np.ndarray) -> float:
        y = solve_triangular(self.chol, a, lower=True, check_finite=False)
        return float(y @ y)

    def probability(self, a: np.ndarray) -> float:
        return min(self.c * (1.0 + self.eps) * self.quadratic_form(a), 1.0)

    def step(self, row: Sequence[float]) -> Tuple[bool, float]:
        a = np.asarray(row, dtype=float).reshape(-1)
        if a.size != self.columns:
            raise PreconditionError(f"row has {a.size} entries, expected {self.columns}")
        if not np.all(np.isfinite(a)):
            raise PreconditionError("row entries must be finite")
        p = self.probability(a)
        u = self.rng.random()
        index = self.rows_seen
        self.rows_seen += 1
        kept = p > 0 and u < p
        if kept:
            scaled = a / math.sqrt(p)
            self.kept_rows.append(scaled)
            self.kept_index.append(index)
            self.kept_p.append(p)
            self.gram += np.outer(scaled, scaled)
            self._updates += 1
            if self._updates % REFACTOR_EVERY == 0:
                self.chol = np.linalg.cholesky(self.gram)
            else:
                _chol_update(self.chol, scaled)
        return kept, p

    @property
    def sampled_matrix(self) -> np.ndarray:
        if not self.kept_rows:
            return np.zeros((0, self.columns))
        return np.vstack(self.kept_rows)

    def gram_drift(self) -> float:
        """Max deviation of the maintained matrix from ``At^T At + lam I``."""
        At = self.sampled_matrix
        ref = At.T @ At + self.lam * np.eye(self.columns)
        return float(np.max(np.abs(self.gram - ref)))


def online_sample_step(state: OnlineSampler, row: Sequence[float]) -> Tuple[OnlineSampler, bool, float]:
    kept, p = state.step(row)
    return state, kept, p


@dataclass(frozen=True)
class StreamResult:
    sampled: np.ndarray
    indices: np.ndarray
    p: np.ndarray
    weights: np.ndarray
    seen: int
    eps: float
    delta: float
    lam: float
    c: float

    @property
    def kept(self) -> int:
        return self.indices.size

    def summary(self) -> dict:
        return {
            "kept": self.kept,
            "seen": self.seen,
            "epsilon": self.eps,
            "delta": self.delta,
            "lambda": self.lam,
            "c": self.c,
        }


def online_sample(
    Q,
    eps: float,
    delta: float,
    seed: Optional[int] = None,
    c: Optional[float] = None,
) -> StreamResult:
    """Single pass over the rows of ``Q``'s design matrix in index order.

    ``Q`` may be a :class:`LandmarkSet`, a :class:`DesignMatrix`, or a raw row
    array.  Kept landmark ``i`` gets weight ``1 / (p_i n)`` so that the
    weighted sketch distance estimates ``d_Q``.
    """
    if isinstance(Q, LandmarkSet):
        A = build_design_matrix(Q).rows
    elif isinstance(Q, DesignMatrix):
        A = Q.rows
    else:
        A = np.atleast_2d(np.asarray(Q, dtype=float))
    state = OnlineSampler(A.shape[1], eps, delta, seed=seed, c=c)
    for row in A:
        state.step(row)
    p = np.asarray(state.kept_p, dtype=float)
    n = A.shape[0]
    return StreamResult(
        state.sampled_matrix,
        np.asarray(state.kept_index, dtype=np.int64),
        p,
        1.0 / (p * n),
        state.rows_seen,
        state.eps,
        state.delta,
        state.lam,
        state.c,
    )


def spectral_sandwich_check(A: np.ndarray, A_tilde: np.ndarray, eps: float, delta: float) -> bool:
    """Whether ``(1-eps) A^T A - delta I <= At^T At <= (1+eps) A^T A + delta I``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    At = np.asarray(A_tilde, dtype=float).reshape(-1, A.shape[1])
    G = A.T @ A
    Gt = At.T @ At
    I = np.eye(G.shape[0])
    upper = np.linalg.eigvalsh((1 + eps) * G + delta * I - Gt)[0]
    lower = np.linalg.eigvalsh(Gt - (1 - eps) * G + delta * I)[0]
    return bool(upper >= SANDWICH_TOL and lower >= SANDWICH_TOL)


def median_estimate(squared_norms: Sequence[float]) -> float:
    vals = np.asarray(squared_norms, dtype=float).reshape(-1)
    if vals.size == 0:
        raise PreconditionError("median of an empty sequence")
    return float(np.median(vals))


def distance_band(
    A_tilde: np.ndarray,
    u: Sequence[float],
    n: int,
    eps: float,
    delta: float,
    Delta: float = 0.0,
) -> Tuple[float, float]:
    """Interval that brackets ``d_Q(h1, h2)`` given the sampled matrix.

    ``u`` is the coefficient difference of the two canonical hyperplanes and
    ``Delta`` bounds their distance from the origin; the ridge slack is
    ``4 (1 + Delta^2) delta / n``.
    """
    if not 0 <= eps < 1:
        raise PreconditionError(f"eps must lie in [0, 1), got {eps}")
    u = np.asarray(u, dtype=float).reshape(-1)
    At = np.asarray(A_tilde, dtype=float).reshape(-1, u.size)
    est = float(np.sum((At @ u) ** 2)) / n
    slack = 4.0 * (1.0 + Delta ** 2) * delta / n
    lower = math.sqrt(max(0.0, est - slack)) / (1 + eps)
    upper = math.sqrt(est + slack) / (1 - eps)
    return lower, upper
