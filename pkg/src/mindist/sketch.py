"""MinDist sketch vectors and the (weighted) sketch distance."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatchError, PreconditionError
from .geometry import Hyperplane, Segment, Trajectory, points_trajectory_distance


@dataclass(frozen=True)
class LandmarkSet:
    """Weighted landmark multiset inside ``[0, L]^d``.

    ``weights`` default to uniform ``1/n`` and are renormalised to sum to one.
    Duplicated points are allowed; a multiset with multiplicities ``m_i`` is
    equivalently a set with weights ``m_i / n``.
    """

    points: np.ndarray
    weights: Optional[np.ndarray] = None
    L: Optional[float] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise PreconditionError("landmark set must be a non-empty (n, d) array")
        if not np.all(np.isfinite(pts)):
            raise PreconditionError("landmarks must be finite")
        n = pts.shape[0]
        if self.weights is None:
            w = np.full(n, 1.0 / n)
        else:
            w = np.asarray(self.weights, dtype=float).reshape(-1)
            if w.shape != (n,):
                raise PreconditionError(f"expected {n} weights, got {w.shape[0]}")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise PreconditionError("landmark weights must be positive and finite")
            w = w / w.sum()
        L = self.L
        if L is None:
            L = max(float(pts.max()), 0.0) or 1.0
        L = float(L)
        if not L > 0:
            raise PreconditionError("bounding scale L must be positive")
        lo_tol = 1e-12 * L
        if pts.min() < -lo_tol or pts.max() > L + lo_tol:
            raise PreconditionError(f"landmarks must lie in [0, {L}]^d")
        pts = pts.copy()
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "L", L)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True)
class SketchVector:
    values: np.ndarray
    signed: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(v)):
            raise PreconditionError("sketch values must be finite")
        if not self.signed and np.any(v < 0):
            raise PreconditionError("unsigned sketch values must be nonnegative")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "signed", bool(self.signed))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class WeightedSubset:
    """Indices into a parent landmark set with one positive weight per entry.

    Indices may repeat (iid draws); each occurrence keeps its own weight.
    """

    indices: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if idx.shape != w.shape:
            raise PreconditionError("indices and weights must have equal length")
        if np.any(idx < 0):
            raise PreconditionError("indices must be nonnegative")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise PreconditionError("subset weights must be positive and finite")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.indices.size

    def validate_against(self, Q: LandmarkSet) -> None:
        if self.indices.size and self.indices.max() >= Q.n:
            raise PreconditionError("subset index out of range for landmark set")


Sketchable = Union[Hyperplane, Trajectory, Segment]


def sketch_values(obj: Sketchable, points: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(obj, Hyperplane):
        if obj.dim != points.shape[1]:
            raise DimensionMismatchError(f"hyperplane d={obj.dim}, landmarks d={points.shape[1]}")
        return points @ obj.normal + obj.offset
    if isinstance(obj, Segment):
        obj = Trajectory(np.stack([obj.a, obj.b]))
    if isinstance(obj, Trajectory):
        if obj.dim != points.shape[1]:
            raise DimensionMismatchError(f"trajectory d={obj.dim}, landmarks d={points.shape[1]}")
        return points_trajectory_distance(points, obj)
    raise TypeError(f"cannot sketch object of type {type(obj).__name__}")


def sketch(obj: Sketchable, Q: LandmarkSet) -> SketchVector:
    """MinDist sketch of ``obj`` against every landmark of ``Q``.

    Hyperplanes get signed values (dot product with the unit normal plus
    offset); segments and trajectories get Euclidean distances.
    """
    return SketchVector(sketch_values(obj, Q.points), signed=isinstance(obj, Hyperplane))


def dist_dQ(v1: SketchVector, v2: SketchVector, weights: Optional[Sequence[float]] = None) -> float:
    """Weighted Euclidean distance ``sqrt(sum_i w_i (v1_i - v2_i)^2)``.

    ``weights`` defaults to uniform ``1/n``, which is the normalised sketch
    distance.
    """
    if len(v1) != len(v2):
        raise DimensionMismatchError(f"sketch lengths differ: {len(v1)} vs {len(v2)}")
    if v1.signed != v2.signed:
        raise PreconditionError("cannot compare signed and unsigned sketches")
    diff = v1.values - v2.values
    if weights is None:
        w = np.full(diff.size, 1.0 / diff.size)
    else:
        w = np.asarray(weights, dtype=float).reshape(-1)
        if w.shape != diff.shape:
            raise DimensionMismatchError("weights must match sketch length")
        if np.any(w <= 0):
            raise PreconditionError("weights must be positive")
    return float(np.sqrt(np.sum(w * diff * diff)))


def subset_distance(v1: SketchVector, v2: SketchVector, subset: WeightedSubset) -> float:
    """Distance ``d_{Q~,W}`` evaluated on a weighted subset of the landmarks.

    ``v1`` and ``v2`` are full sketches over the parent set.
    """
    if len(v1) != len(v2) or v1.signed != v2.signed:
        raise PreconditionError("sketches must have equal length and signedness")
    diff = v1.values[subset.indices] - v2.values[subset.indices]
    return float(np.sqrt(np.sum(subset.weights * diff * diff)))
