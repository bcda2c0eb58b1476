"""Exact planar/Euclidean primitives used by the sketching and recovery code.

Points are plain ``numpy`` float arrays.  Composite objects (segments,
trajectories, hyperplanes, circles, rays) are small frozen dataclasses that
normalise their inputs to arrays on construction.

Lines in the plane are represented as ``(normal, offset)`` with
``normal @ x + offset == 0`` and ``|normal| == 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateCircleError,
    DegenerateHyperplaneError,
    DimensionMismatchError,
    PreconditionError,
)

REL_TOL = 1e-9


def as_point(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise PreconditionError(f"point must have finite coordinates, got {p!r}")
    return arr


def _check_dims(*arrays: np.ndarray) -> int:
    dims = {a.shape[-1] for a in arrays}
    if len(dims) != 1:
        raise DimensionMismatchError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True)
class Segment:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a, b = as_point(self.a), as_point(self.b)
        _check_dims(a, b)
        if np.array_equal(a, b):
            raise PreconditionError("segment endpoints must differ")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.a.size

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    @property
    def direction(self) -> np.ndarray:
        v = self.b - self.a
        return v / np.linalg.norm(v)


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-linear curve through ``critical_points`` (shape ``(k+1, d)``)."""

    critical_points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.critical_points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise PreconditionError("a trajectory needs at least two critical points")
        if not np.all(np.isfinite(pts)):
            raise PreconditionError("critical points must be finite")
        if np.any(np.all(pts[1:] == pts[:-1], axis=1)):
            raise PreconditionError("consecutive critical points must be distinct")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "critical_points", pts)

    @property
    def k(self) -> int:
        return self.critical_points.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.critical_points.shape[1]

    @property
    def segments(self) -> list[Segment]:
        c = self.critical_points
        return [Segment(c[j - 1], c[j]) for j in range(1, c.shape[0])]

    def reversed(self) -> "Trajectory":
        return Trajectory(self.critical_points[::-1])


@dataclass(frozen=True)
class Hyperplane:
    """Canonical hyperplane ``u[:d] @ x + u[d] == 0`` with unit normal."""

    u: np.ndarray

    def __post_init__(self):
        u = as_point(self.u)
        if u.size < 2:
            raise PreconditionError("hyperplane needs d+1 >= 2 coefficients")
        if abs(np.linalg.norm(u[:-1]) - 1.0) > 1e-12:
            raise PreconditionError("hyperplane normal must be unit length; use hyperplane_canonical")
        u = u.copy()
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def dim(self) -> int:
        return self.u.size - 1

    @property
    def normal(self) -> np.ndarray:
        return self.u[:-1]

    @property
    def offset(self) -> float:
        return float(self.u[-1])


@dataclass(frozen=True)
class Circle:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = as_point(self.center)
        if c.size != 2:
            raise DimensionMismatchError("circles are planar")
        r = float(self.radius)
        if not math.isfinite(r) or r < 0:
            raise PreconditionError(f"radius must be finite and >= 0, got {self.radius!r}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)


@dataclass(frozen=True)
class Ray:
    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        o, u = as_point(self.origin), as_point(self.direction)
        if o.size != 2 or u.size != 2:
            raise DimensionMismatchError("rays are planar")
        norm = np.linalg.norm(u)
        if norm == 0:
            raise PreconditionError("ray direction must be nonzero")
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "direction", u / norm)

    def at(self, t: float) -> np.ndarray:
        return self.origin + t * self.direction


class Line(NamedTuple):
    normal: np.ndarray
    offset: float

    def distance(self, p) -> float:
        return abs(float(self.normal @ as_point(p)) + self.offset)


# ---------------------------------------------------------------------------
# distances


def point_segment_distance(q, s: Segment) -> float:
    """Distance from ``q`` to segment ``s``.

    Uses the three-case rule: nearest endpoint when the projection falls
    outside the segment, perpendicular distance to the supporting line
    otherwise.
    """
    q = as_point(q)
    _check_dims(q, s.a)
    a, b = s.a, s.b
    if (b - a) @ (q - a) <= 0:
        return float(np.linalg.norm(q - a))
    if (a - b) @ (q - b) <= 0:
        return float(np.linalg.norm(q - b))
    ab = b - a
    t = (ab @ (q - a)) / (ab @ ab)
    return float(np.linalg.norm(q - (a + t * ab)))


def points_segments_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorised distances from ``points`` (n, d) to segments ``a[j]b[j]`` (m, d).

    Returns an ``(n, m)`` array.  Same case analysis as
    :func:`point_segment_distance`, expressed as a clamped projection.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    _check_dims(points, a, b)
    ab = b - a
    denom = np.einsum("md,md->m", ab, ab)
    diff = points[:, None, :] - a[None, :, :]
    t = np.einsum("nmd,md->nm", diff, ab) / denom
    foot = a[None, :, :] + np.clip(t, 0.0, 1.0)[..., None] * ab[None, :, :]
    # clamped feet are the endpoints themselves, not a + 1.0 * (b - a)
    foot = np.where((t <= 0.0)[..., None], a[None, :, :], foot)
    foot = np.where((t >= 1.0)[..., None], b[None, :, :], foot)
    return np.linalg.norm(points[:, None, :] - foot, axis=-1)


def points_trajectory_distance(points: np.ndarray, gamma: Trajectory) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    c = gamma.critical_points
    _check_dims(points, c)
    best = np.full(points.shape[0], np.inf)
    # one pass per segment keeps temporaries at (n, d)
    for a, b in zip(c[:-1], c[1:]):
        ab = b - a
        diff = points - a
        t = (diff @ ab) / (ab @ ab)
        foot = a + np.clip(t, 0.0, 1.0)[:, None] * ab
        foot[t <= 0.0] = a
        foot[t >= 1.0] = b
        gap = points - foot
        np.minimum(best, np.einsum("nd,nd->n", gap, gap), out=best)
    return np.sqrt(best)


def point_trajectory_distance(q, gamma: Trajectory) -> float:
    q = as_point(q)
    _check_dims(q, gamma.critical_points)
    return min(point_segment_distance(q, s) for s in gamma.segments)


# ---------------------------------------------------------------------------
# hyperplanes


def hyperplane_canonical(coeffs: Sequence[float]) -> Hyperplane:
    """Scale ``coeffs`` to a unit normal whose first nonzero entry is positive."""
    u = as_point(coeffs)
    if u.size < 2:
        raise PreconditionError("need d+1 >= 2 coefficients")
    norm = np.linalg.norm(u[:-1])
    if norm == 0:
        raise DegenerateHyperplaneError("normal part is zero; no hyperplane")
    u = u / norm
    first = u[np.flatnonzero(u)[0]]
    if first < 0:
        u = -u
    return Hyperplane(u)


def hyperplane_signed_distance(q, h: Hyperplane) -> float:
    q = as_point(q)
    if q.size != h.dim:
        raise DimensionMismatchError(f"point has d={q.size}, hyperplane d={h.dim}")
    return float(h.normal @ q + h.offset)


# ---------------------------------------------------------------------------
# circles and rays


class TangentBatch(NamedTuple):
    """Flattened common tangents for a batch of circle pairs."""

    pair: np.ndarray      # (m,) index into the input pair arrays
    normal: np.ndarray    # (m, 2)
    offset: np.ndarray    # (m,)
    foot1: np.ndarray     # (m, 2) tangency point on the first circle
    foot2: np.ndarray     # (m, 2) tangency point on the second circle


def common_tangents_batch(c1, r1, c2, r2, tol: float) -> TangentBatch:
    """All common tangent lines of the circle pairs ``(c1[p], r1[p]), (c2[p], r2[p])``.

    Radius-0 circles are points the line must pass through.  Pairs with
    coincident centres yield nothing (concentric circles share no tangent);
    callers that need to reject identical circles do so themselves.
    """
    c1 = np.atleast_2d(np.asarray(c1, dtype=float))
    c2 = np.atleast_2d(np.asarray(c2, dtype=float))
    r1 = np.atleast_1d(np.asarray(r1, dtype=float))
    r2 = np.atleast_1d(np.asarray(r2, dtype=float))
    D = c2 - c1
    dist = np.hypot(D[:, 0], D[:, 1])
    ok = dist > tol
    safe = np.where(ok, dist, 1.0)
    u = D / safe[:, None]
    uperp = np.stack([-u[:, 1], u[:, 0]], axis=1)

    small1 = r1 <= tol
    small2 = r2 <= tol

    pairs, normals, offsets, f1s, f2s = [], [], [], [], []
    for s in (1.0, -1.0):
        delta = s * r2 - r1
        ratio = delta / safe
        exists = ok & (np.abs(delta) <= dist + tol)
        if s < 0:
            # with a point circle the internal tangents repeat the external ones
            exists &= ~(small1 | small2)
        ratio = np.clip(ratio, -1.0, 1.0)
        h = np.sqrt(np.maximum(0.0, 1.0 - ratio * ratio))
        single = np.abs(delta) >= dist - tol
        h = np.where(single, 0.0, h)
        for hs in (1.0, -1.0):
            mask = exists.copy()
            if hs < 0:
                mask &= ~single
                if s > 0:
                    # two point circles: +/- normals describe the same line
                    mask &= ~(small1 & small2)
            if not mask.any():
                continue
            idx = np.flatnonzero(mask)
            n = ratio[idx, None] * u[idx] + (hs * h[idx])[:, None] * uperp[idx]
            n /= np.linalg.norm(n, axis=1)[:, None]
            b = r1[idx] - np.einsum("md,md->m", n, c1[idx])
            pairs.append(idx)
            normals.append(n)
            offsets.append(b)
            f1s.append(c1[idx] - r1[idx, None] * n)
            f2s.append(c2[idx] - (s * r2[idx])[:, None] * n)
    if not pairs:
        empty2 = np.zeros((0, 2))
        return TangentBatch(np.zeros(0, dtype=int), empty2, np.zeros(0), empty2, empty2.copy())
    return TangentBatch(
        np.concatenate(pairs),
        np.concatenate(normals),
        np.concatenate(offsets),
        np.concatenate(f1s),
        np.concatenate(f2s),
    )


def circle_common_tangents(c1: Circle, c2: Circle, tol: Optional[float] = None) -> list[Line]:
    """Every line tangent to both circles.

    Gives 4/3/2/1/0 lines for separate / externally tangent / overlapping /
    internally tangent / nested circles.  Point circles (radius 0) are
    handled as incidence constraints.
    """
    scale = max(float(np.linalg.norm(c1.center - c2.center)), c1.radius, c2.radius)
    if tol is None:
        tol = REL_TOL * max(scale, np.finfo(float).tiny)
    if np.linalg.norm(c1.center - c2.center) <= tol and abs(c1.radius - c2.radius) <= tol:
        raise DegenerateCircleError("identical circles have infinitely many common tangents")
    batch = common_tangents_batch(c1.center, [c1.radius], c2.center, [c2.radius], tol)
    return [Line(n.copy(), float(b)) for n, b in zip(batch.normal, batch.offset)]


def ray_first_disk_entry(
    ray: Ray,
    disks: Sequence[Circle],
    tol: Optional[float] = None,
    tie_window: float = 0.0,
) -> Optional[tuple[np.ndarray, Circle]]:
    """First point where ``ray`` enters one of the open ``disks``.

    Grazing contact (perpendicular distance within ``tol`` of the radius) is
    not an entry.  When several disks are entered within ``tie_window`` of
    the earliest entry, the one entered most steeply wins; its entry point
    is the best-conditioned estimate of the shared boundary point.
    """
    if not disks:
        return None
    centers = np.array([d.center for d in disks])
    radii = np.array([d.radius for d in disks])
    if tol is None:
        scale = float(np.max(np.abs(centers - ray.origin))) + float(radii.max())
        tol = REL_TOL * max(scale, np.finfo(float).tiny)
    hit = _ray_entries(ray.origin, ray.direction, centers, radii, tol, tie_window)
    if hit is None:
        return None
    t, j = hit
    return ray.at(t), disks[j]


def _ray_entries(origin, direction, centers, radii, tol, tie_window=0.0):
    w = centers - origin
    along = w @ direction
    perp2 = np.maximum(0.0, np.einsum("nd,nd->n", w, w) - along * along)
    perp = np.sqrt(perp2)
    depth = radii - perp
    entering = depth > tol
    half = np.sqrt(np.maximum(0.0, radii * radii - perp2))
    t_in = along - half
    entering &= t_in > tol
    if not entering.any():
        return None
    idx = np.flatnonzero(entering)
    t_min = t_in[idx].min()
    near = idx[t_in[idx] <= t_min + tie_window]
    j = near[np.argmax(depth[near])]
    return float(t_in[j]), int(j)


# ---------------------------------------------------------------------------
# fixtures


def adversarial_pair(q0, Q, side: float) -> tuple[Trajectory, Trajectory]:
    """Two curves whose sketches differ only at landmark ``q0``.

    ``gamma2`` traces the boundary of the axis-aligned square of the given
    side centred on ``q0``; ``gamma1`` traces the same boundary and then runs
    in to end at ``q0``.  For every landmark outside the open square the two
    distances coincide exactly, while ``dist(q0, gamma1) = 0`` and
    ``dist(q0, gamma2) = side / 2``.
    """
    q0 = as_point(q0)
    pts = np.atleast_2d(np.asarray(getattr(Q, "points", Q), dtype=float))
    if q0.size != 2 or pts.shape[1] != 2:
        raise DimensionMismatchError("adversarial_pair is planar")
    if not side > 0:
        raise PreconditionError("side must be positive")
    half = side / 2.0
    inside = np.max(np.abs(pts - q0), axis=1) < half
    n_q0 = int(np.sum(np.all(pts == q0, axis=1)))
    if n_q0 == 0:
        raise PreconditionError("q0 must be one of the landmarks")
    if int(inside.sum()) > 1 or n_q0 > 1:
        raise PreconditionError("open square around q0 must contain no other landmark")
    corners = q0 + half * np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
    loop = np.vstack([corners, corners[:1]])
    gamma2 = Trajectory(loop)
    gamma1 = Trajectory(np.vstack([loop, q0[None, :]]))
    return gamma1, gamma2
