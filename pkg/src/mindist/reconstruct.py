"""Exact recovery of a planar polyline from its MinDist sketch on a grid.

Every landmark ``q_i`` with value ``v_i`` defines a circle ``C_i`` of radius
``v_i`` that the curve touches but never enters.  Near a critical point the
curve is one or two straight pieces, and those pieces are the only common
tangents of nearby circles that stay clear of every open disk.  Recovery

1. flags landmarks within ``eta`` of the curve whose ``3 eta`` neighbourhood
   admits no clean tangent chord (a critical point must be close);
2. rebuilds the one or two segments around each flagged landmark from clean
   common tangents and locates the critical point where they stop;
3. chains the critical points by walking along segment rays.

Neighbourhoods are read from the implicit lattice, so per-landmark work is
constant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InconsistentSketchError, PreconditionError, UnsupportedInputError
from .geometry import Segment, Trajectory, _ray_entries, common_tangents_batch
from .sketch import LandmarkSet, SketchVector

Rect = Tuple[float, float, float, float]

PARALLEL_ANGLE = 1e-6
CLOSE_RADIUS = 16
LATTICE_SLACK = 1e-6


def as_rect(omega: Union[float, Sequence[float]]) -> Rect:
    """``side`` means ``[0, side]^2``; otherwise ``(x0, y0, x1, y1)``."""
    if np.isscalar(omega):
        side = float(omega)
        rect = (0.0, 0.0, side, side)
    else:
        vals = [float(x) for x in omega]
        if len(vals) != 4:
            raise PreconditionError("domain must be a side length or (x0, y0, x1, y1)")
        rect = tuple(vals)
    x0, y0, x1, y1 = rect
    if not (x1 > x0 and y1 > y0):
        raise PreconditionError(f"empty domain {rect}")
    return rect


def _disk_offsets(radius: int) -> np.ndarray:
    r = np.arange(-radius, radius + 1)
    a, b = np.meshgrid(r, r, indexing="ij")
    offs = np.stack([a.ravel(), b.ravel()], axis=1)
    offs = offs[(offs ** 2).sum(1) <= radius * radius]
    order = np.lexsort((offs[:, 1], offs[:, 0], (offs ** 2).sum(1)))
    return offs[order]


OFFSETS_3 = _disk_offsets(3)
OFFSETS_8 = _disk_offsets(8)


# ---------------------------------------------------------------------------
# grid


@dataclass(frozen=True)
class GridSpec:
    eta: float
    omega: Rect

    def __post_init__(self):
        if not self.eta > 0:
            raise PreconditionError("grid spacing eta must be positive")
        object.__setattr__(self, "omega", as_rect(self.omega))

    def index_range(self) -> Tuple[np.ndarray, np.ndarray]:
        x0, y0, x1, y1 = self.omega
        e = self.eta
        xs = np.arange(math.ceil(x0 / e - 1e-9), math.floor(x1 / e + 1e-9) + 1)
        ys = np.arange(math.ceil(y0 / e - 1e-9), math.floor(y1 / e + 1e-9) + 1)
        return xs, ys

    def lattice(self) -> np.ndarray:
        xs, ys = self.index_range()
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return self.eta * np.stack([gx.ravel(), gy.ravel()], axis=1).astype(float)


def build_grid(omega: Union[float, Sequence[float]], eta: float) -> LandmarkSet:
    """Lattice points ``eta * Z^2`` inside ``omega`` with uniform weights."""
    spec = GridSpec(eta, omega)
    pts = spec.lattice()
    if pts.shape[0] == 0:
        raise PreconditionError(f"no lattice point of spacing {eta} inside {spec.omega}")
    if pts.min() < 0:
        raise PreconditionError("domain must lie in the nonnegative quadrant")
    x0, y0, x1, y1 = spec.omega
    return LandmarkSet(pts, L=max(x1, y1))


class LatticeIndex:
    """Constant-time lookup from lattice coordinates to landmark indices."""

    def __init__(self, points: np.ndarray, eta: float):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise PreconditionError("reconstruction is planar")
        scaled = pts / eta
        ij = np.rint(scaled).astype(np.int64)
        if np.max(np.abs(scaled - ij)) > LATTICE_SLACK:
            raise PreconditionError(f"landmarks are not on the lattice of spacing {eta}")
        self.lo = ij.min(axis=0)
        shape = ij.max(axis=0) - self.lo + 1
        self.table = np.full(tuple(shape), -1, dtype=np.int64)
        loc = ij - self.lo
        self.table[loc[:, 0], loc[:, 1]] = np.arange(pts.shape[0])
        if np.count_nonzero(self.table >= 0) != pts.shape[0]:
            raise PreconditionError("duplicate lattice landmarks")
        self.ij = ij

    def neighbors(self, idx: np.ndarray, offsets: np.ndarray) -> np.ndarray:
        """``(m, o)`` landmark indices at ``ij[idx] + offsets``; ``-1`` if absent."""
        cells = self.ij[np.atleast_1d(idx)][:, None, :] + offsets[None, :, :] - self.lo
        shape = np.array(self.table.shape)
        inside = np.all((cells >= 0) & (cells < shape), axis=2)
        out = np.full(inside.shape, -1, dtype=np.int64)
        c = cells[inside]
        out[inside] = self.table[c[:, 0], c[:, 1]]
        return out


# ---------------------------------------------------------------------------
# curve class


@dataclass(frozen=True)
class CurveClassParams:
    tau: float
    omega: Rect

    def __post_init__(self):
        if not self.tau > 0:
            raise PreconditionError("tau must be positive")
        object.__setattr__(self, "omega", as_rect(self.omega))


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: Tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def _angle(prev: np.ndarray, c: np.ndarray, nxt: np.ndarray) -> float:
    u, w = prev - c, nxt - c
    cos = float(u @ w) / (np.linalg.norm(u) * np.linalg.norm(w))
    return math.acos(max(-1.0, min(1.0, cos)))


def _seg_dist(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    t = float(np.clip((p - a) @ ab / (ab @ ab), 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


def validate_curve(gamma: Trajectory, params: CurveClassParams, angle_tol: float = PARALLEL_ANGLE) -> ValidationReport:
    """Check membership in the tau-separated class inside ``params.omega``.

    Conditions: every interior angle lies strictly between ``angle_tol`` and
    ``pi - angle_tol``; each critical point is farther than ``tau`` from every
    non-adjacent segment and from every other critical point; and each
    critical point is at least ``tau`` inside the domain.
    """
    c = gamma.critical_points
    if c.shape[1] != 2:
        return ValidationReport(False, ("curve is not planar",))
    tau = params.tau
    x0, y0, x1, y1 = params.omega
    bad: List[str] = []
    for i, p in enumerate(c):
        margin = min(p[0] - x0, x1 - p[0], p[1] - y0, y1 - p[1])
        if margin < tau:
            bad.append(f"c{i} is {margin:.6g} from the domain boundary (< tau)")
    for i in range(1, gamma.k):
        ang = _angle(c[i - 1], c[i], c[i + 1])
        if not angle_tol < ang < math.pi - angle_tol:
            bad.append(f"angle at c{i} is {ang:.6g} rad, outside (0, pi)")
    for i in range(gamma.k + 1):
        for j in range(1, gamma.k + 1):
            if j in (i, i + 1):
                continue
            dist = _seg_dist(c[i], c[j - 1], c[j])
            if dist <= tau:
                bad.append(f"segment s{j} passes {dist:.6g} from c{i} (<= tau)")
        for j in range(i + 1, gamma.k + 1):
            dist = float(np.linalg.norm(c[i] - c[j]))
            if dist <= tau:
                bad.append(f"c{i} and c{j} are {dist:.6g} apart (<= tau)")
    return ValidationReport(not bad, tuple(bad))


# ---------------------------------------------------------------------------
# predicates


def _points_to_segments(P: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from points ``P[m, K]`` to segments ``a[m] b[m]``."""
    ax, ay = a[:, 0:1], a[:, 1:2]
    dx, dy = b[:, 0:1] - ax, b[:, 1:2] - ay
    den = dx * dx + dy * dy
    den = np.where(den > 0, den, 1.0)
    wx, wy = P[..., 0] - ax, P[..., 1] - ay
    t = np.clip((wx * dx + wy * dy) / den, 0.0, 1.0)
    ex, ey = wx - t * dx, wy - t * dy
    return np.sqrt(ex * ex + ey * ey)


def _critical_flags(
    cands: np.ndarray,
    pts: np.ndarray,
    radii: np.ndarray,
    grid: LatticeIndex,
    eta: float,
    tol: float,
    chunk: int = 256,
) -> np.ndarray:
    offs = OFFSETS_3[1:]  # drop the centre
    nb_all = grid.neighbors(cands, offs)
    out = np.ones(cands.size, dtype=bool)
    reach2 = (3.0 * eta) ** 2
    for lo in range(0, cands.size, chunk):
        nb = nb_all[lo:lo + chunk]
        rows, cols = np.nonzero(nb >= 0)
        i_idx = cands[lo:lo + chunk][rows]
        j_idx = nb[rows, cols]
        tb = common_tangents_batch(pts[i_idx], radii[i_idx], pts[j_idx], radii[j_idx], tol)
        if tb.pair.size == 0:
            continue
        row = rows[tb.pair]
        jcol = cols[tb.pair]
        qi = pts[i_idx[tb.pair]]
        n = tb.normal
        sd = np.einsum("md,md->m", n, qi) + tb.offset
        foot = qi - sd[:, None] * n
        half = np.sqrt(np.maximum(0.0, reach2 - sd * sd))
        direction = np.stack([-n[:, 1], n[:, 0]], axis=1)
        a = foot - half[:, None] * direction
        b = foot + half[:, None] * direction
        K = nb[row]
        valid = (K >= 0) & (np.arange(offs.shape[0])[None, :] != jcol[:, None])
        Kc = np.where(K >= 0, K, 0)
        dist = _points_to_segments(pts[Kc], a, b)
        blocked = valid & (dist < radii[Kc] - tol)
        clean = ~blocked.any(axis=1)
        out[lo + np.unique(row[clean])] = False
    return out


def is_critical(i: int, Q: LandmarkSet, v: SketchVector, eta: float, tol: Optional[float] = None) -> bool:
    """Whether every common tangent chord through ``B(q_i, 3 eta)`` is blocked.

    Tangent lines of ``C_i`` and ``C_j`` (``q_j`` within ``3 eta``) are clipped
    to the disk ``B(q_i, 3 eta)``; a chord is blocked when it enters the open
    disk of some other neighbour.  ``True`` means a critical point lies
    within ``3 eta`` of ``q_i``.
    """
    tol = 1e-9 * eta if tol is None else tol
    grid = LatticeIndex(Q.points, eta)
    return bool(_critical_flags(np.array([i]), Q.points, v.values, grid, eta, tol)[0])


def merge_overlapping_segments(
    segments,
    tol: float,
    angle_tol: float = 1e-8,
    origin: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """Union collinear overlapping segments; returns an ``(m, 2, 2)`` array.

    Segments are grouped by line orientation (within ``angle_tol`` radians)
    and by perpendicular offset (within ``tol``), then their parameter
    intervals on the shared line are unioned.  Members are put in a
    canonical order first, so the result does not depend on input order.
    """
    S = np.asarray([[s.a, s.b] if isinstance(s, Segment) else s for s in segments], dtype=float)
    S = S.reshape(-1, 2, 2)
    if S.shape[0] == 0:
        return S
    origin = np.zeros(2) if origin is None else np.asarray(origin, dtype=float)
    a, b = S[:, 0] - origin, S[:, 1] - origin
    d = b - a
    keep = np.hypot(d[:, 0], d[:, 1]) > tol
    a, b, d = a[keep], b[keep], d[keep]
    theta = np.mod(np.arctan2(d[:, 1], d[:, 0]), math.pi)
    theta = np.where(theta > math.pi - angle_tol, theta - math.pi, theta)
    normal = np.stack([-np.sin(theta), np.cos(theta)], axis=1)
    offset = np.einsum("md,md->m", normal, 0.5 * (a + b))

    order = np.lexsort((offset, theta))
    theta, offset, a, b = theta[order], offset[order], a[order], b[order]
    cuts = np.flatnonzero(np.diff(theta) > angle_tol) + 1
    out = []
    for grp in np.split(np.arange(theta.size), cuts):
        sub = grp[np.argsort(offset[grp], kind="stable")]
        for line in np.split(sub, np.flatnonzero(np.diff(offset[sub]) > tol) + 1):
            th = float(np.mean(theta[line]))
            off = float(np.mean(offset[line]))
            u = np.array([math.cos(th), math.sin(th)])
            nrm = np.array([-u[1], u[0]])
            ta, tb = a[line] @ u, b[line] @ u
            lo, hi = np.minimum(ta, tb), np.maximum(ta, tb)
            idx = np.lexsort((hi, lo))
            cur_lo, cur_hi = lo[idx[0]], hi[idx[0]]
            for j in idx[1:]:
                if lo[j] <= cur_hi + tol:
                    cur_hi = max(cur_hi, hi[j])
                else:
                    out.append((th, off, cur_lo, cur_hi))
                    cur_lo, cur_hi = lo[j], hi[j]
            out.append((th, off, cur_lo, cur_hi))
    res = np.empty((len(out), 2, 2))
    for m, (th, off, lo, hi) in enumerate(out):
        u = np.array([math.cos(th), math.sin(th)])
        base = origin + off * np.array([-u[1], u[0]])
        res[m, 0] = base + lo * u
        res[m, 1] = base + hi * u
    return res


# ---------------------------------------------------------------------------
# finding critical points


@dataclass(frozen=True)
class CriticalPointRecord:
    """A recovered critical point and the segments leaving it.

    Each segment starts at ``c``; one segment marks an endpoint, two mark an
    interior vertex.
    """

    c: np.ndarray
    segments: Tuple[Segment, ...]

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        if len(self.segments) not in (1, 2):
            raise PreconditionError("a critical point has one or two incident segments")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def is_endpoint(self) -> bool:
        return len(self.segments) == 1

    def directions(self) -> List[np.ndarray]:
        return [s.direction for s in self.segments]


def _clean_tangent_segments(P: np.ndarray, R: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """Common tangent pieces between tangency points that avoid every open disk."""
    jj, kk = np.triu_indices(P.shape[0], 1)
    tb = common_tangents_batch(P[jj], R[jj], P[kk], R[kk], tol)
    a, b = tb.foot1, tb.foot2
    pj, pk = jj[tb.pair], kk[tb.pair]
    alive = np.flatnonzero(np.hypot(*(b - a).T) > tol)
    blockers = np.flatnonzero(R > tol)
    # spatially scattered order: nearby disks overlap and block the same pieces
    blockers = blockers[np.argsort((np.arange(blockers.size) * 37) % max(1, blockers.size), kind="stable")]
    # cheap passes: a midpoint strictly inside another disk blocks the piece
    # (the two tangent circles cannot contain it)
    Pb = P[blockers] - P[0]
    Rb = R[blockers]
    lim = Rb * Rb - 4.0 * tol * Rb
    for stage in (slice(0, 16), slice(16, 64), slice(64, None)):
        mid = 0.5 * (a[alive] + b[alive]) - P[0]
        Ps = Pb[stage]
        d2 = (mid * mid).sum(1)[:, None] - 2.0 * mid @ Ps.T + (Ps * Ps).sum(1)[None, :]
        alive = alive[~(d2 < lim[None, stage]).any(axis=1)]
    # exact pass: distance from each disk centre to the whole piece
    dist = _points_to_segments(Pb[None, :, :], a[alive] - P[0], b[alive] - P[0])
    hit = dist < (Rb - tol)[None, :]
    hit &= (blockers[None, :] != pj[alive, None]) & (blockers[None, :] != pk[alive, None])
    alive = alive[~hit.any(axis=1)]
    return a[alive], b[alive]


def _explained(c: np.ndarray, dirs: Sequence[np.ndarray], P: np.ndarray, R: np.ndarray, tol: float) -> bool:
    """Every circle passes through ``c`` or is tangent to one of the rays from ``c``."""
    w = P - c
    ok = np.abs(np.hypot(w[:, 0], w[:, 1]) - R) <= tol
    for u in dirs:
        t = w @ u
        perp = np.abs(w[:, 0] * u[1] - w[:, 1] * u[0])
        ok |= (np.abs(perp - R) <= tol) & (t >= -tol)
    return bool(ok.all())


def _explained_many(C, D1, D2, P, R, tol, chunk: int = 2048) -> np.ndarray:
    """Row-wise :func:`_explained` for candidates ``C`` with ray directions ``D1, D2``."""
    out = np.zeros(C.shape[0], dtype=bool)
    for lo in range(0, C.shape[0], chunk):
        sl = slice(lo, lo + chunk)
        w = P[None, :, :] - C[sl, None, :]
        ok = np.abs(np.hypot(w[..., 0], w[..., 1]) - R[None, :]) <= tol
        for D in (D1[sl], D2[sl]):
            t = w[..., 0] * D[:, None, 0] + w[..., 1] * D[:, None, 1]
            perp = np.abs(w[..., 0] * D[:, None, 1] - w[..., 1] * D[:, None, 0])
            ok |= (np.abs(perp - R[None, :]) <= tol) & (t >= -tol)
        out[sl] = ok.all(axis=1)
    return out


def _far_dirs(segs: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Unit directions from ``C`` towards the farther endpoint of each segment."""
    da = np.linalg.norm(segs[:, 0] - C, axis=1)
    db = np.linalg.norm(segs[:, 1] - C, axis=1)
    far = np.where((db >= da)[:, None], segs[:, 1], segs[:, 0])
    v = far - C
    return v / np.linalg.norm(v, axis=1)[:, None]


def _far_end(seg: np.ndarray, c: np.ndarray) -> np.ndarray:
    da = np.linalg.norm(seg[0] - c)
    db = np.linalg.norm(seg[1] - c)
    return seg[1] if db >= da else seg[0]


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _find_critical(
    i: int,
    pts: np.ndarray,
    radii: np.ndarray,
    grid: LatticeIndex,
    eta: float,
    tol: float,
) -> CriticalPointRecord:
    nb = grid.neighbors(np.array([i]), OFFSETS_8)[0]
    nb = nb[nb >= 0]
    P, R = pts[nb], radii[nb]
    qi = pts[i]
    reach = 8.0 * eta
    a, b = _clean_tangent_segments(P, R, tol)
    merged = merge_overlapping_segments(np.stack([a, b], axis=1), tol, origin=qi)
    window = 1e-6 * eta

    for seg in merged:
        u = _unit(seg[1] - seg[0])
        mid = 0.5 * (seg[0] + seg[1])
        for sign in (1.0, -1.0):
            hit = _ray_entries(mid, sign * u, P, R, tol, window)
            if hit is None:
                continue
            c = mid + hit[0] * sign * u
            if np.linalg.norm(c - qi) > reach:
                continue
            if _explained(c, [-sign * u], P, R, tol):
                return CriticalPointRecord(c, (Segment(c, _far_end(seg, c)),))

    m = merged.shape[0]
    if m >= 2:
        U = merged[:, 1] - merged[:, 0]
        U /= np.linalg.norm(U, axis=1)[:, None]
        s1, s2 = np.triu_indices(m, 1)
        cross = U[s1, 0] * U[s2, 1] - U[s1, 1] * U[s2, 0]
        ok = np.abs(cross) > math.sin(PARALLEL_ANGLE)
        s1, s2, cross = s1[ok], s2[ok], cross[ok]
        # intersection of p1 + t u1 with p2 + s u2
        w = merged[s2, 0] - merged[s1, 0]
        t = (w[:, 0] * U[s2, 1] - w[:, 1] * U[s2, 0]) / cross
        C = merged[s1, 0] + t[:, None] * U[s1]
        near = np.flatnonzero(np.linalg.norm(C - qi, axis=1) <= reach)
        s1, s2, C = s1[near], s2[near], C[near]
        D1 = _far_dirs(merged[s1], C)
        D2 = _far_dirs(merged[s2], C)
        # screen against the closest circles first, then all of them
        good = np.arange(C.shape[0])
        for stage in (slice(0, 16), slice(None)):
            keep = _explained_many(C[good], D1[good], D2[good], P[stage], R[stage], tol)
            good = good[keep]
        if good.size:
            j = good[0]
            c = C[j]
            e1, e2 = _far_end(merged[s1[j]], c), _far_end(merged[s2[j]], c)
            return CriticalPointRecord(c, (Segment(c, e1), Segment(c, e2)))
    raise InconsistentSketchError(
        f"no critical point explains the sketch around landmark {i} at {qi.tolist()}"
    )


def find_critical(
    i: int,
    Q: LandmarkSet,
    v: SketchVector,
    eta: float,
    tol: Optional[float] = None,
) -> CriticalPointRecord:
    """Locate the critical point near landmark ``i`` and its incident segments.

    Clean common tangents of circles within ``8 eta`` are merged into
    candidate segments.  A segment whose extension first enters an open disk
    at a point ``c`` explaining every nearby circle gives an endpoint; otherwise
    a pair of segments whose lines meet at such a ``c`` gives an interior
    vertex.
    """
    tol = 1e-9 * eta if tol is None else tol
    grid = LatticeIndex(Q.points, eta)
    return _find_critical(i, Q.points, v.values, grid, eta, tol)


# ---------------------------------------------------------------------------
# ordering and the full pipeline


def _on_ray(origin: np.ndarray, u: np.ndarray, p: np.ndarray) -> Optional[float]:
    w = p - origin
    dist = float(np.linalg.norm(w))
    if dist == 0.0 or float(w @ u) <= 0.0:
        return None
    if abs(w[0] * u[1] - w[1] * u[0]) > math.sin(PARALLEL_ANGLE) * dist:
        return None
    return dist


def determine_order(E: Sequence[CriticalPointRecord], A: Sequence[CriticalPointRecord]) -> Trajectory:
    """Chain critical points by walking from an endpoint along segment rays."""
    if not E:
        raise UnsupportedInputError("no endpoint among the critical points (closed curve?)")
    start = E[0]
    remaining = [rec for rec in A if rec is not start]
    if len(remaining) != len(A) - 1:
        raise InconsistentSketchError("starting endpoint is not among the critical points")
    k = len(A) - 1
    if k < 1:
        raise InconsistentSketchError("need at least two critical points")
    chain = [start.c]
    u = start.directions()[0]
    for step in range(1, k + 1):
        best, best_d = None, math.inf
        for j, rec in enumerate(remaining):
            d = _on_ray(chain[-1], u, rec.c)
            if d is not None and d < best_d:
                best, best_d = j, d
        if best is None:
            raise InconsistentSketchError(f"no critical point on the ray leaving {chain[-1].tolist()}")
        rec = remaining.pop(best)
        chain.append(rec.c)
        if step < k:
            turns = [w for w in rec.directions() if abs(w[0] * u[1] - w[1] * u[0]) > math.sin(PARALLEL_ANGLE)]
            if len(turns) != 1:
                raise InconsistentSketchError(f"cannot continue the chain at {rec.c.tolist()}")
            u = turns[0]
    return Trajectory(np.array(chain))


@dataclass(frozen=True)
class RecoveryResult:
    trajectory: Trajectory
    records: Tuple[CriticalPointRecord, ...]
    flagged: int
    candidates: int


def recover_detailed(Q: LandmarkSet, v: SketchVector, eta: float, tol: Optional[float] = None) -> RecoveryResult:
    if len(v) != Q.n:
        raise PreconditionError(f"sketch has {len(v)} values for {Q.n} landmarks")
    if v.signed:
        raise PreconditionError("reconstruction needs an unsigned distance sketch")
    tol = 1e-9 * eta if tol is None else tol
    pts, radii = Q.points, v.values
    grid = LatticeIndex(pts, eta)
    cands = np.flatnonzero(radii < eta)
    flags = _critical_flags(cands, pts, radii, grid, eta, tol)
    closed = np.zeros(Q.n, dtype=bool)
    E: List[CriticalPointRecord] = []
    A: List[CriticalPointRecord] = []
    for i in cands[flags]:
        if closed[i]:
            continue
        rec = _find_critical(int(i), pts, radii, grid, eta, tol)
        A.append(rec)
        if rec.is_endpoint:
            E.append(rec)
        near = np.linalg.norm(pts[cands] - rec.c, axis=1) <= CLOSE_RADIUS * eta
        closed[cands[near]] = True
    return RecoveryResult(determine_order(E, A), tuple(A), int(flags.sum()), int(cands.size))


def recover(Q: LandmarkSet, v: SketchVector, eta: float, tol: Optional[float] = None) -> Trajectory:
    """Recover the generating polyline (up to reversal) from a grid sketch."""
    return recover_detailed(Q, v, eta, tol).trajectory
