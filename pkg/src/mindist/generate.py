"""Seeded synthetic inputs: landmark sets and tau-separated polylines."""
from __future__ import annotations

import math
from typing import Optional, Sequence, Union

import numpy as np

from .errors import PreconditionError
from .geometry import Trajectory
from .reconstruct import CurveClassParams, GridSpec, _angle, _seg_dist, as_rect, validate_curve
from .sketch import LandmarkSet

LANDMARK_KINDS = ("uniform", "grid", "clustered")

# step lengths in units of tau and turn angles in radians
STEP_RANGE = (1.5, 5.0)
TURN_RANGE = (math.radians(15.0), math.radians(165.0))
STEP_TRIES = 50
CURVE_ATTEMPTS = 2000


def gen_landmarks(
    kind: str,
    *,
    L: float,
    d: int,
    seed: Optional[int] = None,
    n: Optional[int] = None,
    eta: Optional[float] = None,
) -> LandmarkSet:
    """Landmarks in ``[0, L]^d``.

    ``uniform`` draws ``n`` iid points; ``grid`` takes every multiple of
    ``eta``; ``clustered`` draws ``n`` points from a tight Gaussian blob and a
    broad one (clipped to the box).  The broad blob's tail leaves isolated
    landmarks, so the density is deliberately uneven.
    """
    if not L > 0 or int(d) < 1:
        raise PreconditionError("need L > 0 and d >= 1")
    rng = np.random.default_rng(seed)
    if kind == "uniform":
        _need_n(n)
        pts = rng.random((n, d)) * L
    elif kind == "grid":
        if eta is None or not eta > 0:
            raise PreconditionError("grid landmarks need eta > 0")
        axis = eta * np.arange(0, math.floor(L / eta + 1e-9) + 1)
        mesh = np.meshgrid(*([axis] * d), indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
    elif kind == "clustered":
        _need_n(n)
        which = rng.random(n) < 0.7
        tight = 0.25 * L + rng.normal(0.0, 0.03 * L, (n, d))
        broad = 0.7 * L + rng.normal(0.0, 0.15 * L, (n, d))
        pts = np.clip(np.where(which[:, None], tight, broad), 0.0, L)
    else:
        raise PreconditionError(f"unknown landmark kind {kind!r}; expected one of {LANDMARK_KINDS}")
    return LandmarkSet(pts, L=L)


def _need_n(n) -> None:
    if n is None or int(n) < 1:
        raise PreconditionError("n must be a positive integer")


def _step_ok(pts: list, cand: np.ndarray, tau: float, rect) -> bool:
    x0, y0, x1, y1 = rect
    if min(cand[0] - x0, x1 - cand[0], cand[1] - y0, y1 - cand[1]) < tau:
        return False
    m = len(pts)  # cand becomes c_m, the new segment is s_m = c_{m-1} c_m
    if m >= 2:
        ang = _angle(pts[-2], pts[-1], cand)
        if not TURN_RANGE[0] <= math.pi - ang <= TURN_RANGE[1]:
            return False
    for j in range(m - 1):
        # earlier segment s_{j+1} against the new point
        if _seg_dist(cand, pts[j], pts[j + 1]) <= tau:
            return False
    for j in range(m - 1):
        # the new segment against earlier non-adjacent points
        if _seg_dist(pts[j], pts[-1], cand) <= tau:
            return False
    return all(np.linalg.norm(cand - p) > tau for p in pts)


def gen_curve(
    k: int,
    tau: float,
    omega: Union[float, Sequence[float]],
    seed: Optional[int] = None,
    max_attempts: int = CURVE_ATTEMPTS,
) -> Trajectory:
    """Random ``k``-segment polyline in the tau-separated class.

    A random walk with step lengths in ``STEP_RANGE * tau`` and turns in
    ``TURN_RANGE``; each step is retried up to ``STEP_TRIES`` times before
    the walk restarts.  Raises after ``max_attempts`` restarts.
    """
    if int(k) < 1:
        raise PreconditionError("k must be >= 1")
    rect = as_rect(omega)
    params = CurveClassParams(tau, rect)
    x0, y0, x1, y1 = rect
    if min(x1 - x0, y1 - y0) <= 2 * tau + STEP_RANGE[0] * tau:
        raise PreconditionError(f"domain {rect} is too small for tau={tau}")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        start = np.array([rng.uniform(x0 + tau, x1 - tau), rng.uniform(y0 + tau, y1 - tau)])
        heading = rng.uniform(0.0, 2 * math.pi)
        pts = [start]
        while len(pts) <= k:
            for _try in range(STEP_TRIES):
                h = heading
                if len(pts) >= 2:
                    h += rng.choice((-1.0, 1.0)) * rng.uniform(*TURN_RANGE)
                step = tau * rng.uniform(*STEP_RANGE)
                cand = pts[-1] + step * np.array([math.cos(h), math.sin(h)])
                if _step_ok(pts, cand, tau, rect):
                    pts.append(cand)
                    heading = h
                    break
                if len(pts) == 1:
                    heading = rng.uniform(0.0, 2 * math.pi)
            else:
                break
        if len(pts) == k + 1:
            gamma = Trajectory(np.array(pts))
            if validate_curve(gamma, params):
                return gamma
    raise PreconditionError(f"no valid curve with k={k}, tau={tau} after {max_attempts} attempts")
