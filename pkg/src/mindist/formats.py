"""CSV and JSON file formats.

Every CSV starts with one ``# {json}`` line holding metadata (d, n, L and
whatever the table needs), then a column-name row, then data.  Floats are
written with ``repr`` so that a read-back is bit-exact.
"""
from __future__ import annotations

import csv
import json
import sys
from contextlib import contextmanager
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .coreset import Coreset
from .errors import PreconditionError
from .geometry import Trajectory
from .sensitivity import SensitivityProfile
from .sketch import LandmarkSet, SketchVector
from .streaming import StreamResult


@contextmanager
def _open_out(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_table(path: Optional[str], meta: dict, columns: Sequence[str], rows) -> None:
    with _open_out(path) as fh:
        fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def read_table(path: str) -> Tuple[dict, List[str], np.ndarray]:
    meta: dict = {}
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            text = line[1:].strip()
            if text.startswith("{"):
                meta.update(json.loads(text))
            continue
        if line.strip():
            body.append(line)
    if not body:
        raise PreconditionError(f"{path}: no table rows")
    rows = list(csv.reader(body))
    columns: List[str] = []
    if not _numeric(rows[0]):
        columns = [c.strip() for c in rows[0]]
        rows = rows[1:]
    try:
        data = np.array([[float(x) for x in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise PreconditionError(f"{path}: non-numeric entry ({exc})") from None
    if data.size == 0:
        data = data.reshape(0, len(columns))
    return meta, columns, data


def _numeric(row: Sequence[str]) -> bool:
    try:
        [float(x) for x in row]
    except ValueError:
        return False
    return True


def _coord_columns(d: int) -> List[str]:
    return [f"x_{j + 1}" for j in range(d)]


# ---------------------------------------------------------------------------
# landmarks and sketches


def write_landmarks(path: Optional[str], Q: LandmarkSet, **meta) -> None:
    head = {"kind": "landmarks", "d": Q.d, "n": Q.n, "L": Q.L, **meta}
    rows = ([i, *Q.points[i], Q.weights[i]] for i in range(Q.n))
    write_table(path, head, ["index", *_coord_columns(Q.d), "weight"], rows)


def _landmarks_from(meta: dict, columns: List[str], data: np.ndarray, extra: int) -> LandmarkSet:
    d = int(meta.get("d", data.shape[1] - 2 - extra))
    if data.shape[1] != d + 2 + extra:
        raise PreconditionError(f"expected {d + 2 + extra} columns, found {data.shape[1]}")
    order = np.argsort(data[:, 0], kind="stable")
    data = data[order]
    if not np.array_equal(data[:, 0], np.arange(data.shape[0])):
        raise PreconditionError("landmark indices must be 0..n-1")
    return LandmarkSet(data[:, 1:1 + d], data[:, 1 + d], L=meta.get("L"))


def read_landmarks(path: str) -> LandmarkSet:
    meta, columns, data = read_table(path)
    return _landmarks_from(meta, columns, data, 0)


def write_sketch(path: Optional[str], Q: LandmarkSet, v: SketchVector, **meta) -> None:
    if len(v) != Q.n:
        raise PreconditionError("sketch length does not match the landmark set")
    head = {"kind": "sketch", "d": Q.d, "n": Q.n, "L": Q.L, "signed": v.signed, **meta}
    rows = ([i, *Q.points[i], Q.weights[i], v.values[i]] for i in range(Q.n))
    write_table(path, head, ["index", *_coord_columns(Q.d), "weight", "value"], rows)


def read_sketch(path: str) -> Tuple[LandmarkSet, SketchVector, dict]:
    meta, columns, data = read_table(path)
    Q = _landmarks_from(meta, columns, data[:, :-1], 0)
    order = np.argsort(data[:, 0], kind="stable")
    v = SketchVector(data[order, -1], signed=bool(meta.get("signed", False)))
    return Q, v, meta


# ---------------------------------------------------------------------------
# profiles, coresets, streams


def write_profile(path: Optional[str], profile: SensitivityProfile, **meta) -> None:
    head = {
        "kind": profile.kind,
        "total": profile.total,
        "d": profile.d,
        "L": profile.L,
        "rho": profile.rho,
        **meta,
    }
    rows = ([i, profile.sigma[i], profile.weights[i]] for i in range(len(profile)))
    write_table(path, head, ["index", "sigma", "weight"], rows)


def read_profile(path: str) -> SensitivityProfile:
    meta, _, data = read_table(path)
    data = data[np.argsort(data[:, 0], kind="stable")]
    return SensitivityProfile(data[:, 1], data[:, 2], meta.get("kind", "unknown"), int(meta.get("d", 0)), meta.get("L"), meta.get("rho"))


def write_coreset(path: Optional[str], cs: Coreset, **meta) -> None:
    head = {"seed": cs.seed, "N": cs.N, "total_sensitivity": cs.source_profile.total, **meta}
    rows = zip(cs.indices, cs.weights)
    write_table(path, head, ["parent_index", "weight"], rows)


def read_coreset(path: str) -> Tuple[np.ndarray, np.ndarray, dict]:
    meta, _, data = read_table(path)
    return data[:, 0].astype(np.int64), data[:, 1], meta


def write_stream(path: Optional[str], result: StreamResult) -> None:
    write_table(path, result.summary(), ["parent_index", "p_i"], zip(result.indices, result.p))


def read_points(path: str) -> Tuple[np.ndarray, dict]:
    """Bare point rows ``x_1..x_d`` (an ``index`` column, if named, is dropped)."""
    meta, columns, data = read_table(path)
    if columns and columns[0] == "index":
        data = data[:, 1:]
        columns = columns[1:]
    if columns and columns[-1] == "weight":
        data = data[:, :-1]
    return data, meta


# ---------------------------------------------------------------------------
# trajectories and summaries


def write_trajectory(path: Optional[str], gamma: Trajectory, **meta) -> None:
    payload: Dict = {"critical_points": gamma.critical_points.tolist(), **meta}
    write_json(path, payload)


def read_trajectory(path: str) -> Trajectory:
    with open(path) as fh:
        payload = json.load(fh)
    if "critical_points" not in payload:
        raise PreconditionError(f"{path}: missing 'critical_points'")
    return Trajectory(np.asarray(payload["critical_points"], dtype=float))


def write_json(path: Optional[str], payload: dict) -> None:
    with _open_out(path) as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
