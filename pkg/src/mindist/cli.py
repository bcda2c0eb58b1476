"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 precondition violation,
3 inconsistent sketch.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

import numpy as np

from . import formats
from .coreset import sensitive_sample
from .errors import InconsistentSketchError, PreconditionError
from .generate import LANDMARK_KINDS, gen_curve, gen_landmarks
from .geometry import hyperplane_canonical
from .reconstruct import as_rect, recover_detailed
from .sensitivity import (
    SAMPLE_KINDS,
    ShapeRegime,
    compute_CQ,
    hyperplane_sensitivities,
    sample_size,
    total_sensitivity_bound,
)
from .sketch import dist_dQ, sketch
from .streaming import online_sample
from .verify import VerifyConfig, run_verify

EXIT_USAGE = 1
EXIT_PRECONDITION = 2
EXIT_INCONSISTENT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _child_seed(seed: Optional[int], label: str) -> int:
    """Independent per-command stream derived from the single ``--seed``."""
    entropy = 0 if seed is None else seed
    tag = [ord(ch) for ch in label]
    return int(np.random.SeedSequence([entropy, *tag]).generate_state(1, np.uint64)[0])


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# commands


def cmd_gen_landmarks(args) -> None:
    Q = gen_landmarks(args.kind, L=args.L, d=args.d, n=args.n, eta=args.eta, seed=_child_seed(args.seed, "landmarks"))
    formats.write_landmarks(args.out, Q, generator=args.kind, seed=args.seed)


def cmd_gen_curve(args) -> None:
    omega = args.omega if args.omega else args.L
    tau = args.tau
    if tau is None:
        x0, y0, x1, y1 = as_rect(omega)
        tau = min(x1 - x0, y1 - y0) / 20.0
    gamma = gen_curve(args.k, tau, omega, seed=_child_seed(args.seed, "curve"))
    formats.write_trajectory(args.out, gamma, tau=tau, seed=args.seed)


def cmd_sketch(args) -> None:
    Q = formats.read_landmarks(args.inp[0])
    if (args.curve is None) == (args.hyperplane is None):
        raise _UsageError("give exactly one of --curve or --hyperplane")
    if args.curve is not None:
        obj = formats.read_trajectory(args.curve)
    else:
        obj = hyperplane_canonical([float(x) for x in args.hyperplane.split(",")])
    formats.write_sketch(args.out, Q, sketch(obj, Q))


def cmd_dist(args) -> None:
    if len(args.inp) != 2:
        raise _UsageError("dist needs two sketch files: --in A B")
    Q1, v1, _ = formats.read_sketch(args.inp[0])
    Q2, v2, _ = formats.read_sketch(args.inp[1])
    if Q1.n != Q2.n or not np.array_equal(Q1.points, Q2.points):
        raise PreconditionError("sketches were taken over different landmark sets")
    _emit({"distance": dist_dQ(v1, v2, Q1.weights)})


def cmd_sens(args) -> None:
    Q = formats.read_landmarks(args.inp[0])
    if args.regime == "hyperplane":
        profile = hyperplane_sensitivities(Q)
        summary = {"kind": profile.kind, "total": profile.total, "n": Q.n, "d": Q.d}
    else:
        if args.rho is None:
            raise _UsageError("--rho is required for the shape regime")
        L = args.L if args.L is not None else Q.L
        profile = total_sensitivity_bound(Q, ShapeRegime(L, args.rho, Q.d, args.k))
        cq = compute_CQ(Q)
        summary = {"kind": profile.kind, "total": profile.total, "n": Q.n, "d": Q.d, "C_Q": cq.value, "C_Q_bound": cq.bound}
    formats.write_profile(args.out, profile)
    if args.out not in (None, "-"):
        _emit(summary)


def cmd_coreset(args) -> None:
    Q = formats.read_landmarks(args.inp[0])
    if args.regime.startswith("hyperplane"):
        profile = hyperplane_sensitivities(Q)
    else:
        if args.rho is None:
            raise _UsageError("--rho is required for shape regimes")
        L = args.L if args.L is not None else Q.L
        profile = total_sensitivity_bound(Q, ShapeRegime(L, args.rho, Q.d, args.k))
    N = args.N
    if N is None:
        N = sample_size(args.regime, eps=args.eps, delta=args.delta, d=Q.d, total=profile.total, k=args.k, multiplier=args.multiplier)
    seed = _child_seed(args.seed, "coreset")
    cs = sensitive_sample(Q, profile, N, seed, uniform_weights=args.uniform_weights)
    formats.write_coreset(args.out, cs, regime=args.regime)
    if args.out not in (None, "-"):
        _emit({"N": N, "seed": seed, "total_sensitivity": profile.total, "regime": args.regime})


def cmd_stream(args) -> None:
    pts, _ = formats.read_points(args.inp[0])
    rows = np.hstack([pts, np.ones((pts.shape[0], 1))])
    result = online_sample(rows, args.eps, args.delta, seed=_child_seed(args.seed, "stream"))
    formats.write_stream(args.out, result)
    if args.out not in (None, "-"):
        _emit(result.summary())


def cmd_reconstruct(args) -> None:
    Q, v, _ = formats.read_sketch(args.inp[0])
    if args.eta is None:
        raise _UsageError("--eta (grid spacing) is required")
    result = recover_detailed(Q, v, args.eta)
    formats.write_trajectory(args.out, result.trajectory)


def cmd_verify(args) -> None:
    cfg = VerifyConfig(
        regime=args.regime,
        d=args.d,
        n=args.n,
        eps=args.eps,
        delta=args.delta,
        trials=args.trials,
        pairs=args.pairs,
        L=args.L if args.L is not None else 1.0,
        rho=args.rho,
        k=args.k,
        multiplier=args.multiplier,
        N=args.N,
        landmarks=args.landmarks,
    )
    report = run_verify(cfg, seed=args.seed if args.seed is not None else 0, jobs=args.jobs)
    payload = report.as_dict()
    if not args.per_trial:
        payload.pop("trial_max")
    formats.write_json(args.out, payload)


class _UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mindist", description="MinDist sketches, sensitivity coresets, streaming and reconstruction.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, *names):
        flags = {
            "d": dict(type=int, default=2, help="dimension"),
            "L": dict(type=float, default=None, help="bounding scale / domain side"),
            "rho": dict(type=float, default=None, help="sketch-distance floor"),
            "tau": dict(type=float, default=None, help="curve separation radius"),
            "eta": dict(type=float, default=None, help="grid spacing"),
            "eps": dict(type=float, default=0.2, help="relative error"),
            "delta": dict(type=float, default=0.2, help="failure probability / ridge slack"),
            "k": dict(type=int, default=3, help="segments per curve"),
            "n": dict(type=int, default=None, help="landmark count"),
            "N": dict(type=int, default=None, help="sample count (overrides the formula)"),
            "seed": dict(type=int, default=0, help="root random seed"),
            "multiplier": dict(type=float, default=1.0, help="constant C in strong-coreset sizes"),
            "jobs": dict(type=int, default=1, help="worker processes"),
        }
        for name in names:
            sp.add_argument(f"--{name}", **flags[name])
        sp.add_argument("--out", default=None, help="output path (stdout if omitted)")

    sp = sub.add_parser("gen-landmarks", help="generate a landmark set")
    sp.add_argument("--kind", choices=LANDMARK_KINDS, default="uniform")
    common(sp, "d", "L", "eta", "n", "seed")
    sp.set_defaults(func=cmd_gen_landmarks, L=1.0)

    sp = sub.add_parser("gen-curve", help="generate a tau-separated planar polyline")
    sp.add_argument("--omega", type=float, nargs=4, metavar=("X0", "Y0", "X1", "Y1"))
    common(sp, "k", "tau", "L", "seed")
    sp.set_defaults(func=cmd_gen_curve, L=30.0)

    sp = sub.add_parser("sketch", help="sketch a curve or hyperplane against landmarks")
    sp.add_argument("--in", dest="inp", nargs=1, required=True, metavar="LANDMARKS")
    sp.add_argument("--curve", help="trajectory JSON")
    sp.add_argument("--hyperplane", help="comma-separated coefficients u_1..u_{d+1}")
    common(sp)
    sp.set_defaults(func=cmd_sketch)

    sp = sub.add_parser("dist", help="sketch distance between two sketch files")
    sp.add_argument("--in", dest="inp", nargs=2, required=True, metavar=("A", "B"))
    sp.set_defaults(func=cmd_dist)

    sp = sub.add_parser("sens", help="sensitivity profile of a landmark set")
    sp.add_argument("--in", dest="inp", nargs=1, required=True, metavar="LANDMARKS")
    sp.add_argument("--regime", choices=("hyperplane", "shape"), default="hyperplane")
    common(sp, "L", "rho", "k")
    sp.set_defaults(func=cmd_sens)

    sp = sub.add_parser("coreset", help="sensitivity-sampled coreset")
    sp.add_argument("--in", dest="inp", nargs=1, required=True, metavar="LANDMARKS")
    sp.add_argument("--regime", choices=SAMPLE_KINDS, default="hyperplane-weak")
    sp.add_argument("--uniform-weights", action="store_true", help="weights 1/N (no accuracy claim)")
    common(sp, "L", "rho", "eps", "delta", "k", "N", "seed", "multiplier")
    sp.set_defaults(func=cmd_coreset)

    sp = sub.add_parser("stream", help="online row sampling over a point stream")
    sp.add_argument("--in", dest="inp", nargs=1, required=True, metavar="POINTS")
    common(sp, "eps", "delta", "seed")
    sp.set_defaults(func=cmd_stream, eps=0.5, delta=0.05)

    sp = sub.add_parser("reconstruct", help="recover a polyline from a grid sketch")
    sp.add_argument("--in", dest="inp", nargs=1, required=True, metavar="SKETCH")
    common(sp, "eta")
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("verify", help="Monte Carlo coreset accuracy report")
    sp.add_argument("--regime", choices=SAMPLE_KINDS, required=True)
    sp.add_argument("--trials", type=int, default=400)
    sp.add_argument("--pairs", type=int, default=1, help="object pairs per trial")
    sp.add_argument("--landmarks", choices=LANDMARK_KINDS[::2], default="uniform")
    sp.add_argument("--per-trial", action="store_true", help="include per-trial max errors")
    common(sp, "d", "L", "rho", "eps", "delta", "k", "n", "N", "seed", "multiplier", "jobs")
    sp.set_defaults(func=cmd_verify, n=2000)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except _UsageError as exc:
        print(f"mindist {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"mindist {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InconsistentSketchError as exc:
        print(f"mindist {args.command}: inconsistent sketch: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except PreconditionError as exc:
        print(f"mindist {args.command}: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    return 0


if __name__ == "__main__":
    sys.exit(main())
