"""Command-line interface: ``gtrs solve | regularity | gen | hull-check``.

Exit codes: 0 success, 2 unbounded below (Gamma empty), 3 input error,
4 a randomized subroutine failed or a check was refuted, 5 convex-constraint
regime (reported, not solved), 1 anything else.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__
from .errors import (
    ConvexConstraintRegime,
    GTRSError,
    InputError,
    NumericalError,
    ProbabilisticFailure,
    UnboundedBelow,
)
from .generate import KINDS, generate
from .problem_io import dumps_problem, dumps_result, load_problem, save_problem

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_UNBOUNDED = 2
EXIT_INPUT = 3
EXIT_PROBABILISTIC = 4
EXIT_CONVEX_CONSTRAINT = 5


def exit_code(err):
    """Frozen mapping from exceptions to process exit codes."""
    if isinstance(err, UnboundedBelow):
        return EXIT_UNBOUNDED
    if isinstance(err, ConvexConstraintRegime):
        return EXIT_CONVEX_CONSTRAINT
    if isinstance(err, InputError):
        return EXIT_INPUT
    if isinstance(err, (ProbabilisticFailure, NumericalError)):
        return EXIT_PROBABILISTIC
    return EXIT_OTHER


def _status(err):
    return {EXIT_UNBOUNDED: "unbounded-below", EXIT_CONVEX_CONSTRAINT: "convex-constraint-regime",
            EXIT_INPUT: "input-error", EXIT_PROBABILISTIC: "probabilistic-failure"}.get(exit_code(err), "error")


def _result_file(command, args, payload, timings, include_timings):
    doc = {"tool": "gtrs", "version": __version__, "command": command, "seed": args.seed,
           "parameters": _parameters(args), **payload}
    if include_timings:
        doc["timings"] = timings
    return doc


def _parameters(args):
    skip = {"func", "output", "json", "no_timings", "seed", "file"}
    out = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    if getattr(args, "file", None) is not None:
        out["file"] = str(args.file)
    return out


def _emit(doc, args, summary):
    text = dumps_result(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        print(summary)


def _fail(command, args, err):
    code = exit_code(err)
    doc = _result_file(command, args, {"status": _status(err), "error": str(err), "exit_code": code},
                       {}, False)
    if args.json or args.output:
        _emit(doc, args, "")
    print(f"gtrs {command}: {_status(err)}: {err}", file=sys.stderr)
    return code


def _oracle_checks(pencil, report, eps):
    from .oracle import brute_opt

    if pencil.n > 50:
        return {"oracle": "skipped (n > 50)"}
    opt = brute_opt(pencil, cross_check=pencil.n <= 3)
    out = {"oracle_opt": opt.value, "oracle_method": opt.method,
           "value_in_sandwich": bool(opt.value - 1e-9 <= report.value <= opt.value + eps)}
    if report.objective is not None:
        out["objective_within_eps"] = bool(report.objective <= opt.value + eps)
    return out


def cmd_solve(args):
    from .pipeline import SolverConfig, solve

    t0 = time.perf_counter()
    try:
        prob = load_problem(args.file)
        cfg = SolverConfig(eps=args.eps, p_fail=args.prob, mode=args.mode, seed=args.seed,
                           exact_if_diagonal=args.exact_if_diagonal, early_exit=args.early_exit)
        report = solve(prob.pencil, cfg)
        if args.oracle_check:
            report.checks.update(_oracle_checks(prob.pencil, report, args.eps))
    except GTRSError as err:
        return _fail("solve", args, err)
    timings = dict(report.timings)
    timings["total"] = time.perf_counter() - t0
    doc = _result_file("solve", args, {"status": report.status, "report": report.to_dict(include_timings=False)},
                       timings, not args.no_timings)
    summary = f"value {report.value:.12g}"
    if report.objective is not None:
        summary += f"  q0(x) {report.objective:.12g}  q1(x) {report.residual:.3g}"
    summary += f"  gamma [{report.gamma_minus:.9g}, {report.gamma_plus:.9g}]"
    failed = [k for k, v in report.checks.items() if v is False]
    if failed:
        summary += "  FAILED checks: " + ", ".join(failed)
    _emit(doc, args, summary)
    return EXIT_PROBABILISTIC if failed else EXIT_OK


def cmd_regularity(args):
    from .gamma_boundary import gamma_bracket
    from .pipeline import SolverConfig, _certificate_for
    from .quad_model import normalize
    from .seeding import root_generator, split

    t0 = time.perf_counter()
    try:
        prob = load_problem(args.file)
        cfg = SolverConfig(p_fail=args.prob, seed=args.seed, exact_if_diagonal=args.exact_if_diagonal)
        p, scales = normalize(prob.pencil)
        r_cert, r_gamma = split(root_generator(args.seed), 2)
        timings = {}
        cert, regime = _certificate_for(p, scales, cfg, None, r_cert, timings)
        exact = cert.provenance == "exact-diagonal"
        if exact:
            info = _diag_info(p)
            gm, gp = info.gamma_minus, info.gamma_plus
            delta = 0.0
        else:
            delta = args.delta if args.delta is not None else cert.xi / (72 * cert.kappa)
            br = gamma_bracket(p, cert, delta, args.prob / 2, r_gamma)
            gm, gp = br.gamma_minus, br.gamma_plus
    except GTRSError as err:
        return _fail("regularity", args, err)
    s0, s1 = scales.s0, scales.s1
    payload = {
        "status": "ok",
        "regime": regime,
        "certificate": cert.to_dict(),
        "certificate_original": {"xi": cert.xi / s0, "zeta": scales.gamma_to_original(cert.zeta),
                                 "gamma_hat": scales.gamma_to_original(cert.gamma_hat)},
        "gamma_minus": scales.gamma_to_original(gm),
        "gamma_plus": scales.gamma_to_original(gp),
        "gamma_minus_normalized": gm,
        "gamma_plus_normalized": gp,
        "delta": delta,
        "scales": {"s0": s0, "s1": s1},
    }
    timings["total"] = time.perf_counter() - t0
    doc = _result_file("regularity", args, payload, timings, not args.no_timings)
    summary = (f"xi {cert.xi:.9g}  zeta {cert.zeta:.9g}  gamma_hat {cert.gamma_hat:.9g}  "
               f"gamma [{payload['gamma_minus']:.9g}, {payload['gamma_plus']:.9g}]  ({cert.provenance})")
    _emit(doc, args, summary)
    return EXIT_OK


def _diag_info(p):
    from .regularity import diag_regularity

    return diag_regularity(p.q0.A.diagonal(), p.q1.A.diagonal())


def cmd_gen(args):
    try:
        if args.n is not None and args.n < 2:
            raise InputError("n must be at least 2")
        if not 0 < args.density <= 1:
            raise InputError("density must lie in (0, 1]")
        pencil = generate(args.kind, args.n, args.density, args.seed, args.alpha)
    except GTRSError as err:
        print(f"gtrs gen: {_status(err)}: {err}", file=sys.stderr)
        return exit_code(err)
    meta = {"name": args.kind, "seed": args.seed}
    if args.kind in ("random", "banded"):
        meta["comment"] = f"n={pencil.n} density={args.density}"
    if args.kind in ("diagonal", "fixture:D"):
        meta["comment"] = f"alpha={args.alpha}"
    if args.output:
        save_problem(args.output, pencil, meta)
    else:
        print(dumps_problem(pencil, meta))
    return EXIT_OK


def cmd_hull_check(args):
    from .hull import hull_membership
    from .oracle import gamma_exact

    try:
        prob = load_problem(args.file)
        x = np.array([float(v) for v in args.x.split(",")]) if args.x else np.zeros(prob.pencil.n)
        if x.shape != (prob.pencil.n,):
            raise InputError(f"point must have {prob.pencil.n} coordinates")
        gm, gp = gamma_exact(prob.pencil).value
        inside = hull_membership(prob.pencil, gm, gp, x, args.t)
    except GTRSError as err:
        return _fail("hull-check", args, err)
    payload = {"status": "ok", "member": bool(inside), "gamma_minus": gm, "gamma_plus": gp,
               "x": x.tolist(), "t": args.t}
    doc = _result_file("hull-check", args, payload, {}, False)
    _emit(doc, args, f"{'inside' if inside else 'outside'} the hull (gamma [{gm:.9g}, {gp:.9g}])")
    return EXIT_OK


def _add_common(sp, with_file=True):
    if with_file:
        sp.add_argument("file", help="problem file (JSON)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", action="store_true", help="print the full result document")
    sp.add_argument("-o", "--output", help="also write the result document here")
    sp.add_argument("--no-timings", action="store_true", help="omit wall-clock fields")


def build_parser():
    ap = argparse.ArgumentParser(prog="gtrs", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"gtrs {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="approximate the optimal value or a solution")
    _add_common(s)
    s.add_argument("--eps", type=float, default=1e-3)
    s.add_argument("--prob", type=float, default=0.01, help="failure probability budget")
    s.add_argument("--mode", default="value",
                   choices=["value", "boundary", "inequality", "equality", "interval", "hollow"])
    s.add_argument("--oracle-check", action="store_true", help="compare against the dense oracle (n <= 50)")
    s.add_argument("--exact-if-diagonal", action="store_true")
    s.add_argument("--early-exit", action="store_true", help="stop the minimax loop when it stalls")
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("regularity", help="estimate xi, zeta, gamma_hat and the endpoints of Gamma")
    _add_common(r)
    r.add_argument("--prob", type=float, default=0.01)
    r.add_argument("--exact-if-diagonal", action="store_true")
    r.add_argument("--delta", type=float, default=None, help="endpoint accuracy (normalized units)")
    r.set_defaults(func=cmd_regularity)

    g = sub.add_parser("gen", help="write a generated problem file")
    g.add_argument("--kind", default="random", choices=list(KINDS))
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--density", type=float, default=0.3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--alpha", type=float, default=0.5, help="parameter of the diagonal family")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    h = sub.add_parser("hull-check", help="test whether (x, t) lies in the convex hull (dense oracle)")
    _add_common(h)
    h.add_argument("--x", default=None, help="comma-separated point, default 0")
    h.add_argument("--t", type=float, default=0.0)
    h.set_defaults(func=cmd_hull_check)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "eps", 1.0) <= 0 or not 0 < getattr(args, "prob", 0.5) < 1:
        print("gtrs: --eps must be positive and --prob must lie in (0, 1)", file=sys.stderr)
        return EXIT_INPUT
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
