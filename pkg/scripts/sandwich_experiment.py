"""Solve generated instances and compare with the dense oracle.

    python scripts/sandwich_experiment.py --count 50 --eps 1e-2 --csv sandwich.csv

One row per instance: oracle optimum, value-mode estimate, boundary-mode
objective and residual, and whether each lands in its guarantee bracket.
"""

import argparse
import csv
import sys
import time
from dataclasses import asdict, dataclass

import numpy as np

from gtrs.generate import random_instance
from gtrs.oracle import brute_opt
from gtrs.pipeline import solve


@dataclass
class SandwichConfig:
    count: int = 50
    n_min: int = 5
    n_max: int = 30
    density: float = 0.3
    eps: float = 1e-2
    p_fail: float = 0.01
    seed: int = 2024
    boundary: bool = True


def run(cfg):
    ns = np.random.default_rng(cfg.seed).integers(cfg.n_min, cfg.n_max + 1, cfg.count)
    rows = []
    for i, n in enumerate(ns):
        p = random_instance(int(n), cfg.density, 1000 + i)
        opt = brute_opt(p, cross_check=False).value
        t = time.perf_counter()
        v = solve(p, eps=cfg.eps, p_fail=cfg.p_fail, seed=i)
        row = {"instance": i, "n": int(n), "opt": opt, "value": v.value, "value_gap": v.value - opt,
               "value_ok": opt - 1e-9 <= v.value <= opt + cfg.eps, "kappa": v.certificate["kappa"],
               "value_s": time.perf_counter() - t}
        if cfg.boundary:
            t = time.perf_counter()
            b = solve(p, eps=cfg.eps, p_fail=cfg.p_fail, seed=i, mode="boundary")
            row.update(objective=b.objective, residual=b.residual, objective_gap=b.objective - opt,
                       boundary_ok=abs(b.residual) <= 1e-8 and b.objective <= opt + cfg.eps,
                       boundary_s=time.perf_counter() - t)
        rows.append(row)
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    d = SandwichConfig()
    ap.add_argument("--count", type=int, default=d.count)
    ap.add_argument("--n-min", type=int, default=d.n_min)
    ap.add_argument("--n-max", type=int, default=d.n_max)
    ap.add_argument("--density", type=float, default=d.density)
    ap.add_argument("--eps", type=float, default=d.eps)
    ap.add_argument("--prob", type=float, default=d.p_fail)
    ap.add_argument("--seed", type=int, default=d.seed)
    ap.add_argument("--no-boundary", action="store_true", help="skip the boundary-mode solve")
    ap.add_argument("--csv", default=None)
    args = ap.parse_args(argv)
    cfg = SandwichConfig(args.count, args.n_min, args.n_max, args.density, args.eps, args.prob,
                         args.seed, not args.no_boundary)
    rows = run(cfg)
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    w = csv.DictWriter(out, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
    if args.csv:
        out.close()
    summary = f"value in bracket {sum(r['value_ok'] for r in rows)}/{len(rows)}"
    if cfg.boundary:
        summary += f"; boundary contract {sum(r['boundary_ok'] for r in rows)}/{len(rows)}"
    print(f"# config {asdict(cfg)}; {summary}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
