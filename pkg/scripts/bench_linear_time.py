"""Wall time of the full solve on banded instances as n doubles.

    python scripts/bench_linear_time.py --exponents 13 14 15 16 --repeats 5 --csv bench.csv
"""

import argparse
import csv
import sys
import time
from dataclasses import asdict, dataclass, field
from statistics import median

from gtrs.generate import banded_certificate, banded_instance
from gtrs.pipeline import solve


@dataclass
class BenchConfig:
    exponents: list = field(default_factory=lambda: [13, 14, 15, 16])
    repeats: int = 5
    eps: float = 6.0
    mode: str = "value"
    instance_seed: int = 0
    max_ratio: float = 2.5


def run(cfg):
    cert = banded_certificate()
    rows = []
    for e in cfg.exponents:
        p = banded_instance(2**e, cfg.instance_seed)
        times, steps = [], []
        for seed in range(cfg.repeats):
            t = time.perf_counter()
            r = solve(p, eps=cfg.eps, certificate=cert, seed=seed, mode=cfg.mode)
            times.append(time.perf_counter() - t)
            steps.append(r.iterations["bracket_eig"])
        rows.append({"n": 2**e, "nnz": p.nnz, "median_s": median(times), "min_s": min(times),
                     "max_s": max(times), "median_lanczos_steps": median(steps),
                     "minimax_iterations": r.iterations["minimax"]})
    for prev, row in zip(rows, rows[1:]):
        row["ratio"] = row["median_s"] / prev["median_s"]
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    d = BenchConfig()
    ap.add_argument("--exponents", type=int, nargs="+", default=d.exponents)
    ap.add_argument("--repeats", type=int, default=d.repeats)
    ap.add_argument("--eps", type=float, default=d.eps)
    ap.add_argument("--mode", default=d.mode)
    ap.add_argument("--instance-seed", type=int, default=d.instance_seed)
    ap.add_argument("--csv", default=None, help="write rows here instead of stdout")
    args = ap.parse_args(argv)
    cfg = BenchConfig(args.exponents, args.repeats, args.eps, args.mode, args.instance_seed)
    rows = run(cfg)
    fields = ["n", "nnz", "median_s", "min_s", "max_s", "ratio", "median_lanczos_steps", "minimax_iterations"]
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    w = csv.DictWriter(out, fieldnames=fields)
    w.writeheader()
    w.writerows(rows)
    if args.csv:
        out.close()
    worst = max((r["ratio"] for r in rows[1:]), default=0.0)
    print(f"# config {asdict(cfg)}; worst doubling ratio {worst:.2f}"
          f" ({'within' if worst <= cfg.max_ratio else 'ABOVE'} {cfg.max_ratio})", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
