#!/usr/bin/env python3
"""Benchmark the compiled core against the pure-Python twin.

Times the replicate kernel (sample generation + all four tests) on a few
catalog cases.  The two backends produce bit-identical rejection counts;
this script checks that, then reports throughput and speedup.

Usage:
    python benchmarks/bench_backends.py [--nmc 2000] [--cases 1a,6a,1b]
"""

from __future__ import annotations

import argparse
import time

from covadj import _pycore
from covadj.simulate import catalog

try:
    from covadj import _ccore
except ImportError:
    _ccore = None


def time_backend(core, packed, n_mc: int) -> tuple[float, list[int]]:
    t0 = time.perf_counter()
    counts, err_k, err = core.simulate_batch(packed, 0, 0.05, 42, 0, n_mc,
                                             0, None, None)
    if err_k >= 0:
        raise RuntimeError(f"replicate {err_k}: {err}")
    return time.perf_counter() - t0, counts


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nmc", type=int, default=2000,
                    help="replicates per case (default 2000)")
    ap.add_argument("--cases", default="1a,1b,6a,5b",
                    help="comma-separated catalog case ids")
    args = ap.parse_args()

    cases = catalog()
    ids = [c.strip() for c in args.cases.split(",") if c.strip()]
    print(f"replicates per case: {args.nmc}")
    print(f"{'case':>5} {'rows':>5} {'python':>12} {'compiled':>12} "
          f"{'speedup':>8}   per-replicate (c)")
    for cid in ids:
        packed = cases[cid].packed()
        rows = cases[cid].rows_per_sample
        t_py, counts_py = time_backend(_pycore, packed, args.nmc)
        if _ccore is None:
            print(f"{cid:>5} {rows:>5} {t_py:>11.3f}s {'n/a':>12} {'n/a':>8}")
            continue
        t_c, counts_c = time_backend(_ccore, packed, args.nmc)
        if counts_py != counts_c:
            raise SystemExit(f"backend disagreement on case {cid}!")
        per = t_c / args.nmc * 1e6
        print(f"{cid:>5} {rows:>5} {t_py:>11.3f}s {t_c:>11.3f}s "
              f"{t_py / t_c:>7.1f}x   {per:.1f} us")
    if _ccore is None:
        print("compiled core not built; only the pure-Python core was timed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
