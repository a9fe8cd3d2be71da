"""Closed form vs bisection over random parity inputs, bucketed by |r|.

Shows where an absolute 1e-10 agreement stops being representable: short
maturities annualise modest price gaps into astronomically large rates,
and past |r| ~ 5e5 the float64 spacing of r alone exceeds 1e-10.

    python scripts/oracle_sweep.py [-n 10000] [--seed 20230103]
"""

import argparse
import time

import numpy as np

from cerate.core import RateInputs, implied_cer, parity_residual, solve_rate_bisection


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("-n", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=20230103)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    rows = []
    t0 = time.perf_counter()
    while len(rows) < args.n:
        s = rng.uniform(1, 1000)
        x = RateInputs(s, rng.uniform(0, 0.1), rng.uniform(1 / 252, 3), rng.uniform(0.5 * s, 2 * s),
                       rng.uniform(0, 0.5 * s), rng.uniform(0, 0.5 * s))
        if x.denominator <= 0:
            continue
        r = implied_cer(x)
        hi = 10.0
        while parity_residual(x, hi) > 0:
            hi *= 2
        b = solve_rate_bisection(x, -1.0, hi, 1e-12)
        rows.append((r.value, abs(r.value - b.value), abs(parity_residual(x, r))))
    elapsed = time.perf_counter() - t0

    r, diff, resid = map(np.array, zip(*rows))
    print(f"{len(r)} samples in {elapsed:.2f}s; max |residual| {resid.max():.3g}")
    print(f"{'|r| bucket':>18} {'count':>7} {'max |diff|':>12} {'max rel':>10} {'> 1e-10':>8}")
    edges = [0, 1, 10, 1e2, 1e3, 1e4, 1e5, 1e6, np.inf]
    for lo, hi in zip(edges[:-1], edges[1:]):
        m = (np.abs(r) >= lo) & (np.abs(r) < hi)
        if not m.any():
            continue
        rel = diff[m] / np.maximum(1, np.abs(r[m]))
        print(f"[{lo:>7.0e}, {hi:>7.0e}) {m.sum():>7} {diff[m].max():>12.3g} {rel.max():>10.3g} {(diff[m] > 1e-10).sum():>8}")


if __name__ == "__main__":
    main()
