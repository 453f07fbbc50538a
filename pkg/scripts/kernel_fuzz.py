"""Fuzz the solid kernel with random sequences and report closure statistics.

    python3 scripts/kernel_fuzz.py --n 200 --steps 1 3
"""
from __future__ import annotations

import argparse
import sys
import time
from collections import Counter

import numpy as np

from cadseq import synth
from cadseq.errors import CadError, EmptyResult
from cadseq.kernel import execute_sequence, signed_volume, surface_area
from cadseq.metrics import dangling_edge_length, flux_enclosure_error, self_intersection_ratio


def fuzz(n: int, n_steps: int, seed: int, check_sir: bool):
    stats = Counter()
    times = []
    worst_flux = 0.0
    for i in range(n):
        seq = synth.random_sequence(np.random.default_rng([seed, n_steps, i]), n_steps)
        t0 = time.perf_counter()
        try:
            m = execute_sequence(seq)
        except EmptyResult:
            stats["empty"] += 1
            continue
        except CadError as exc:
            stats[type(exc).__name__] += 1
            continue
        finally:
            times.append(time.perf_counter() - t0)
        flux = flux_enclosure_error(m) / surface_area(m)
        worst_flux = max(worst_flux, flux)
        closed = dangling_edge_length(m) == 0.0 and flux < 1e-12 and signed_volume(m) > 0
        stats["closed" if closed else "open"] += 1
        if check_sir and self_intersection_ratio(m) > 0:
            stats["self_intersecting"] += 1
    return stats, np.array(times), worst_flux


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100, help="sequences per step count")
    ap.add_argument("--steps", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sir", action="store_true", help="also measure self intersection")
    args = ap.parse_args(argv)
    failed = False
    for k in args.steps:
        stats, times, worst = fuzz(args.n, k, args.seed, args.sir)
        print(f"steps={k}: {dict(stats)}  worst flux/area {worst:.1e}  "
              f"median {1e3 * np.median(times):.1f} ms  max {1e3 * times.max():.1f} ms")
        failed |= stats["open"] > 0
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
