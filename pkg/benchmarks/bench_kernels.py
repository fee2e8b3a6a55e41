#!/usr/bin/env python3
"""Benchmark the compiled string-distance kernels against the pure-Python
fallback on a coreference-shaped workload.

Usage: python3 benchmarks/bench_kernels.py [pair_count]
"""

import random
import sys
import time

from polyrec import _pykernels
from polyrec import kernels

try:
    from polyrec import _ckernels
except ImportError:
    _ckernels = None

NAMES = [
    "polystyrene", "polyethylene", "poly(vinyl alcohol)", "PVA", "PVAs",
    "poly(methyl methacrylate)", "PMMA", "polyaniline", "PANI",
    "poly(3-hexylthiophene)", "P3HT", "polydimethylsiloxane", "PDMS",
    "poly(lactic acid)", "PLA", "PLAs", "Nafion", "polycaprolactone",
    "poly(ethylene terephthalate)", "PET", "polypropylene", "PP",
]


def make_pairs(n, seed=7):
    rng = random.Random(seed)
    pairs = []
    for _ in range(n):
        a = rng.choice(NAMES)
        b = rng.choice(NAMES)
        if rng.random() < 0.3:  # mutate to create near-misses
            pos = rng.randrange(len(b)) if b else 0
            b = b[:pos] + rng.choice("abcs") + b[pos:]
        pairs.append((a, b))
    return pairs


def bench(fn, pairs, *args):
    start = time.perf_counter()
    acc = 0
    for a, b in pairs:
        acc += int(fn(a, b, *args))
    elapsed = time.perf_counter() - start
    return elapsed, acc


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    pairs = make_pairs(n)
    print(f"selected backend: {kernels.BACKEND}")
    print(f"workload: {n} material-name pairs\n")

    rows = []
    py_lev, acc_py = bench(_pykernels.levenshtein, pairs)
    rows.append(("levenshtein", "python", py_lev, acc_py))
    py_within, accw_py = bench(_pykernels.within_distance, pairs, 1)
    rows.append(("within_distance(k=1)", "python", py_within, accw_py))

    if _ckernels is not None:
        c_lev, acc_c = bench(_ckernels.levenshtein, pairs)
        assert acc_c == acc_py, "backends disagree"
        rows.append(("levenshtein", "c", c_lev, acc_c))
        c_within, accw_c = bench(_ckernels.within_distance, pairs, 1)
        assert accw_c == accw_py, "backends disagree"
        rows.append(("within_distance(k=1)", "c", c_within, accw_c))

    print(f"{'kernel':<22} {'backend':<8} {'seconds':>9} {'pairs/s':>12}")
    for name, backend, elapsed, _ in rows:
        print(f"{name:<22} {backend:<8} {elapsed:>9.3f} {n / elapsed:>12.0f}")

    if _ckernels is not None:
        print(
            f"\nspeedup: levenshtein {py_lev / c_lev:.1f}x, "
            f"within_distance {py_within / c_within:.1f}x"
        )
    else:
        print("\ncompiled extension not available; showing fallback only")


if __name__ == "__main__":
    main()
