"""Compare the pure-Python and compiled enumeration kernels.

Times the full admissible-word walk plus root solving for the golden-ratio
greedy/lazy pair and for an intermittent pair (which exercises the bisection
path), and verifies that both backends return identical output.

Run from the repository root:

    python benchmarks/bench_enumeration.py [--n 16 20 22] [--seed 42]
"""

import argparse
import time

import numpy as np

from randcycles import (
    GOLDEN_RATIO,
    LsvSpec,
    SampleWord,
    build_beta_system,
    build_lsv_system,
    count_admissible_words,
)
from randcycles.kernels import available_backends, build_tables, get_backend, run_enumeration


def time_backend(system, letters, backend, repeats=3):
    tables = build_tables(system)
    omega0 = np.array([v - 1 for v in letters], dtype=np.int32)
    cap = count_admissible_words(system, letters)
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = run_enumeration(tables, omega0, cap, -1, backend)
        best = min(best, time.perf_counter() - t0)
    return best, result, cap


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, nargs="+", default=[14, 18, 22])
    parser.add_argument("--lsv-n", type=int, nargs="+", default=[10, 14])
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("note: compiled kernel not available; timing the pure kernel only")

    golden = build_beta_system(GOLDEN_RATIO, p=(0.7, 0.3)).system
    lsv = build_lsv_system(LsvSpec((0.8, 1.6), (0.5, 0.5)))

    print(f"{'system':<8} {'n':>4} {'words':>9} {'cycles':>7} "
          + "".join(f"{name:>12}" for name in backends)
          + ("   speedup" if len(backends) > 1 else ""))
    for system, name, ns in ((golden, "golden", args.n), (lsv, "lsv", args.lsv_n)):
        for n in ns:
            letters = SampleWord.sample(system, args.seed, n).letters
            times = {}
            results = {}
            cap = None
            for bname, backend in backends.items():
                times[bname], results[bname], cap = time_backend(
                    system, letters, backend
                )
            first = next(iter(results.values()))
            for other in results.values():
                assert all((a == b).all() for a, b in zip(first, other)), \
                    "backends disagree"
            row = f"{name:<8} {n:>4} {cap:>9} {len(first[1]):>7} "
            row += "".join(f"{times[b] * 1e3:>10.1f}ms" for b in backends)
            if len(backends) > 1:
                row += f"   {times['pure'] / times['compiled']:>6.1f}x"
            print(row)


if __name__ == "__main__":
    main()
