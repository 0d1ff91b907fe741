"""Time the numba kernels against the pure-numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called once per backend before timing so numba compilation
is excluded. Outputs are compared for equality before any timing is reported.
"""

import argparse
import time

import numpy as np

from mwekit.kernels import _numpy

try:
    from mwekit.kernels import _numba
except ImportError:
    _numba = None


def cases():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 30, 400)
    b = rng.integers(0, 30, 380)
    tags = rng.integers(0, 18, 200_000).astype(np.int64)
    masks = np.array([1 << 6 | 1 << 7, 1 << 7, -1 & ((1 << 18) - 1), 1 << 7], dtype=np.int64)
    optional = np.array([False, False, True, False])
    attn = rng.random((4000, 60))
    attn /= attn.sum(axis=1, keepdims=True)
    starts = np.arange(0, 60, 3)
    return {
        "fisher_yates n=2e6": ("fisher_yates", (2_000_000, 42)),
        "splitmix64 n=2e6": ("splitmix64_stream", (7, 2_000_000)),
        "levenshtein 400x380": ("levenshtein", (a, b)),
        "longest_match 200k tags": ("longest_match_ends", (tags, masks, optional)),
        "row_entropy 4000x60": ("row_entropy", (attn,)),
        "sum_column_groups 4000x60": ("sum_column_groups", (attn, starts)),
        "mean_row_groups 4000x60": ("mean_row_groups", (attn, np.arange(0, 4000, 2))),
    }


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [("numpy", _numpy)] + ([("numba", _numba)] if _numba else [])
    print(f"{'kernel':<28}" + "".join(f"{name:>12}" for name, _ in backends) + ("     speedup" if _numba else ""))
    for label, (name, call_args) in cases().items():
        results = [getattr(mod, name)(*call_args) for _, mod in backends]
        for r in results[1:]:
            np.testing.assert_allclose(np.asarray(r), np.asarray(results[0]), rtol=1e-12, atol=1e-12)
        times = [best_of(getattr(mod, name), call_args, args.repeat) for _, mod in backends]
        row = f"{label:<28}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if _numba:
            row += f"{times[0] / times[1]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
