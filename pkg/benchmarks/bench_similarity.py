"""Compare the compiled similarity kernel with the pure-Python fallback.

Runs pairwise similarities over a synthetic ratings matrix with both backends,
checks they agree bit-for-bit, and prints the timings.

    python3 benchmarks/bench_similarity.py [--users N] [--items M] [--repeat R]
"""

import argparse
import time

import numpy as np

from guestlift.engine.kernels import ADJUSTED, COSINE, PEARSON, pysim

try:
    from guestlift.engine.kernels import _simcore
except ImportError:
    _simcore = None

KINDS = [("cosine", COSINE), ("pearson", PEARSON), ("adjusted_cosine", ADJUSTED)]


def synthetic_matrix(users: int, items: int, density: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    stars = rng.integers(1, 6, size=(users, items)).astype(np.float64)
    mask = rng.random((users, items)) < density
    return np.where(mask, stars, 0.0)


def column_means(matrix: np.ndarray) -> np.ndarray:
    counts = np.maximum((matrix != 0.0).sum(axis=0), 1)
    return matrix.sum(axis=0) / counts


def bench(fn, matrix, kind, means, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(matrix, kind, 2, means)
        best = min(best, time.perf_counter() - start)
    return best, result


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--users", type=int, default=300)
    parser.add_argument("--items", type=int, default=50)
    parser.add_argument("--density", type=float, default=0.3)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    matrix = synthetic_matrix(args.users, args.items, args.density, args.seed)
    means = column_means(matrix)
    print(f"matrix {args.users}x{args.items}, density {args.density}, best of {args.repeat}")

    if _simcore is None:
        print("compiled kernel not built; showing pure-Python timings only")

    for name, kind in KINDS:
        py_time, (py_sims, py_defined) = bench(pysim.pairwise_sims, matrix, kind, means, args.repeat)
        line = f"{name:16s} python {py_time * 1000:8.1f} ms"
        if _simcore is not None:
            c_time, (c_sims, c_defined) = bench(_simcore.pairwise_sims, matrix, kind, means, args.repeat)
            identical = np.array_equal(py_defined, c_defined) and np.array_equal(
                py_sims[py_defined == 1], c_sims[c_defined == 1]
            )
            line += f"   compiled {c_time * 1000:8.1f} ms   speedup {py_time / c_time:6.1f}x"
            line += "   bitwise-identical" if identical else "   MISMATCH"
        print(line)


if __name__ == "__main__":
    main()
