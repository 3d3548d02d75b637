"""Benchmark the compiled percolation kernels against the pure-Python
fallback on the two hot paths: level expansion and survival probing.

Run as: python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from assouadlab import _kernels_py

try:
    from assouadlab import _kernels
except ImportError:
    _kernels = None


def bench_expand(mod, depth: int = 10) -> tuple[float, int]:
    start = time.perf_counter()
    coords = np.zeros((1, 2), dtype=np.int64)
    for level in range(1, depth + 1):
        coords = mod.expand_level(12345, level, coords, 2, 7, 10)
    return time.perf_counter() - start, len(coords)


def bench_survival(mod, seeds: int = 200, depth: int = 12) -> tuple[float, int]:
    start = time.perf_counter()
    alive = sum(mod.survives_to_depth(s, 2, 2, 7, 10, depth)
                for s in range(seeds))
    return time.perf_counter() - start, alive


def main() -> None:
    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.append(("cython", _kernels))

    results = {}
    for name, mod in backends:
        t_exp, n_exp = bench_expand(mod)
        t_sur, n_sur = bench_survival(mod)
        results[name] = (t_exp, t_sur)
        print(f"{name:>7}: expand depth-10 ({n_exp} cubes) {t_exp:.3f}s, "
              f"survival 200 seeds depth-12 ({n_sur} alive) {t_sur:.3f}s")

    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        print(f"speedup: expand x{py[0] / cy[0]:.1f}, "
              f"survival x{py[1] / cy[1]:.1f}")

    # both backends must agree bit for bit
    if _kernels is not None:
        coords = np.zeros((1, 2), dtype=np.int64)
        for level in range(1, 9):
            a = _kernels.expand_level(7, level, coords, 2, 7, 10)
            b = _kernels_py.expand_level(7, level, coords, 2, 7, 10)
            assert np.array_equal(a, b), "backend mismatch"
            coords = a
        print("parity: ok")


if __name__ == "__main__":
    main()
