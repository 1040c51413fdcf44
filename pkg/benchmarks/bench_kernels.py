"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--sizes 256 1024 4096] [--repeat 5]

Prints best-of-repeat wall times per kernel and size, the compiled/numpy
ratio, and the fast-vs-reference timing for the f-vector.
"""
import argparse
import time

import numpy as np

from filament_lab import kernels
from filament_lab.invariants import vector_f
from filament_lab.reconstruction import _branch_values, cardinal_sine_table, kernel_value
from filament_lab.spin_field import random_admissible_field


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[256, 1024, 4096])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = ["python"]
    try:
        from filament_lab import _kernels_c  # noqa: F401

        backends.append("cython")
    except ImportError:
        print("compiled extension not built; timing the numpy backend only")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<14}{'N':>6}" + "".join(f"{b:>12}" for b in backends) + ("   ratio" if len(backends) == 2 else ""))
    for n in args.sizes:
        field = random_admissible_field(n, rng)
        a, b = field.samples, rng.normal(size=(n, 3))
        table = cardinal_sine_table(n)
        k_lo, k_hi = _branch_values(n, kernel_value)
        jobs = {
            "matvec": lambda be: kernels.step_kernel_matvec(table, a, k_lo, k_hi, 2 * np.pi / n, backend=be),
            "cross_rows": lambda be: kernels.cross_rows(a, b, backend=be),
            "cross_sum": lambda be: kernels.cross_sum(a, b, backend=be),
        }
        for name, job in jobs.items():
            times = [best_of(lambda: job(be), args.repeat) for be in backends]
            row = f"{name:<14}{n:>6}" + "".join(f"{t * 1e3:>10.3f}ms" for t in times)
            if len(times) == 2:
                row += f"  {times[0] / times[1]:6.1f}x"
            print(row)
        t_ref = best_of(lambda: vector_f(field, method="reference"), args.repeat)
        t_fast = best_of(lambda: vector_f(field, method="fast"), args.repeat)
        print(f"{'f ref/fast':<14}{n:>6}{t_ref * 1e3:>10.3f}ms{t_fast * 1e3:>10.3f}ms  {t_ref / t_fast:6.1f}x")


if __name__ == "__main__":
    main()
