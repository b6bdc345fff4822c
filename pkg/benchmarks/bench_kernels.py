"""Benchmark the edge kernels: compiled backend vs pure numpy.

Runs each kernel on random instances of increasing size and reports the
median time per call plus the speedup.  The same script double-checks that
both backends agree to float tolerance on every instance it times.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats 200] [--seed 0]

Backend selection for library use is environment driven (SNL_BACKEND);
here both implementations are loaded side by side via get_backends().
"""

import argparse
import time

import numpy as np

from snl.kernels import get_backends

SIZES = (
    # (points, columns, density)
    (50, 3, 1.0),
    (200, 3, 0.3),
    (800, 4, 0.1),
)


def make_instance(n, k, density, rng):
    ii, jj = np.triu_indices(n, k=1)
    keep = rng.random(ii.size) < density
    edge_i = ii[keep].astype(np.int64)
    edge_j = jj[keep].astype(np.int64)
    Z = rng.standard_normal((n, k))
    dZ = rng.standard_normal((n, k))
    targets = rng.random(edge_i.size) + 0.5
    return Z, dZ, edge_i, edge_j, targets


def median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = get_backends()
    if "numba" not in backends:
        print("numba backend unavailable; timing numpy only")
    rng = np.random.default_rng(args.seed)

    header = f"{'kernel':<20} {'n':>5} {'edges':>7} {'numpy':>12} {'numba':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))

    for n, k, density in SIZES:
        Z, dZ, edge_i, edge_j, targets = make_instance(n, k, density, rng)
        numpy_impl = backends["numpy"]
        r = numpy_impl.residuals(Z, edge_i, edge_j, targets)
        calls = {
            "residuals": lambda impl: impl.residuals(Z, edge_i, edge_j, targets),
            "grad_from_residuals": lambda impl: impl.grad_from_residuals(Z, edge_i, edge_j, r),
            "hvp_from_residuals": lambda impl: impl.hvp_from_residuals(Z, dZ, edge_i, edge_j, r),
        }
        for name, call in calls.items():
            reference = call(numpy_impl)
            t_numpy = median_time(lambda: call(numpy_impl), args.repeats)
            row = f"{name:<20} {n:>5} {edge_i.size:>7} {t_numpy * 1e6:>10.1f}us"
            if "numba" in backends:
                compiled = backends["numba"]
                got = call(compiled)  # first call also warms the JIT cache
                err = float(np.max(np.abs(got - reference)))
                scale = float(np.max(np.abs(reference))) + 1.0
                if err > 1e-12 * scale:
                    raise AssertionError(f"backend mismatch on {name}: max abs diff {err:.3e}")
                t_numba = median_time(lambda: call(compiled), args.repeats)
                row += f" {t_numba * 1e6:>10.1f}us {t_numpy / t_numba:>7.1f}x"
            print(row)

    print("\nbackends agree within 1e-12 relative on every timed instance")


if __name__ == "__main__":
    main()
