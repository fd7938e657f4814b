"""Compare the compiled and pure-Python kernels on representative workloads.

Usage::

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import timeit

import numpy as np

from jplab import _pykernels

try:
    from jplab import _ckernels
except ImportError:
    _ckernels = None


def well(r):
    return -5.0 if r < 0.5 else 0.0


def workloads():
    rng = np.random.default_rng(0)
    profile = rng.uniform(-2, 2, 1001).astype(complex)
    k = 1.3 + 0.4j
    nodes = np.log(np.linspace(0.05, 1.0, 200))
    return {
        "volterra_forward n=1000": lambda mod: mod.volterra_forward(1e-3, profile, k, 0),
        "volterra_backward n=1000": lambda mod: mod.volterra_backward(1e-3, profile, k),
        "radial_solve m=3": lambda mod: mod.radial_solve(
            3.0, 20 + 1j, well, math.log(1e-3), [1.0, 3.0], nodes, 1e-12, 0.05, True
        ),
        "radial_solve variational": lambda mod: mod.radial_solve(
            0.0, 20 + 1j, well, math.log(1e-3), [1.0, 0.0, 0.0, 0.0], nodes, 1e-12, 0.05, False
        ),
    }


def best_of(func, repeat):
    timer = timeit.Timer(func)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'workload':28s} {'python':>12s} {'cython':>12s} {'speedup':>9s}")
    for name, call in workloads().items():
        py = best_of(lambda: call(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:28s} {py * 1e3:10.3f}ms {'-':>12s} {'-':>9s}")
            continue
        cy = best_of(lambda: call(_ckernels), args.repeat)
        print(f"{name:28s} {py * 1e3:10.3f}ms {cy * 1e3:10.3f}ms {py / cy:8.1f}x")


if __name__ == "__main__":
    main()
