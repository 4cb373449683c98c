"""Compare the compiled and pure-Python block-Thomas kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times one kernel call (5 right-hand sides, as used by the cyclic solve) and
one full linearly implicit step per backend and N, then the dense solve for
reference.
"""

import argparse
import timeit

import numpy as np

from apcsf import fullydiscrete as fd
from apcsf import kernels
from apcsf.checks import random_cyclic_system
from apcsf.curves import ellipse, interpolate, uniform_grid


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="16,64,256,1024")
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"selected backend: {kernels.BACKEND}; available: {', '.join(sorted(kernels.BACKENDS))}")
    print(f"{'N':>6} {'backend':>8} {'kernel [us]':>12} {'step [us]':>12} {'speedup':>8}")
    for N in (int(v) for v in args.sizes.split(",")):
        s = random_cyclic_system(rng, N)
        B = rng.normal(size=(N, 2, 5))
        system = fd.assemble(interpolate(ellipse(2, 1), uniform_grid(N)), 1e-3)
        number = max(1, 20000 // N)
        times = {}
        for name in sorted(kernels.BACKENDS):
            k = kernels.BACKENDS[name]
            tk = best(lambda: k(s.lower, s.diag, s.upper, B), args.repeat, number)
            ts = best(lambda: fd.solve(system, "banded", backend=name), args.repeat, number)
            times[name] = (tk, ts)
        base = times["python"][0]
        for name, (tk, ts) in times.items():
            print(f"{N:>6} {name:>8} {tk * 1e6:>12.1f} {ts * 1e6:>12.1f} {base / tk:>7.1f}x")
        if N <= 256:
            td = best(lambda: fd.solve(system, "dense"), args.repeat, max(1, number // 10))
            print(f"{N:>6} {'dense':>8} {'':>12} {td * 1e6:>12.1f}")


if __name__ == "__main__":
    main()
