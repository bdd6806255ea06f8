#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure Python fallback.

Times the three hot paths behind the backend interface: the radial
integrator, the dense rational scan used by the bound minimizers, and the
expression VM (scalar and vectorized). Usage::

    python benchmarks/bench_backends.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from ellgrad import hexpr
from ellgrad.backend import available_backends
from ellgrad.geometry import make_model
from ellgrad.solver import solve_radial


def best_of(repeat, fn, *args, **kwargs):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args, **kwargs)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_integrate(bk, repeat):
    model = make_model(3, 0.0)
    h = hexpr.parse("4*s + 6")
    return best_of(repeat, solve_radial, model, h, u0=1.0, r_max=3.0,
                   tol=1e-10, backend=bk)


def bench_integrate_hyperbolic(bk, repeat):
    model = make_model(3, -1.0)
    h = hexpr.parse("c*exp(d*s)")
    return best_of(repeat, solve_radial, model, h, {"c": 0.5, "d": -1.0},
                   u0=1.0, r_max=2.0, tol=1e-10, backend=bk)


def bench_scan(bk, repeat):
    return best_of(repeat, bk.scan_rational, 18.0, 4.0, 2.0 / 3.0, -1.0,
                   2.0 / 3.0, 1_000_000)


def bench_vm_vector(bk, repeat):
    prog = hexpr.compile_program(
        hexpr.parse("c*exp(d*s) + (pi/2 - arctan(s))/(1 + s^2)"),
        {"c": 0.5, "d": -1.3},
    )
    s = np.linspace(-8.0, 8.0, 100_000)
    return best_of(repeat, bk.eval_program_many, prog, s)


def bench_vm_scalar(bk, repeat):
    prog = hexpr.compile_program(
        hexpr.parse("c*exp(d*s) + sin(s)*cos(s)"), {"c": 0.5, "d": -1.3})

    def run():
        for i in range(20_000):
            bk.eval_program(prog, -4.0 + i * 4e-4)

    return best_of(repeat, run)


BENCHES = [
    ("radial integrate, flat Gaussian, tol 1e-10", bench_integrate),
    ("radial integrate, curved, tol 1e-10", bench_integrate_hyperbolic),
    ("rational scan, 1e6 points", bench_scan),
    ("expression VM, 1e5-point vector", bench_vm_vector),
    ("expression VM, 2e4 scalar calls", bench_vm_scalar),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = available_backends()
    names = sorted(backends)
    print(f"backends: {', '.join(names)}  (best of {args.repeat})\n")
    header = f"{'benchmark':42s}" + "".join(f"{n:>12s}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    print("-" * len(header))
    for label, fn in BENCHES:
        times = {n: fn(backends[n], args.repeat) for n in names}
        row = f"{label:42s}" + "".join(f"{times[n] * 1e3:10.2f} ms" for n in names)
        if len(names) == 2:
            row += f"{times['pure'] / times['compiled']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
