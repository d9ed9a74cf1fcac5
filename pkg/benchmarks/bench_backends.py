#!/usr/bin/env python3
"""Timing comparison of the compiled and pure-Python kernel backends.

Micro-benchmarks call both kernel modules directly in one process; the
end-to-end row re-runs a full adaptive integration in a subprocess per
backend, since the backend is chosen once at import.

Usage: python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import os
import random
import subprocess
import sys
import time

from lhdeform import _kernels_py

try:
    from lhdeform import _kernels
except ImportError:
    _kernels = None


def best_of(repeat, fn):
    return min(timed(fn) for _ in range(repeat))


def timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def shc_args(n):
    rng = random.Random(7)
    return [rng.uniform(-2.0, 2.0) for _ in range(n)]


def rhs_args(family, n):
    rng = random.Random(31)
    out = []
    for _ in range(n):
        if family == "mp":
            x = rng.choice((-1.0, 1.0)) * rng.uniform(0.3, 2.5)
            out.append((x, rng.uniform(-2.0, 2.0), 0.3, 4.0, 1.0, 0.2, 0.7))
        elif family == "cr":
            v = rng.choice((-1.0, 1.0)) * rng.uniform(0.3, 2.5)
            out.append((rng.uniform(-2.0, 2.0), v, 0.3, 1.0, 0.2, 0.7))
        else:
            mid = rng.uniform(-1.2, 1.2)
            half = rng.uniform(0.2, 1.2)
            out.append((mid + half, mid - half, 0.3, 1.0, 0.2, 0.7))
    return out


def bench_shc(mod, args):
    f = mod.shc

    def run():
        for x in args:
            f(x)
    return run


def bench_rhs(fn, args):
    def run():
        for a in args:
            fn(*a)
    return run


INTEGRATE_CHILD = """
import time
from lhdeform.backend import BACKEND
from lhdeform.coeffexpr import as_function
from lhdeform.integrator import integrate
from lhdeform.sl2systems import assemble_system, build_realization, \
    mp_coefficients

system = assemble_system(build_realization("mp", 0.3, 4.0),
                         mp_coefficients(as_function("1 + 0.2 * cos(t)")))
rhs = lambda t, y: system.rhs(t, y[0], y[1])
best = float("inf")
for _ in range({repeat}):
    t0 = time.perf_counter()
    integrate(rhs, (1.0, 0.0), (0.0, 50.0), rtol=1e-10, atol=1e-12)
    best = min(best, time.perf_counter() - t0)
print(BACKEND, best)
"""


def bench_integrate(repeat, pure):
    env = dict(os.environ)
    if pure:
        env["LHDEFORM_PURE"] = "1"
    else:
        env.pop("LHDEFORM_PURE", None)
    proc = subprocess.run([sys.executable, "-c",
                           INTEGRATE_CHILD.format(repeat=repeat)],
                          capture_output=True, text=True, env=env, check=True)
    backend, best = proc.stdout.split()
    want = "pure" if pure else "compiled"
    if backend != want:
        raise SystemExit(f"subprocess picked backend {backend!r}, "
                         f"wanted {want!r} (extension not built?)")
    return float(best)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5,
                        help="take the best of N timings (default 5)")
    args = parser.parse_args(argv)

    if _kernels is None:
        print("compiled extension not importable; micro rows show pure only",
              file=sys.stderr)

    rows = []
    xs = shc_args(200_000)
    rows.append(("shc x200k", bench_shc(_kernels_py, xs),
                 None if _kernels is None else bench_shc(_kernels, xs)))
    for family, fn_name in (("mp", "mp_rhs"), ("cr", "cr_rhs"),
                            ("2r", "r2_rhs")):
        calls = rhs_args(family, 50_000)
        rows.append((f"{fn_name} x50k",
                     bench_rhs(getattr(_kernels_py, fn_name), calls),
                     None if _kernels is None
                     else bench_rhs(getattr(_kernels, fn_name), calls)))

    print(f"{'kernel':<22} {'pure [s]':>10} {'compiled [s]':>13} {'speedup':>8}")
    for name, pure_fn, fast_fn in rows:
        t_pure = best_of(args.repeat, pure_fn)
        if fast_fn is None:
            print(f"{name:<22} {t_pure:>10.4f} {'-':>13} {'-':>8}")
            continue
        t_fast = best_of(args.repeat, fast_fn)
        print(f"{name:<22} {t_pure:>10.4f} {t_fast:>13.4f} "
              f"{t_pure / t_fast:>7.1f}x")

    t_pure = bench_integrate(args.repeat, pure=True)
    if _kernels is None:
        print(f"{'integrate t=0..50':<22} {t_pure:>10.4f} {'-':>13} {'-':>8}")
    else:
        t_fast = bench_integrate(args.repeat, pure=False)
        print(f"{'integrate t=0..50':<22} {t_pure:>10.4f} {t_fast:>13.4f} "
              f"{t_pure / t_fast:>7.1f}x")


if __name__ == "__main__":
    main()
