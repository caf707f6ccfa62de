"""Time the numba kernels against their pure-numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeat N]

Kernel timings are taken in one process (the numba variants are compiled
once before timing).  The end-to-end row runs `pdmosc verify` in two
subprocesses, once with PDMOSC_DISABLE_NUMBA=1.
"""
import argparse
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from pdmosc import _kernels as K
from pdmosc._accel import HAVE_NUMBA, jit
from pdmosc.special import gauss_laguerre


def cases():
    z = np.linspace(0.01, 120.0, 20000)
    x = np.linspace(-3.0, 40.0, 20001)
    f = np.exp(-x ** 2 / 2) * (1 + 0.1j * x)
    x0, _ = gauss_laguerre(60, 12.5, normalized=True)
    wall = 1e-6
    return {
        "laguerre n=30 on 20k points": ((30, 12.5, z), K.laguerre_loop, K.laguerre_numpy),
        "deriv4 on 20k complex points": ((f, float(x[1] - x[0])), K.deriv4_loop, K.deriv4_numpy),
        "gauss-laguerre newton k=60": ((x0 * (1 + 1e-6), 60, 12.5, 50), K.gl_newton_loop, K.gl_newton_numpy),
        "rk4 20k steps": ((1.5, 0.0, 1.0, 1.0, 0.4, 1e-3, 20000, wall), K.rk4_loop, K.rk4_numpy),
    }


def best_of(fn, args, repeat):
    number = 1
    while timeit.timeit(lambda: fn(*args), number=number) < 0.05 and number < 10 ** 5:
        number *= 4
    return min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat)) / number


def end_to_end(disable: bool) -> float:
    env = dict(os.environ, PDMOSC_DISABLE_NUMBA="1" if disable else "0")
    t = time.perf_counter()
    subprocess.run([sys.executable, "-m", "pdmosc", "verify"], env=env, check=True, capture_output=True)
    return time.perf_counter() - t


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        sys.exit("numba is unavailable or disabled; nothing to compare")
    print(f"{'kernel':34s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}")
    for name, (a, loop, vec) in cases().items():
        compiled = jit(loop)
        got, ref = compiled(*a), vec(*a)
        for u, v in zip(got if isinstance(got, tuple) else (got,), ref if isinstance(ref, tuple) else (ref,)):
            if isinstance(u, np.ndarray) and not np.allclose(u, v, rtol=1e-10, atol=1e-12, equal_nan=True):
                sys.exit(f"{name}: backends disagree")
        tn, tv = best_of(compiled, a, args.repeat), best_of(vec, a, args.repeat)
        print(f"{name:34s} {1e3 * tn:11.3f} {1e3 * tv:11.3f} {tv / tn:8.1f}")
    if not args.skip_end_to_end:
        end_to_end(False)  # fills the numba cache
        tn, tv = end_to_end(False), end_to_end(True)
        print(f"{'pdmosc verify (end to end)':34s} {1e3 * tn:11.0f} {1e3 * tv:11.0f} {tv / tn:8.1f}")


if __name__ == "__main__":
    main()
