"""Compare the numba kernels with their pure-numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N]

Both paths are called directly, so the ``DYNRAYS_NO_NUMBA`` setting does
not matter here.  The first numba call (compilation or cache load) is
excluded from the timings.
"""

import argparse
import math
import time

import numpy as np

from dynrays import _kernels as K

if not K.HAVE_NUMBA:
    raise SystemExit("numba is not installed; nothing to compare")


def best_of(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def agreement(a, b):
    """Integer outputs must match exactly; floats report the largest relative gap.

    Escape orbits are chaotic, so last-point coordinates drift apart by many
    ulps when the two libm implementations differ in the final bit.
    """
    ints = all(np.array_equal(x, y) for x, y in zip(a, b) if x.dtype.kind in "iub")
    rel = 0.0
    for x, y in zip(a, b):
        if x.dtype.kind == "f":
            ok = np.isfinite(x) & np.isfinite(y)
            scale = np.maximum(np.abs(x[ok]), 1e-300)
            if ok.any():
                rel = max(rel, float(np.max(np.abs(x[ok] - y[ok]) / scale)))
    return f"{'exact' if ints else 'MISMATCH'} (max float rel diff {rel:.1e})"


def escape_case(n=1_000_000):
    rng = np.random.default_rng(1)
    re = rng.uniform(-8, 8, n)
    im = rng.uniform(-8, 8, n)
    a = math.pi / 2
    return (re, im, a, 0.0, -a, 0.0, 50, 50.0, 1e-12, True)


def survival_case(n=1_000_000, steps=6):
    rng = np.random.default_rng(2)
    re = 10 + 2 * math.pi * rng.random(n)
    im = 2 * math.pi * rng.random(n)
    return (re, im, 0.0, 0.0, 10.0, steps, rng.random((n, steps)))


def row_case(n=20_000):
    rng = np.random.default_rng(3)
    j0 = rng.integers(0, 1000, n).astype(np.int64)
    j1 = j0 + rng.integers(0, 10**9, n)
    v = rng.uniform(-1e4, 1e4, n)
    sgn = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    gx, gw = K.gl_nodes()
    return (j0, j1, v, sgn, math.pi ** 2, 0.0, 1.6, 256, gx, gw)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    cases = [
        ("escape_orbits (1e6 points)", K.escape_orbits_nb, K.escape_orbits_np, escape_case()),
        ("survival (1e6 samples)", K.survival_nb, K.survival_np, survival_case()),
        ("row_sums (2e4 rows)", K.row_sums_nb, K.row_sums_np, row_case()),
    ]
    print(f"{'kernel':30s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}  agreement")
    for name, nb, npf, case in cases:
        t_nb, out_nb = best_of(nb, case, args.repeat)
        t_np, out_np = best_of(npf, case, args.repeat)
        outs_nb = out_nb if isinstance(out_nb, tuple) else (out_nb,)
        outs_np = out_np if isinstance(out_np, tuple) else (out_np,)
        print(f"{name:30s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f}  "
              f"{agreement(outs_nb, outs_np)}")


if __name__ == "__main__":
    main()
