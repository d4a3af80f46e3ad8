"""Time the coset-histogram kernels: numba vs vectorised numpy vs the loop reference.

    python benchmarks/bench_kernels.py [--repeat 5] [--quick]

Every job is first checked for identical histograms across backends.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from naphase import _accel, kernels

# (kind, p, n, d, k, M, exponents, check_grad)
JOBS = [
    ("padic", 5, 1, 0, 4, 6, [[2], [3]], True),
    ("padic", 7, 1, 0, 5, 5, [[2], [3], [4]], False),
    ("padic", 5, 2, 0, 4, 4, [[2, 0], [1, 1], [0, 2], [3, 0]], False),
    ("padic", 7, 2, 1, 4, 6, [[2, 0], [1, 1], [0, 2], [2, 1]], True),
    ("laurent", 5, 1, 0, 5, 6, [[2], [3]], True),
    ("laurent", 7, 2, 0, 3, 4, [[2, 0], [1, 1], [0, 2]], False),
]


def make_args(job, rng):
    kind, p, n, d, k, M, exps, grad = job
    exps = np.array(exps, dtype=np.int64)
    T = len(exps)
    if kind == "padic":
        coefs = rng.integers(1, p ** M, size=T)
        center = rng.integers(0, p ** d, size=n) if d else np.zeros(n, np.int64)
    else:
        coefs = rng.integers(0, p, size=(T, M))
        center = np.zeros((n, M), np.int64)
        center[:, :d] = rng.integers(0, p, size=(n, d))
    return exps, coefs, center, p, d, k, M, grad


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="skip the interpreted reference")
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)

    have_numba = _accel.USE_NUMBA
    print(f"numba available: {have_numba}")
    header = f"{'kind':8} {'p':>2} {'n':>2} {'pts':>8} {'grad':>5} {'numba ms':>9} {'numpy ms':>9} {'ref ms':>9} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for job in JOBS:
        kind = job[0]
        a = make_args(job, rng)
        nb = kernels._padic_hist_nb if kind == "padic" else kernels._laurent_hist_nb
        npf = kernels._padic_hist_np if kind == "padic" else kernels._laurent_hist_np
        ref = kernels._padic_hist_py if kind == "padic" else kernels._laurent_hist_py

        base = npf(*a)
        if nb is not None:
            assert np.array_equal(nb(*a), base), "numba and numpy disagree"
        t_np = best_of(npf, a, args.repeat)
        t_nb = best_of(nb, a, args.repeat) if nb is not None else float("nan")
        if args.quick:
            t_ref = float("nan")
        else:
            assert np.array_equal(ref(*a), base), "reference and numpy disagree"
            t_ref = best_of(ref, a, 1)
        pts = job[1] ** (job[2] * (job[4] - job[3]))
        speed = t_np / t_nb if nb is not None else float("nan")
        print(f"{kind:8} {job[1]:>2} {job[2]:>2} {pts:>8} {str(job[7]):>5} "
              f"{t_nb * 1e3:9.2f} {t_np * 1e3:9.2f} {t_ref * 1e3:9.1f} {speed:8.1f}")


if __name__ == "__main__":
    main()
