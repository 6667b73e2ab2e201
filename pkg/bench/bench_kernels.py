"""Compare the numba and pure-numpy kernel backends.

In-process timings call the ``*_jit`` and ``*_np`` variants directly on the
same inputs (after one warm-up call so compilation is excluded). With
``--end-to-end`` a full optimizer run is also timed in two subprocesses,
one per value of ``MWO_ACS_BACKEND``.

    python bench/bench_kernels.py [--repeat 20] [--end-to-end]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from mwo_acs import kernels
from mwo_acs.model import generate_synthetic_instance
from mwo_acs.objective import filter_arrays


def _cases(rng):
    x30 = rng.uniform(-30, 30, (30, 30))
    x4 = rng.uniform(0, 10, (30, 4))
    for fid in (1, 3, 5, 6, 9):
        x = x4 if fid == 9 else x30
        yield f"tf{fid} (30x{x.shape[1]})", kernels.BENCHMARK_KERNELS_JIT[fid], \
            kernels.BENCHMARK_KERNELS_NP[fid], (x,)

    inst = generate_synthetic_instance(42, 30, 150, 20)
    a = inst.arrays
    pos = rng.random((30, inst.dim))
    args = (pos, inst.t_s, inst.t_m, a.mat_concepts, a.student_req, a.required,
            a.durations, a.t_lo, a.t_hi, a.style_dist, a.penalties, a.weights, True)
    yield "acs fitness (30x4500)", kernels.acs_fitness_jit, kernels.acs_fitness_np, args
    f = tuple(filter_arrays(inst))
    yield ("acs filtered fitness (30x4500)", kernels.acs_fitness_filtered_jit,
           kernels.acs_fitness_filtered_np, args + f)

    idx = np.arange(1, 14, dtype=np.int64)
    bases = np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 29] * 3, dtype=np.int64)
    yield "halton (13x30)", kernels.halton_points_jit, kernels.halton_points_np, (idx, bases)

    ranks = np.arange(2, 62, 2, dtype=np.int64)
    yield "subset-sum (n=30, k=15)", kernels.subset_sum_counts_jit, \
        kernels.subset_sum_counts_np, (ranks, 15)


def bench_kernels(repeat):
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}  max |diff|")
    for name, fj, fn, args in _cases(rng):
        rj, rn = fj(*args), fn(*args)  # warm-up and agreement check
        diff = float(np.max(np.abs(np.asarray(rj, float) - np.asarray(rn, float))))
        tj = min(timeit.repeat(lambda: fj(*args), number=1, repeat=repeat)) * 1e3
        tn = min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat)) * 1e3
        print(f"{name:34s} {tj:11.3f} {tn:11.3f} {tn / tj:8.1f}  {diff:.2e}")


_E2E = """
import time
from mwo_acs import benchmarks, optimize, OptimizerConfig, BACKEND
f = benchmarks.get("tf5")
optimize(f, f.dim, OptimizerConfig(seed=0, max_iterations=5, bounds=(f.lower, f.upper)))
t0 = time.perf_counter()
rec = optimize(f, f.dim, OptimizerConfig(seed=1, bounds=(f.lower, f.upper)))
print(BACKEND, time.perf_counter() - t0, repr(rec.best_fitness))
"""


def bench_end_to_end():
    print("\nend-to-end: MWO on tf5, N=30, T=500")
    for backend in ("numba", "numpy"):
        env = dict(os.environ, MWO_ACS_BACKEND=backend)
        out = subprocess.run([sys.executable, "-c", _E2E], env=env, check=True,
                             capture_output=True, text=True).stdout.split()
        print(f"  {out[0]:6s} {float(out[1]):7.2f} s  best={out[2]}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args()
    bench_kernels(args.repeat)
    if args.end_to_end:
        bench_end_to_end()


if __name__ == "__main__":
    main()
