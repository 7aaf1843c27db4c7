#!/usr/bin/env python3
"""Timing comparison of the numba kernels against the pure-numpy fallback.

The backend is fixed at import time by SEMRD_BACKEND, so this script
re-executes itself in a subprocess per backend and prints a small table.

    python3 benchmarks/bench_backends.py
"""

import os
import subprocess
import sys
import time

import numpy as np

REPEATS = 5


def run_workloads():
    from semrd import BinarySourceSpec, DistortionSpec, SolverConfig, solve_rd, sweep_results
    from semrd.distortion import ObservationMeasure, SemanticMeasure
    from semrd.kernels import BACKEND, eval_channels, ratio_products

    rng = np.random.default_rng(0)
    joint = rng.random((3, 3)) + 0.05
    joint /= joint.sum()
    p_x = joint.sum(axis=0)
    post_x = np.stack([joint[:, x] / p_x[x] for x in range(3)])
    batch = rng.random((2000, 3, 3)) + 0.02
    batch /= batch.sum(axis=2, keepdims=True)
    cost = ObservationMeasure.hamming().cost_table(3, 3)
    tv = SemanticMeasure.tv()

    eval_channels(joint, p_x, post_x, batch[:4], tv.code, None, None, cost)  # warm-up / JIT
    t0 = time.perf_counter()
    for _ in range(REPEATS):
        eval_channels(joint, p_x, post_x, batch, tv.code, None, None, cost)
    t_eval = (time.perf_counter() - t0) / REPEATS

    tab = rng.random((3, 3)) + 0.2
    x_seq = rng.integers(0, 3, size=8)
    proposals = rng.integers(0, 3, size=(5000, 8))
    ratio_products(tab, x_seq, proposals[:4])
    t0 = time.perf_counter()
    for _ in range(REPEATS):
        ratio_products(tab, x_seq, proposals)
    t_ratio = (time.perf_counter() - t0) / REPEATS

    src = BinarySourceSpec.symmetric(0.9).joint_source()
    spec = DistortionSpec.from_names("tv", "hamming")
    solve_rd(src, spec, 0.3, 0.5)  # warm-up
    t0 = time.perf_counter()
    grid = np.linspace(0.0, 1.0, 6)
    sweep_results(src, spec, grid, grid, SolverConfig())
    t_sweep = time.perf_counter() - t0

    print(f"{BACKEND:>6}  eval_channels(2000x3x3) {t_eval * 1e3:8.2f} ms   "
          f"ratio_products(5000x8) {t_ratio * 1e3:7.2f} ms   sweep(6x6) {t_sweep:6.2f} s")


def main():
    if os.environ.get("_BENCH_CHILD"):
        run_workloads()
        return
    print(f"kernel timings, mean of {REPEATS} runs (after warm-up)", flush=True)
    for backend in ("numba", "numpy"):
        env = {**os.environ, "SEMRD_BACKEND": backend, "_BENCH_CHILD": "1"}
        subprocess.run([sys.executable, os.path.abspath(__file__)], env=env, check=True)


if __name__ == "__main__":
    main()
