#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy fallback.

Two layers:

* micro: the four hot kernel functions, called directly from both
  backend modules in this process;
* end-to-end: the two bundled Gibbs samplers run in subprocesses with
  STIEFEL_MCMC_BACKEND forced to each backend.

Usage: python benchmarks/bench_kernels.py [--quick]
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from stiefel_mcmc.kernels import _pure

try:
    from stiefel_mcmc.kernels import _speedups
except ImportError:
    _speedups = None


def timeit(fn, reps):
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def micro(quick):
    n = 50
    rng_setup = np.random.default_rng(0)
    codes = rng_setup.integers(0, 2, (n, n)).astype(np.int8)
    codes = np.triu(codes, 1) + np.triu(codes, 1).T
    np.fill_diagonal(codes, -1)
    mean = rng_setup.standard_normal((n, n))
    mean = np.ascontiguousarray(0.5 * (mean + mean.T))
    c_vec = np.ascontiguousarray(rng_setup.standard_normal(55) * 3)
    lam = np.ascontiguousarray(np.sort(rng_setup.uniform(0, 100, 49)))

    reps = 50 if quick else 400
    cases = {
        f"zfill_probit (n={n})":
            lambda mod, rng: mod.zfill_probit(mean, codes, rng),
        "mf_vector (m=55, |c|~22)":
            lambda mod, rng: mod.mf_vector(c_vec, rng),
        "bingham_spectral (q=49, spread 100)":
            lambda mod, rng: mod.bingham_spectral(lam, rng),
        "truncnorm_left (a=3)":
            lambda mod, rng: mod.truncnorm_left(3.0, rng),
    }
    mods = [("pure", _pure)] + ([("compiled", _speedups)] if _speedups else [])
    print(f"{'kernel':38s} " + "".join(f"{name:>12s}" for name, _ in mods)
          + ("     speedup" if len(mods) == 2 else ""))
    for label, call in cases.items():
        times = []
        for _, mod in mods:
            rng = np.random.default_rng(42)
            times.append(timeit(lambda: call(mod, rng), reps))
        row = f"{label:38s} " + "".join(f"{t * 1e6:10.1f}us" for t in times)
        if len(times) == 2:
            row += f"   {times[0] / times[1]:7.1f}x"
        print(row)


END_TO_END = r"""
import time, numpy as np
from stiefel_mcmc import svd_model as sm
from stiefel_mcmc import eigenmodel as em
from stiefel_mcmc.frames import random_uniform_frame
from stiefel_mcmc.kernels import BACKEND

rng = np.random.default_rng(1)
data, _ = sm.simulate_dataset(60, 40, 4, rng)
t0 = time.perf_counter()
sm.run_svd_gibbs(data, 6, sm.SvdHyperParams(), ITERS_SVD, 5, rng)
t_svd = time.perf_counter() - t0

rng = np.random.default_rng(2)
u = random_uniform_frame(50, 2, rng)
net = em.generate_network(0.0, np.array([20.0, 10.0]), u, rng)
hyper = em.EigenHyperParams(t2_lambda=50.0, t2_theta=100.0, rank=2)
t0 = time.perf_counter()
em.run_eigenmodel_gibbs(net, hyper, ITERS_EIG, 10, 10, rng)
t_eig = time.perf_counter() - t0
print(f"{BACKEND}: svd {ITERS_SVD} iters {t_svd:.2f}s | "
      f"eigenmodel {ITERS_EIG} iters {t_eig:.2f}s")
"""


def end_to_end(quick):
    iters_svd = 200 if quick else 2500
    iters_eig = 300 if quick else 10000
    code = END_TO_END.replace("ITERS_SVD", str(iters_svd)).replace(
        "ITERS_EIG", str(iters_eig))
    backends = ["pure"] + (["compiled"] if _speedups else [])
    sys.stdout.flush()
    for backend in backends:
        env = dict(os.environ, STIEFEL_MCMC_BACKEND=backend)
        subprocess.run([sys.executable, "-c", code], env=env, check=True)


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args()
    if _speedups is None:
        print("note: compiled backend not built; benchmarking pure only")
    print("== kernel microbenchmarks ==")
    micro(args.quick)
    print("\n== end-to-end Gibbs chains ==")
    end_to_end(args.quick)
