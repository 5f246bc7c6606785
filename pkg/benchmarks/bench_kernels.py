"""Timing comparison of the numba kernels against their pure-numpy twins.

Run twice to see both backends:

    python3 benchmarks/bench_kernels.py            # numba (default)
    RYDPUMP_PURE_NUMPY=1 python3 benchmarks/bench_kernels.py

Each invocation times the backend selected at import; the printed workload
labels are identical so the two runs can be diffed side by side.
"""

import time

import numpy as np

from rydpump import _kernels
from rydpump.dynamics import build_effective_problem, evolve_trajectories
from rydpump.hamiltonians import DriveConfig
from rydpump.lattice import LatticeSpec


def bench(label, fn, repeat=3):
    fn()  # warm-up (includes JIT compilation on the numba path)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    print(f"{label:55s} {min(times) * 1e3:10.1f} ms")
    return min(times)


def main():
    backend = "numba" if _kernels.USING_NUMBA else "numpy"
    print(f"backend: {backend}")

    spec = LatticeSpec(n_sites=6, a0=0.285, xi=1.1996)
    drive = DriveConfig(omega=1000.0, gamma_r=1e-4)
    ts = np.linspace(0.0, 100.0, 21)
    problem = build_effective_problem(spec, drive, 100.0, ts)
    psi0 = np.zeros(problem.dim, dtype=complex)
    psi0[0] = 1.0

    bench("mcwf ensemble: 6 sites, 200 trajectories, t = 100",
          lambda: evolve_trajectories(problem, psi0, n_traj=200, seed=1))

    bench("walsh subset search: exhaustive register 12, tier 6",
          lambda: _kernels.best_subset_score_exact(12, 6))

    member = np.zeros(128, dtype=np.int64)
    member[10:47] = 1
    start = float(_kernels.subset_scores(member[None, :])[0])

    def swap_search():
        m = member.copy()
        _kernels.local_search_subset(128, m, start, max_iters=4)

    bench("walsh subset search: swap descent, register 128, tier 37",
          swap_search)


if __name__ == "__main__":
    main()
