"""Timing comparison of the numba-compiled kernels against the numpy path.

Run with the package installed:

    python benchmarks/bench_kernels.py

Set SPINCOH_NO_NUMBA=1 to confirm the fallback wiring (the compiled rows
then disappear).  The measurement-optimization objective is the hot kernel:
a parameter sweep evaluates it tens of thousands of times per grid point.
DMRG itself is dominated by BLAS matrix products and gains nothing from
numba, which the superblock row below demonstrates.
"""

import time

import numpy as np

from spincoh import cue, kernels
from spincoh.dmrg import DmrgConfig, dmrg_ground_state, grow_step, single_site_block
from spincoh.linalg import random_density_matrix
from spincoh.models import ModelSpec


def timeit(fn, repeat: int) -> float:
    fn()  # warm up (JIT compilation, caches)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def row(name, numpy_time, numba_time):
    if numba_time is None:
        print(f"{name:38s} {numpy_time * 1e6:12.1f}          (numba disabled)")
    else:
        print(f"{name:38s} {numpy_time * 1e6:12.1f} {numba_time * 1e6:12.1f} "
              f"{numpy_time / numba_time:9.1f}x")


def main():
    rng = np.random.default_rng(0)
    print(f"numba available and active: {kernels.HAVE_NUMBA}")
    print(f"{'kernel':38s} {'numpy [us]':>12s} {'numba [us]':>12s} {'speedup':>10s}")

    # Euler-angle unitary composition
    for n in (3, 9):
        x0 = cue.sample_euler_angles(n, rng).x0
        t_np = timeit(lambda: kernels.euler_unitary_numpy(n, x0), 2000)
        t_nb = (timeit(lambda: kernels.euler_unitary_numba(n, x0), 20000)
                if kernels.HAVE_NUMBA else None)
        row(f"euler_unitary n={n}", t_np, t_nb)

    # measurement objective, projective mode (the sweep hot path)
    rho4 = np.ascontiguousarray(random_density_matrix(9, rng).reshape(3, 3, 3, 3))
    x0 = cue.sample_euler_angles(3, rng).x0
    t_np = timeit(lambda: kernels.avg_conditional_entropy_numpy(x0, rho4, 3, 1), 2000)
    t_nb = (timeit(lambda: kernels.avg_conditional_entropy_numba(x0, rho4, 3, 1), 20000)
            if kernels.HAVE_NUMBA else None)
    row("conditional entropy, projective", t_np, t_nb)

    # measurement objective, dilated 4-outcome mode
    y = 4
    anc = np.zeros((y, y), dtype=complex)
    anc[0, 0] = 1.0
    ext = np.ascontiguousarray(
        np.kron(random_density_matrix(9, rng), anc).reshape(3, 3 * y, 3, 3 * y))
    x1 = cue.sample_euler_angles(3 * y, rng).x0
    t_np = timeit(lambda: kernels.avg_conditional_entropy_numpy(x1, ext, y, 3), 500)
    t_nb = (timeit(lambda: kernels.avg_conditional_entropy_numba(x1, ext, y, 3), 2000)
            if kernels.HAVE_NUMBA else None)
    row("conditional entropy, 4-outcome POVM", t_np, t_nb)

    # a DMRG growth step for scale: BLAS-bound, no numba involved
    spec = ModelSpec(kind="xxz", delta=1.0)
    cfg = DmrgConfig(m=64, seed=0)
    block = single_site_block(spec)
    rng2 = np.random.default_rng(0)
    for _ in range(6):
        block, _, _, _, _ = grow_step(block, block, spec, cfg, rng2)
    t_step = timeit(
        lambda: grow_step(block, block, spec, cfg, np.random.default_rng(1)), 3)
    print(f"{'dmrg growth step m=64 (BLAS-bound)':38s} {t_step * 1e6:12.1f} "
          f"{'—':>12s} {'—':>10s}")


if __name__ == "__main__":
    main()
