#!/usr/bin/env python3
"""Benchmark the compiled RK4 stepping kernel against the NumPy fallback.

Times the raw kernel on a two-level coupled system and on a random 4- and
8-dimensional spec, then an end-to-end trajectory through the public API.
Run as: python benchmarks/bench_kernels.py [--steps N]
"""

import argparse
import time

import numpy as np

from waveop import EvolutionSpec, init_wave_operator, kernel_backend, step_integrate
from waveop._kernels import _ref

try:
    from waveop._kernels import _core
except ImportError:
    _core = None


def random_hermitian(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return m + m.conj().T


def kernel_args(rng, n, n_coup):
    h = random_hermitian(rng, n)
    a = -1j * h
    b = 1j * h
    coeffs = -1j * rng.normal(size=n_coup).astype(complex)
    kl = np.array([random_hermitian(rng, n) for _ in range(n_coup)])
    kr = np.array([random_hermitian(rng, n) for _ in range(n_coup)])
    rho = random_hermitian(rng, n)
    return a, b, coeffs, kl, kr, rho


def time_kernel(impl, args, dt, n_steps, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        impl.rk4_bilinear(*args, dt, n_steps)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=20000, help="RK4 steps per timing run")
    opts = parser.parse_args()

    rng = np.random.default_rng(1)
    print(f"active backend: {kernel_backend()}")
    if _core is None:
        print("compiled kernel unavailable; timing the fallback only")

    print(f"\n{'case':<24}{'python [ms]':>14}{'compiled [ms]':>16}{'speedup':>10}")
    for label, n, n_coup in (("two-level, 1 coupling", 2, 1),
                             ("dim 4, 2 couplings", 4, 2),
                             ("dim 8, 2 couplings", 8, 2)):
        args = kernel_args(rng, n, n_coup)
        dt = 1e-3
        t_py = time_kernel(_ref, args, dt, opts.steps)
        if _core is not None:
            t_c = time_kernel(_core, args, dt, opts.steps)
            out = _core.rk4_bilinear(*args, dt, 100)
            ref = _ref.rk4_bilinear(*args, dt, 100)
            assert np.max(np.abs(out - ref)) < 1e-12, "kernel implementations disagree"
            print(f"{label:<24}{1e3 * t_py:>14.2f}{1e3 * t_c:>16.2f}{t_py / t_c:>10.1f}x")
        else:
            print(f"{label:<24}{1e3 * t_py:>14.2f}{'-':>16}{'-':>10}")

    # end-to-end trajectory through the public API (uses the active backend)
    h = random_hermitian(rng, 2)
    k = random_hermitian(rng, 2)
    kp = random_hermitian(rng, 2)
    spec = EvolutionSpec(hamiltonian=h, couplings=((0.3, k, kp),))
    rho0 = init_wave_operator(np.array([1.0, 0.0], dtype=complex))
    grid = np.linspace(0.0, 20.0, 2001)
    t0 = time.perf_counter()
    step_integrate(spec, rho0, grid, dt=1e-3)
    elapsed = time.perf_counter() - t0
    print(f"\nstep_integrate, 2001 grid points, dt=1e-3 ({kernel_backend()}): {elapsed:.3f} s")


if __name__ == "__main__":
    main()
