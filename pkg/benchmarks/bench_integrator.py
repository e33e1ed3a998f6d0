"""Timing comparison: compiled RK4 covariance kernel vs pure-Python fallback.

Run from the repo root:

    python3 benchmarks/bench_integrator.py

Both paths execute the same algorithm on the same float64 inputs; the table
reports wall time, speedup and the worst elementwise deviation between the
two results and against the Lyapunov solver.
"""
import math
import time

import numpy as np

import polarcool as pc
from polarcool._kernels import HAS_NUMBA

TWO_PI = 2.0 * math.pi


def base_setup() -> pc.TwoModeSetup:
    mechs = (
        pc.MechanicalMode(freq=TWO_PI * 10e6, damping=TWO_PI * 100.0, bare_coupling=TWO_PI * 0.2),
        pc.MechanicalMode(freq=TWO_PI * 30e6, damping=TWO_PI * 100.0, bare_coupling=TWO_PI * 0.2),
    )
    return pc.TwoModeSetup(
        cavity_freq=TWO_PI * 10e9,
        cavity_linewidth=TWO_PI * 1e6,
        magnon_linewidth=TWO_PI * 1e6,
        mechanical_modes=mechs,
        bath_temperature=0.01,
        rabi_freq=pc.calibrate_drive(
            pc.DriveCalibration(sphere_diameter=250e-6), field_amplitude=2.7e-5
        ),
    )


def synthetic_instance(n_pairs: int, seed: int):
    """Random stable block system in the same drift/diffusion shape."""
    rng = np.random.default_rng(seed)
    n = 2 * n_pairs
    r = np.zeros((n, n))
    d = np.zeros((n, n))
    for k in range(n_pairs):
        kappa = rng.uniform(0.2, 0.8)
        omega = rng.uniform(1.0, 5.0)
        i = 2 * k
        r[i:i + 2, i:i + 2] = [[-kappa, omega], [-omega, -kappa]]
        d[i:i + 2, i:i + 2] = 2.0 * kappa * (rng.uniform(0.0, 3.0) + 0.5) * np.eye(2)
    for k in range(n_pairs - 1):
        g = rng.uniform(0.01, 0.1)
        i, j = 2 * k, 2 * (k + 1)
        r[i, j] = -g
        r[j + 1, i + 1] = g
    return r, d


def time_integration(r, d, force_python: bool, repeats: int = 3) -> tuple[float, np.ndarray]:
    best = math.inf
    v = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        v = pc.integrate_covariance(r, d, force_python=force_python)
        best = min(best, time.perf_counter() - t0)
    return best, v


def main() -> None:
    cases = []

    model = pc.build_linear_model(base_setup().params_at(0.25 * math.pi))
    cases.append(("two-mode device (8x8)", model.drift, model.diffusion))
    for n_pairs, seed in ((8, 11), (16, 12)):
        r, d = synthetic_instance(n_pairs, seed)
        cases.append((f"synthetic ({2 * n_pairs}x{2 * n_pairs})", r, d))

    if HAS_NUMBA:
        # absorb the JIT compile outside the timed region
        pc.integrate_covariance(cases[0][1], cases[0][2])
    else:
        print("numba unavailable or disabled: timing the fallback against itself\n")

    header = f"{'case':<24} {'compiled [s]':>12} {'fallback [s]':>12} {'speedup':>8} {'max diff':>10} {'vs lyap':>10}"
    print(header)
    print("-" * len(header))
    for name, r, d in cases:
        t_nb, v_nb = time_integration(r, d, force_python=False)
        t_py, v_py = time_integration(r, d, force_python=True)
        v_exact, _, _ = pc.solve_lyapunov(r, d)
        diff = float(np.abs(v_nb - v_py).max())
        scale = float(np.abs(v_exact).max())
        err = float(np.abs(v_nb - v_exact).max()) / scale
        print(f"{name:<24} {t_nb:>12.4f} {t_py:>12.4f} {t_py / t_nb:>8.1f} {diff:>10.2e} {err:>10.2e}")


if __name__ == "__main__":
    main()
