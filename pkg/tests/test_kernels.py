"""RK4 kernel: compiled/fallback parity and the environment kill switch."""
import os
import subprocess
import sys

import numpy as np

from polarcool import _kernels


def sample_problem(n=8, seed=11):
    rng = np.random.default_rng(seed)
    r = -np.eye(n)
    for k in range(n // 2):
        w = rng.uniform(1.0, 4.0)
        r[2 * k, 2 * k + 1] = w
        r[2 * k + 1, 2 * k] = -w
    d = np.diag(rng.uniform(0.5, 3.0, size=n))
    d = 0.5 * (d + d.T)
    v0 = np.zeros((n, n))
    return r, d, v0


def test_compiled_and_python_paths_bit_identical():
    r, d, v0 = sample_problem()
    fast = _kernels.rk4_covariance(r, d, v0, steps=400, h=0.01)
    slow = _kernels.rk4_covariance(r, d, v0, steps=400, h=0.01, force_python=True)
    assert np.array_equal(fast, slow)


def test_rk4_preserves_symmetry_to_roundoff():
    r, d, v0 = sample_problem(n=10, seed=3)
    v = _kernels.rk4_covariance(r, d, v0, steps=800, h=0.005)
    asym = np.abs(v - v.T).max()
    assert asym <= 1e-12 * np.abs(v).max()


def test_rk4_converges_to_lyapunov_fixed_point():
    # kappa = 1 on every pair, so t = 20 is deep in the steady state
    r, d, v0 = sample_problem(n=6, seed=7)
    v = _kernels.rk4_covariance(r, d, v0, steps=4000, h=0.005)
    residual = r @ v + v @ r.T + d
    assert np.abs(residual).max() < 1e-10 * np.abs(d).max()


def test_env_flag_disables_numba():
    code = (
        "import polarcool._kernels as k; import numpy as np; "
        "assert not k.HAS_NUMBA; "
        "assert k._rk4_python is k._rk4_loop; "
        "r = -np.eye(2); d = np.eye(2); v0 = np.zeros((2, 2)); "
        "v = k.rk4_covariance(r, d, v0, steps=2000, h=0.005); "
        "assert np.allclose(v, 0.5 * np.eye(2), atol=1e-10); "
        "print('fallback ok')"
    )
    env = dict(os.environ, POLARCOOL_DISABLE_NUMBA="1")
    proc = subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert "fallback ok" in proc.stdout


def test_env_flag_zero_means_enabled():
    code = (
        "import polarcool._kernels as k; "
        "import numba; "  # numba import works here, so the flag decides
        "assert k.HAS_NUMBA; print('jit ok')"
    )
    env = dict(os.environ, POLARCOOL_DISABLE_NUMBA="0")
    proc = subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert "jit ok" in proc.stdout
