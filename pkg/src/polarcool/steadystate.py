"""Steady-state covariance of the linearized dynamics and derived occupations.

Two independent routes to the same answer:

* :func:`solve_lyapunov` hands R V + V R^T + D = 0 to a dense
  Bartels-Stewart factorization (scipy) and verifies the residual.
* :func:`integrate_covariance` steps dV/dt = R V + V R^T + D with a
  fixed-step fourth-order Runge-Kutta kernel until relaxation.

Keeping both alive is deliberate: they share no linear algebra beyond the
matrix product, so agreement is a real check on the construction of R and D.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._kernels import rk4_covariance
from .dynamics import LinearModel
from .errors import SolverError, UnstableSystemError, ValidationError

STABILITY_MARGIN = 1e-9
RESIDUAL_LIMIT = 1e-9
CONDITION_LIMIT = 1e12
OCCUPATION_CLAMP = -1e-9


@dataclass(frozen=True)
class StabilityInfo:
    stable: bool
    spectral_abscissa: float
    margin: float


@dataclass(frozen=True)
class SteadyState:
    """Steady-state covariance and per-mode occupations.

    ``covariance`` is None when the drift is unstable and the caller asked to
    continue anyway. ``condition_flag`` marks a solve whose conditioning
    proxy exceeded the trust threshold; the result is returned but suspect.
    """

    covariance: np.ndarray | None
    occupations: tuple[float, ...]
    stable: bool
    spectral_abscissa: float
    lyapunov_residual: float
    condition_flag: bool


def check_stability(drift: np.ndarray) -> StabilityInfo:
    """Hurwitz test with a scale-aware margin.

    The drift is called stable when every eigenvalue real part lies below
    -margin, margin = 1e-9 ||R||_F, so round-off on a marginal mode cannot
    flip the verdict between platforms.
    """
    r = np.asarray(drift, dtype=float)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ValidationError(f"drift: expected a square matrix, got shape {r.shape}")
    margin = STABILITY_MARGIN * np.linalg.norm(r)
    abscissa = float(np.linalg.eigvals(r).real.max())
    return StabilityInfo(stable=abscissa < -margin, spectral_abscissa=abscissa, margin=margin)


def solve_lyapunov(drift: np.ndarray, diffusion: np.ndarray) -> tuple[np.ndarray, float, bool]:
    """Solve R V + V R^T + D = 0 for the steady covariance V.

    Returns (V, residual, condition_flag) where residual is
    ||R V + V R^T + D||_F / ||D||_F. Raises UnstableSystemError when the
    drift fails the stability check and SolverError when the residual of an
    otherwise-accepted solve exceeds 1e-9.
    """
    r = np.asarray(drift, dtype=float)
    d = np.asarray(diffusion, dtype=float)
    if r.shape != d.shape or r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ValidationError(
            f"drift/diffusion: expected matching square matrices, got {r.shape} and {d.shape}"
        )
    if not np.allclose(d, d.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(d).max()))):
        raise ValidationError("diffusion: must be symmetric")
    info = check_stability(r)
    if not info.stable:
        raise UnstableSystemError(
            f"drift is not stable (spectral abscissa {info.spectral_abscissa:.6e})"
        )
    v = scipy.linalg.solve_continuous_lyapunov(r, -d)
    v = 0.5 * (v + v.T)
    d_norm = float(np.linalg.norm(d))
    if d_norm == 0.0:
        return v, 0.0, False
    residual = float(np.linalg.norm(r @ v + v @ r.T + d)) / d_norm
    if not math.isfinite(residual) or residual > RESIDUAL_LIMIT:
        raise SolverError(f"lyapunov residual {residual:.3e} exceeds {RESIDUAL_LIMIT:.0e}")
    # cheap conditioning proxy: large covariance from modest inputs signals
    # strong cancellation in the factored solve
    proxy = 2.0 * float(np.linalg.norm(r)) * float(np.linalg.norm(v)) / d_norm
    return v, residual, proxy > CONDITION_LIMIT


def extract_occupations(covariance: np.ndarray) -> tuple[float, ...]:
    """Per-mode effective quantum occupations n_k = (V_xx + V_yy - 1)/2.

    Values in [-1e-9, 0) are clamped to zero (round-off below vacuum);
    anything lower raises SolverError since the covariance is then unphysical.
    """
    v = np.asarray(covariance, dtype=float)
    if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2:
        raise ValidationError(f"covariance: expected an even square matrix, got shape {v.shape}")
    out = []
    for k in range(v.shape[0] // 2):
        n = 0.5 * (v[2 * k, 2 * k] + v[2 * k + 1, 2 * k + 1] - 1.0)
        if n < OCCUPATION_CLAMP:
            raise SolverError(f"mode {k}: occupation {n:.3e} below the vacuum clamp")
        out.append(max(n, 0.0))
    return tuple(out)


def integrate_covariance(
    drift: np.ndarray,
    diffusion: np.ndarray,
    v0: np.ndarray | None = None,
    t_final: float | None = None,
    dt: float | None = None,
    force_python: bool = False,
) -> np.ndarray:
    """Time-domain route to the steady covariance (fixed-step RK4).

    Defaults: v0 = vacuum (I/2), t_final = 15 / |spectral abscissa| (about
    3e-7 residual decay in the slowest covariance mode), dt = 0.05 / rho(R).
    A user-provided dt above 0.05/rho(R) is rejected rather than silently
    integrating an underresolved rotation.
    """
    r = np.asarray(drift, dtype=float)
    d = np.asarray(diffusion, dtype=float)
    if r.shape != d.shape or r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ValidationError(
            f"drift/diffusion: expected matching square matrices, got {r.shape} and {d.shape}"
        )
    eigs = np.linalg.eigvals(r)
    rho = float(np.abs(eigs).max())
    if rho == 0.0:
        raise ValidationError("drift: zero spectral radius, nothing to integrate")
    dt_max = 0.05 / rho
    if dt is None:
        dt = dt_max
    elif dt > dt_max:
        raise ValidationError(f"dt: {dt:.3e} exceeds the resolution limit {dt_max:.3e}")
    elif dt <= 0.0:
        raise ValidationError("dt: must be strictly positive")
    if t_final is None:
        abscissa = float(eigs.real.max())
        if abscissa >= 0.0:
            raise UnstableSystemError(
                f"drift is not stable (spectral abscissa {abscissa:.6e}); pass t_final explicitly"
            )
        t_final = 15.0 / abs(abscissa)
    elif t_final <= 0.0:
        raise ValidationError("t_final: must be strictly positive")
    if v0 is None:
        v0 = 0.5 * np.eye(r.shape[0])
    else:
        v0 = np.asarray(v0, dtype=float)
        if v0.shape != r.shape:
            raise ValidationError(f"v0: expected shape {r.shape}, got {v0.shape}")
    steps = int(math.ceil(t_final / dt))
    h = t_final / steps
    v = rk4_covariance(r, d, v0, steps, h, force_python=force_python)
    return 0.5 * (v + v.T)


def steady_state(model: LinearModel, require_stable: bool = True) -> SteadyState:
    """Full pipeline: stability, Lyapunov solve, occupations.

    With require_stable=False an unstable model yields covariance=None and
    NaN occupations instead of raising, so sweeps can record the row.
    """
    info = check_stability(model.drift)
    if not info.stable:
        if require_stable:
            raise UnstableSystemError(
                f"drift is not stable (spectral abscissa {info.spectral_abscissa:.6e})"
            )
        n_modes = model.drift.shape[0] // 2
        return SteadyState(
            covariance=None,
            occupations=(math.nan,) * n_modes,
            stable=False,
            spectral_abscissa=info.spectral_abscissa,
            lyapunov_residual=math.nan,
            condition_flag=False,
        )
    v, residual, flagged = solve_lyapunov(model.drift, model.diffusion)
    return SteadyState(
        covariance=v,
        occupations=extract_occupations(v),
        stable=True,
        spectral_abscissa=info.spectral_abscissa,
        lyapunov_residual=residual,
        condition_flag=flagged,
    )
