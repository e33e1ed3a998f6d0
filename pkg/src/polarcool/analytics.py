"""Closed-form sideband-cooling estimates for cross-checking the covariance route.

Each polariton acts on each mechanical mode as a structured bath, scattering
drive quanta to its red (anti-Stokes) and blue (Stokes) sidebands. The rate
asymmetry gives an extra mechanical damping and a radiation-pressure noise
floor; both follow from the drift-matrix parameters alone, so agreement with
the Lyapunov-solver occupations is a nontrivial consistency check in the
weak-coupling regime and a quantified divergence outside it.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import LinearModel
from .errors import ValidationError
from .model import PolaritonBasis, SystemParams, thermal_occupation


@dataclass(frozen=True)
class CoolingRates:
    """Per-mechanical-mode scattering rates and occupation estimates.

    ``stokes``/``anti_stokes``/``net`` carry one entry per polariton
    (net = anti_stokes - stokes, the polariton's damping contribution).
    ``n_eff`` keeps only the dominant polariton (largest anti-Stokes rate),
    ``n_eff_all`` sums all of them; either is math.inf when the net rates
    turn the mode's total damping nonpositive (runaway heating, no steady
    occupation in this approximation). ``weak_coupling`` is False when any
    effective coupling exceeds half its polariton linewidth, where these
    perturbative forms are known to degrade.
    """

    mode_index: int
    stokes: tuple[float, ...]
    anti_stokes: tuple[float, ...]
    net: tuple[float, ...]
    kappa_eff: float
    n_eff: float
    n_eff_all: float
    dominant: int
    weak_coupling: bool


def sideband_rates(
    coupling: float, linewidth: float, detuning: float, mech_freq: float
) -> tuple[float, float]:
    """(Stokes, anti-Stokes) rates of one polariton on one mechanical mode.

    A_pm = kappa g^2 / (4 [kappa^2 + (Delta pm omega)^2]); red detuning
    (Delta ~ +omega) makes the anti-Stokes term resonant and cools.
    """
    if linewidth <= 0.0:
        raise ValidationError("linewidth: must be strictly positive")
    g2 = coupling * coupling
    stokes = linewidth * g2 / (4.0 * (linewidth**2 + (detuning + mech_freq) ** 2))
    anti = linewidth * g2 / (4.0 * (linewidth**2 + (detuning - mech_freq) ** 2))
    return stokes, anti


def _rates_for_mode(
    mode_index: int,
    mech_damping: float,
    mech_occupation: float,
    couplings: tuple[float, ...],
    linewidths: tuple[float, ...],
    detunings: tuple[float, ...],
    mech_freq: float,
) -> CoolingRates:
    stokes, anti = [], []
    weak = True
    for g, kappa, det in zip(couplings, linewidths, detunings):
        s_k, a_k = sideband_rates(g, kappa, det, mech_freq)
        stokes.append(s_k)
        anti.append(a_k)
        if abs(g) > 0.5 * kappa:
            weak = False
    net = [a - s for a, s in zip(anti, stokes)]
    kappa_eff = mech_damping + sum(net)
    dominant = int(np.argmax(anti)) if anti else 0

    def estimate(extra_noise: float, extra_damp: float) -> float:
        denom = mech_damping + extra_damp
        if denom <= 0.0:
            return math.inf
        return (mech_damping * mech_occupation + extra_noise) / denom

    n_eff = estimate(stokes[dominant], net[dominant]) if anti else mech_occupation
    n_eff_all = estimate(sum(stokes), sum(net))
    return CoolingRates(
        mode_index=mode_index,
        stokes=tuple(stokes),
        anti_stokes=tuple(anti),
        net=tuple(net),
        kappa_eff=kappa_eff,
        n_eff=n_eff,
        n_eff_all=n_eff_all,
        dominant=dominant,
        weak_coupling=weak,
    )


def effective_cooling(
    params: SystemParams, basis: PolaritonBasis, effective_couplings: tuple[float, ...]
) -> tuple[CoolingRates, ...]:
    """Cooling rates of every mechanical mode, two-polariton system.

    ``effective_couplings`` are the real linearized couplings G_jM from the
    steady-state averages; the upper/lower polaritons see them scaled by
    sin(theta) and cos(theta), their matter content.
    """
    mechs = params.mechanical_modes
    if len(effective_couplings) != len(mechs):
        raise ValidationError("effective_couplings: one entry per mechanical mode required")
    s, c = math.sin(basis.theta), math.cos(basis.theta)
    linewidths = (basis.upper_linewidth, basis.lower_linewidth)
    detunings = (basis.detuning_upper, basis.detuning_lower)
    out = []
    for j, (mech, g_m) in enumerate(zip(mechs, effective_couplings)):
        nbar = thermal_occupation(mech.freq, params.bath_temperature)
        out.append(_rates_for_mode(
            j, mech.damping, nbar, (g_m * s, g_m * c), linewidths, detunings, mech.freq
        ))
    return tuple(out)


def network_cooling(model: LinearModel) -> tuple[CoolingRates, ...]:
    """Cooling rates read directly off a linear model's drift and diffusion.

    Works for any number of polaritons: block parameters (linewidths,
    detunings, couplings, mechanical frequencies) come from the drift, bath
    occupations from the diffusion diagonal, so the estimate refers to
    exactly the system the covariance solver sees.
    """
    n_p = sum(1 for name in model.mode_layout if not name.startswith("b"))
    n_m = len(model.mode_layout) - n_p
    if n_m == 0:
        raise ValidationError("model: no mechanical modes in layout")
    r, d = model.drift, model.diffusion
    linewidths = tuple(-float(r[2 * k, 2 * k]) for k in range(n_p))
    detunings = tuple(float(r[2 * k, 2 * k + 1]) for k in range(n_p))
    out = []
    for j in range(n_m):
        i = 2 * (n_p + j)
        mech_freq = float(r[i, i + 1])
        mech_damping = -float(r[i, i])
        if mech_damping <= 0.0:
            raise ValidationError(f"model: mechanical mode {j} has nonpositive damping")
        nbar = float(d[i, i]) / (2.0 * mech_damping) - 0.5
        couplings = tuple(-float(r[2 * k, i]) for k in range(n_p))
        out.append(_rates_for_mode(
            j, mech_damping, nbar, couplings, linewidths, detunings, mech_freq
        ))
    return tuple(out)


def cooling_report(params: SystemParams, mode: str = "approx") -> tuple[CoolingRates, ...]:
    """Convenience wrapper: diagonalize, solve averages, evaluate the rates."""
    from .dynamics import solve_averages
    from .model import diagonalize_polaritons

    basis = diagonalize_polaritons(params)
    averages = solve_averages(params, basis, mode=mode)
    return effective_cooling(params, basis, averages.effective_couplings)


def quantum_backaction_limit(linewidth: float, mech_freq: float) -> float:
    """Minimum occupation of ideal resolved-sideband cooling, kappa^2/(4 omega^2).

    Emits a warning above 0.01, where the drive sits outside the resolved
    sideband regime and the limit stops being a useful target.
    """
    if linewidth <= 0.0 or mech_freq <= 0.0:
        raise ValidationError("linewidth and mech_freq must be strictly positive")
    limit = linewidth**2 / (4.0 * mech_freq**2)
    if limit > 1e-2:
        warnings.warn(
            f"backaction limit {limit:.3g} > 0.01: outside the resolved sideband regime",
            stacklevel=2,
        )
    return limit
