"""Quantum Fisher information, Rabi-measurement sensitivity and the QCRB.

Gravity enters every model only through Ω₁ = (mg − F) z₀/ħ, so all
derivatives are taken with respect to g at fixed counter-force F.
Sensitivities are in m s⁻² Hz^{-1/2}; ``SensitivityResult.microgal``
gives the µGal/√Hz rendering.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .constants import HBAR, to_microgal
from .errors import (
    ConfigError,
    DegenerateStatisticsError,
    InsensitivePointError,
    NumericalError,
    StepInstabilityError,
)
from .model import derive, net_acceleration, tune_force

RANK_CUTOFF = 1e-12
HALVING_RTOL = 0.01
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class SensitivityResult:
    value: float
    sensing_time: float
    mean_O: float
    std_O: float
    dO_dg: float
    provenance: str

    @classmethod
    def from_statistics(cls, t, mean_o, do_dg, provenance):
        """Build a result whose value is √t·δO/|∂Ō/∂g| with δO = √(Ō − Ō²)."""
        if abs(do_dg) < 1e-30:
            raise InsensitivePointError(f"|dO/dg| = {abs(do_dg):.3g} at t = {t:.6g} s")
        if mean_o < DEGENERATE_TOL or mean_o > 1.0 - DEGENERATE_TOL:
            raise DegenerateStatisticsError(f"mean_O = {mean_o!r} at t = {t:.6g} s")
        std = math.sqrt(mean_o - mean_o * mean_o)
        return cls(math.sqrt(t) * std / abs(do_dg), float(t), float(mean_o), std,
                   float(do_dg), provenance)

    @property
    def microgal(self):
        return to_microgal(self.value)


@dataclass(frozen=True)
class QfiResult:
    value: float
    time: float
    method: str

    def __post_init__(self):
        if self.value < 0:
            raise NumericalError(f"negative QFI {self.value}")


def derivative_step(params):
    """dg = max(1e-6·|g − F/m|, 1e-10 m/s²)."""
    return max(1e-6 * abs(net_acceleration(params)), 1e-10)


def _sld_sum(rho, drho):
    lam, vec = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    d = vec.conj().T @ drho @ vec
    denom = lam[:, None] + lam[None, :]
    keep = denom > RANK_CUTOFF * max(float(lam[-1]), 0.0)
    return float(np.sum(2.0 * np.abs(d[keep]) ** 2 / denom[keep]))


def qfi_sld(rho_of_g, g, dg, t=float("nan")):
    """QFI from the SLD eigenbasis sum with a central-difference ∂ρ/∂g.

    Pure-state families may pass kets; they are turned into projectors.
    The derivative is repeated with dg/2 and must agree within 1%.
    """
    if dg <= 0:
        raise ConfigError("dg must be positive")

    def rho(x):
        r = np.asarray(rho_of_g(x), dtype=complex)
        return np.outer(r, r.conj()) if r.ndim == 1 else r

    r0 = rho(g)

    def at(step):
        # divide by the representable step, not the nominal one
        hi, lo = g + step, g - step
        return _sld_sum(r0, (rho(hi) - rho(lo)) / (hi - lo))

    full, half = at(dg), at(0.5 * dg)
    scale = max(abs(full), abs(half))
    if scale > 0 and abs(full - half) > HALVING_RTOL * scale and scale > 1e-300:
        raise StepInstabilityError(f"QFI changed {full:.6g} -> {half:.6g} on halving dg")
    return QfiResult(half, t, "sld-numeric")


def qfi_mq_closed(params, t):
    """Pure-state QFI of the MQ Rabi state about g.

    F₁ = 8m²z₀²/(ħ²𝒜⁶) · [32Ω⁶t² + 8Ω⁴ω²t² + 4Ω²ω²𝒜t sin 𝒜t
                          + 2Ω²ω²(1 − cos 𝒜t)² + ω⁴(1 − cos 𝒜t)],
    which vanishes at t = 0 and tends to 8m/(ħω³) at t = π/ω as Ω₁ → 0.
    """
    if t < 0:
        raise ConfigError("t must be non-negative")
    d = derive(params)
    w, om, a = params.omega, d.Omega1, d.A
    c, s = math.cos(a * t), math.sin(a * t)
    bracket = (32.0 * om**6 * t * t + 8.0 * om**4 * w * w * t * t
               + 4.0 * om * om * w * w * a * t * s
               + 2.0 * om * om * w * w * (1.0 - c) ** 2
               + w**4 * (1.0 - c))
    pref = 8.0 * params.m**2 * d.z0**2 / (HBAR**2 * a**6)
    return QfiResult(pref * bracket, float(t), "closed-form")


def qfi_mcq_closed(params, t):
    """F₂ = (8Nm/(ħω³)) sin²(ωt)."""
    if t < 0:
        raise ConfigError("t must be non-negative")
    d = derive(params)
    w = params.omega
    return QfiResult(8.0 * d.N * params.m / (HBAR * w**3) * math.sin(w * t) ** 2,
                     float(t), "closed-form")


def sensitivity_numeric(mean_o_of_g, g, t, dg, provenance="numeric"):
    """S = √t·δO/|∂Ō/∂g| with a central-difference derivative (checked by halving)."""
    if t <= 0:
        raise ConfigError("sensing time must be positive")
    if dg <= 0:
        raise ConfigError("dg must be positive")
    mean = float(mean_o_of_g(g))

    def deriv(step):
        hi, lo = g + step, g - step
        return (float(mean_o_of_g(hi)) - float(mean_o_of_g(lo))) / (hi - lo)

    full, half = deriv(dg), deriv(0.5 * dg)
    if abs(half) < 1e-30:
        raise InsensitivePointError(f"|dO/dg| = {abs(half):.3g} at t = {t:.6g} s")
    if abs(full - half) > HALVING_RTOL * abs(half):
        raise StepInstabilityError(f"dO/dg changed {full:.6g} -> {half:.6g} on halving dg")
    return SensitivityResult.from_statistics(t, mean, half, provenance)


def _mq_statistics(params, t):
    d = derive(params)
    w, om, a = params.omega, d.Omega1, d.A
    s, c = math.sin(0.5 * a * t), math.cos(0.5 * a * t)
    mean = 4.0 * om * om / (a * a) * s * s
    deriv = (8.0 * params.m * d.z0 * om / (HBAR * a**4) * s
             * (2.0 * om * om * a * t * c + w * w * s))
    return mean, deriv


def sensitivity_mq_closed(params, t, dissipative=False, tol=1e-12):
    """MQ sensitivity at sensing time t.

    Ideal: closed-form Ō₁ and ∂Ō₁/∂g, giving S₁⁰(t).  Dissipative: numeric
    derivative of Ō₁ from the thermal master equation.
    """
    if t <= 0:
        raise ConfigError("sensing time must be positive")
    if not dissipative:
        mean, deriv = _mq_statistics(params, t)
        return SensitivityResult.from_statistics(t, mean, deriv, "analytic")

    from .dynamics import evolve_mq_thermal

    def mean_o(g):
        traj = evolve_mq_thermal(params.replace(g=g), [0.0, t], tol=tol)
        return traj.population(0)[-1]

    return sensitivity_numeric(mean_o, params.g, t, derivative_step(params))


def mq_envelope(params, t):
    """S₁^sin = √t·𝒜²/ω·√(ħω/(8m)), touching S₁⁰ where 𝒜t is an odd multiple of π."""
    d = derive(params)
    return math.sqrt(t) * d.A**2 / params.omega * math.sqrt(HBAR * params.omega / (8.0 * params.m))


def mq_limit(params):
    """S₁ = ω√(ħπ/(8m)), the Ω₁ → 0 value at t₁ = π/ω."""
    return params.omega * math.sqrt(HBAR * math.pi / (8.0 * params.m))


def mcq_envelope(params, t):
    """S₂^sin = ω√(ħωt/(8Nm))."""
    d = derive(params)
    return params.omega * math.sqrt(HBAR * params.omega * t / (8.0 * d.N * params.m))


def _is_mcq_optimum(params, t):
    d = derive(params)
    w = params.omega
    return (math.isclose(t, math.pi / (2.0 * w), rel_tol=1e-9)
            and math.isclose(d.Omega2, math.pi * w / 4.0, rel_tol=1e-9))


def sensitivity_mcq_closed(params, t, dissipative=False, tol=1e-12):
    """MCQ sensitivity at sensing time t.

    Ideal: S₂⁰ = √(ħω/(8Nm))·ω√t/|sin ωt| (independent of Ω₂).  Dissipative:
    the closed form √(ħπω³/(16Nm))·e^{2κN(2n_th+1)t₂} at t = t₂ and
    Ω₂ = πω/4; anywhere else the master equation is integrated and
    differentiated numerically.
    """
    if t <= 0:
        raise ConfigError("sensing time must be positive")
    d = derive(params)
    w = params.omega
    phi = d.Omega2 / w * math.sin(w * t)
    dphi = 2.0 * d.alpha * params.m * d.z0 / (HBAR * w) * math.sin(w * t)
    if not dissipative:
        if abs(math.sin(w * t)) < 1e-12:
            raise DegenerateStatisticsError(f"sin(ωt) = 0 at t = {t:.6g} s")
        mean = math.sin(phi) ** 2
        return SensitivityResult.from_statistics(t, mean, math.sin(2.0 * phi) * dphi, "analytic")

    from .dynamics import evolve_mcq_thermal, mcq_decay_rate

    if _is_mcq_optimum(params, t):
        decay = math.exp(-mcq_decay_rate(params) * t)
        mean = 0.5 - 0.5 * math.cos(2.0 * phi) * decay
        return SensitivityResult.from_statistics(
            t, mean, math.sin(2.0 * phi) * dphi * decay, "analytic")

    def mean_o(g):
        traj = evolve_mcq_thermal(params.replace(g=g), [0.0, t], mode="numeric", tol=tol)
        return traj.population(0)[-1]

    return sensitivity_numeric(mean_o, params.g, t, derivative_step(params))


def mcq_dissipative_limit(params):
    """ω√(ħπ/(16Nm))·e^{2κN(2n_th+1)t₂}, the closed form at t₂ and Ω₂ = πω/4."""
    from .dynamics import mcq_decay_rate

    d = derive(params)
    t2 = math.pi / (2.0 * params.omega)
    return (params.omega * math.sqrt(HBAR * math.pi / (16.0 * d.N * params.m))
            * math.exp(mcq_decay_rate(params) * t2))


def _ratio_mq(params, t):
    mean, deriv = _mq_statistics(params, t)
    if mean <= 0 or deriv == 0:
        return math.inf
    return math.sqrt(t) * math.sqrt(mean - mean * mean) / abs(deriv) / mq_envelope(params, t)


def _ratio_mcq(params, t):
    s = abs(math.sin(params.omega * t))
    return math.inf if s == 0 else 1.0 / s


def optimal_time(scheme, params, verify=True, points=4000):
    """π/ω for the MQ, π/(2ω) for the MCQ.

    With ``verify`` the first minimum of S⁰/S^sin on a grid over (0, 4π/ω]
    (the first point of contact with the envelope) must lie within one grid
    step of the returned time.
    """
    w = params.omega
    if scheme == "MQ":
        t_opt, ratio = math.pi / w, _ratio_mq
        # t₁ = π/ω is the 𝒜 ≈ ω statement; at finite Ω₁ the contact point
        # moves by O(Ω₁²/ω²), so check it on the Ω₁ → 0⁺ family
        params = tune_force(params, omega1=1e-4 * w)
    elif scheme == "MCQ":
        t_opt, ratio = math.pi / (2.0 * w), _ratio_mcq
    else:
        raise ConfigError(f"unknown scheme {scheme!r}")
    if verify:
        grid = np.linspace(4.0 * math.pi / w / points, 4.0 * math.pi / w, points)
        vals = np.array([ratio(params, t) for t in grid])
        interior = np.flatnonzero((vals[1:-1] <= vals[:-2]) & (vals[1:-1] <= vals[2:])) + 1
        if interior.size == 0:
            raise NumericalError("no envelope contact found on the search grid")
        step = grid[1] - grid[0]
        if abs(grid[interior[0]] - t_opt) > step:
            raise NumericalError(
                f"grid minimum {grid[interior[0]]:.6g} s disagrees with t_opt {t_opt:.6g} s")
    return t_opt


def cramer_rao(qfi, total_time, shot_time):
    """δg = 1/√((𝒯/t)·ℱ)."""
    if not (shot_time > 0 and total_time >= shot_time):
        raise ConfigError("need total_time >= shot_time > 0")
    value = qfi.value if isinstance(qfi, QfiResult) else float(qfi)
    if value <= 0:
        raise InsensitivePointError("QFI is zero; the bound is infinite")
    return 1.0 / math.sqrt(total_time / shot_time * value)
