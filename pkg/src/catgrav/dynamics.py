"""Qubit and full-Fock dynamics of the two gravimeters.

Closed forms for the dissipation-free Rabi measurements, master-equation
runs in the effective qubit frames, and the full-space studies (leakage
under a resonant drive, phase flips under single-phonon loss, effective
versus full cat dynamics).
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .constants import HBAR
from .errors import ConfigError
from .integrator import (
    lindblad_integrate,
    parity_sectors,
    propagate_constant,
    schrodinger_integrate,
    schrodinger_interaction,
    secular_propagate,
    stability_step,
    unitary_propagate,
)
from .model import (
    cat_basis,
    default_dim,
    derive,
    gravity_coupling,
    drive,
    kerr_pump,
    kerr_pump_eigensystem,
    mcq_frame,
    mq_frame,
)
from .qcore import make_fock_space

DEFAULT_TOL = 1e-10
STEPS_PER_PERIOD = 50
SECULAR_FACTOR = 1e4


def _times(times):
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ConfigError("times must be non-negative")
    return times


def evolve_closed_mq(params, t):
    """Rabi state of the MQ from |0⟩ and the excited-state occupation.

    The state is returned in the frame basis (|1⟩, |0⟩).
    """
    d = derive(params)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ConfigError("t must be non-negative")
    s = np.sin(0.5 * d.A * t)
    c = np.cos(0.5 * d.A * t)
    amp0 = c + 1j * (params.omega / d.A) * s
    amp1 = -2j * (d.Omega1 / d.A) * s
    state = np.stack([amp1, amp0], axis=-1)
    return state, 4.0 * d.Omega1**2 / d.A**2 * s**2


def _mcq_phase(params, t):
    d = derive(params)
    return (d.Omega2 / params.omega) * np.sin(params.omega * np.asarray(t, dtype=float))


def evolve_closed_mcq(params, t):
    """Cat-qubit Rabi state from |C−⟩ in the basis (|C+⟩, |C−⟩), and Ō₂."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ConfigError("t must be non-negative")
    phi = _mcq_phase(params, t)
    state = np.stack([-1j * np.sin(phi), np.cos(phi) + 0j], axis=-1)
    return state, np.sin(phi) ** 2


def _period_step(params, *extra_rates):
    rates = [params.omega] + [abs(r) for r in extra_rates if r]
    return 2.0 * math.pi / max(rates) / STEPS_PER_PERIOD


def evolve_mq_thermal(params, times, tol=DEFAULT_TOL):
    """Thermal master equation in the MQ frame, starting from |0⟩."""
    frame = mq_frame(params)
    d = derive(params)
    rho0 = np.diag([0.0, 1.0]).astype(complex)
    times = _times(times)
    step = _period_step(params, d.A)
    traj = lindblad_integrate(frame.h_eff(0.0), frame.jump_ops, rho0, times, tol=tol,
                              max_step=step, space_kind="qubit:MQ")
    return traj


def mcq_decay_rate(params):
    """Coherence decay constant 2κN(2n_th+1) of the large-N cat dissipator."""
    d = derive(params)
    return 2.0 * d.kappa * d.N * (2.0 * d.n_th + 1.0)


def mcq_thermal_mean(params, t):
    """Closed-form Ō₂ under the large-N dissipator: ½ − ½cos(2φ)e^{−2κN(2n_th+1)t}."""
    t = np.asarray(t, dtype=float)
    return 0.5 - 0.5 * np.cos(2.0 * _mcq_phase(params, t)) * np.exp(-mcq_decay_rate(params) * t)


def evolve_mcq_thermal(params, times, mode="analytic", tol=DEFAULT_TOL, jumps="large_n"):
    """Cat-qubit evolution from |C−⟩ under thermal noise.

    ``mode="analytic"`` returns the Ō₂ series; ``mode="numeric"`` returns the
    integrated :class:`DensityTrajectory` in the (|C+⟩, |C−⟩) frame.
    """
    times = _times(times)
    if mode == "analytic":
        if jumps != "large_n":
            raise ConfigError("the closed form exists only for the large-N dissipator")
        return mcq_thermal_mean(params, times)
    if mode != "numeric":
        raise ConfigError(f"unknown mode {mode!r}")
    frame = _mcq_frame_2x2(params, jumps)
    d = derive(params)
    rho0 = np.diag([0.0, 1.0]).astype(complex)
    step = _period_step(params, 2.0 * d.Omega2)
    return lindblad_integrate(frame.h_eff, frame.jump_ops, rho0, times, tol=tol,
                              max_step=step, space_kind="qubit:MCQ")


def _mcq_frame_2x2(params, jumps):
    # the 2x2 generator needs no Fock vectors; a minimal space keeps this cheap
    return mcq_frame(params, space=make_fock_space(default_dim(params)), jumps=jumps)


@dataclass(frozen=True)
class LeakageReport:
    times: np.ndarray
    p_leak_mq: np.ndarray
    p_leak_mcq: np.ndarray
    populations: dict
    meta: dict = field(default_factory=dict)


def leakage_study(params, omega_d, times=None, dim=None, periods=5.0, points=501):
    """Leakage out of the qubit subspaces under a resonant drive ħω_d(a† + a).

    Both Hamiltonians are time independent in the frame rotating at ω, so the
    evolution is exact (eigendecomposition).  Default window: ``periods``
    drive periods 2π/ω_d.
    """
    if omega_d < 0:
        raise ConfigError("drive amplitude must be non-negative")
    if times is None:
        span = periods * 2.0 * math.pi / (omega_d if omega_d > 0 else params.duffing)
        times = np.linspace(0.0, span, points)
    times = _times(times)
    space = make_fock_space(dim or default_dim(params))

    n = np.arange(space.dim)
    h1d = np.diag(-HBAR * params.duffing * n * (n - 1)).astype(complex) + drive(space, omega_d)
    psi1 = unitary_propagate(h1d, space.basis(0), times)
    pops1 = np.abs(psi1) ** 2
    p1 = 1.0 - pops1[:, 0] - pops1[:, 1]

    cats = cat_basis(params, space)
    h2d = kerr_pump(params, space) + drive(space, omega_d)
    psi2 = unitary_propagate(h2d, cats.odd, times)
    pe = np.abs(psi2 @ cats.even.conj()) ** 2
    po = np.abs(psi2 @ cats.odd.conj()) ** 2
    p2 = 1.0 - pe - po
    return LeakageReport(
        times=times,
        p_leak_mq=np.clip(p1, 0.0, 1.0),
        p_leak_mcq=np.clip(p2, 0.0, 1.0),
        populations={"mq_0": pops1[:, 0], "mq_1": pops1[:, 1], "mq_2": pops1[:, 2],
                     "mcq_even": pe, "mcq_odd": po},
        meta={"omega_d": omega_d, "dim": space.dim, "window": float(times[-1] - times[0])},
    )


def phase_flip_study(params, times, qubit="MCQ", dim=None, method="secular",
                     secular_factor=SECULAR_FACTOR):
    """𝔸(t) = ⟨−|ρ(t)|−⟩ from |+⟩ under ρ' = −(i/ħ)[H, ρ] + κD[a]ρ.

    H is the rotating-frame Hamiltonian of the chosen qubit (−ħD a†a†aa for
    the MQ, H₂ for the MCQ).  Windows of interest are O(1/κ) while H/ħ has
    frequencies up to D·dim², so direct propagation loses everything to
    rounding.  ``method="secular"`` works in the eigenbasis of H and keeps
    dissipative couplings only among elements whose Bohr frequencies lie
    within ``secular_factor``·κ; ``method="exact"`` exponentiates the full
    Liouvillian (parity blocks) and is usable only for short windows.
    """
    times = _times(times)
    space = make_fock_space(dim or default_dim(params))
    d = derive(params)
    if qubit == "MQ":
        n = np.arange(space.dim)
        freqs = -params.duffing * n * (n - 1.0)
        vecs = np.eye(space.dim)
        up, low = space.basis(1), space.basis(0)
    elif qubit == "MCQ":
        freqs, vecs = kerr_pump_eigensystem(params, space)
        cats = cat_basis(params, space)
        up, low = cats.even, cats.odd
    else:
        raise ConfigError(f"unknown qubit {qubit!r}")
    plus = (up + low) / math.sqrt(2.0)
    minus = (up - low) / math.sqrt(2.0)
    rho0 = np.outer(plus, plus.conj())
    jumps = [(space.lowering, d.kappa)]
    if method == "secular":
        traj = secular_propagate(freqs, vecs, jumps, rho0, times, secular_factor * d.kappa)
    elif method == "exact":
        h = HBAR * (vecs * freqs) @ vecs.T
        # D[a] flips parity and D[−a] = D[a], so equal- and opposite-parity
        # elements of ρ evolve independently
        traj = propagate_constant(h, jumps, rho0, times, method="expm", check=False,
                                  sectors=parity_sectors(space.dim))
    else:
        raise ConfigError(f"unknown method {method!r}")
    return np.clip(traj.overlap(minus), 0.0, 1.0)


@dataclass(frozen=True)
class EffectiveVsFull:
    times: np.ndarray
    full: np.ndarray
    effective: np.ndarray
    max_deviation: float
    meta: dict = field(default_factory=dict)


def effective_vs_full(params, times, dim=None, tol=DEFAULT_TOL, max_step=None,
                      method="interaction"):
    """|C+⟩ population from |C−⟩ under the full H₂ᵍ(t) and under ħΩ₂cos(ωt)σx.

    ``method="interaction"`` integrates in the interaction picture of the
    static H₂ (same dynamics, far fewer steps); ``"direct"`` steps the
    Schrödinger equation in the Fock basis and is kept as a cross-check.
    """
    times = _times(times)
    d = derive(params)
    space = make_fock_space(dim or default_dim(params))
    cats = cat_basis(params, space)
    static = kerr_pump(params, space)
    # remove the cat-manifold energy; it only contributes a global phase
    static = static - HBAR * params.duffing * d.alpha**4 * np.eye(space.dim)
    coupling = gravity_coupling(params)
    ad, a = space.raising, space.lowering
    w = params.omega

    def vgrav(t):
        ph = complex(math.cos(w * t), math.sin(w * t))
        return coupling * (ph * ad + ph.conjugate() * a)

    step = max_step or _period_step(params, 2.0 * d.Omega2, d.omega_gap)
    if method == "interaction":
        psi = schrodinger_interaction(static, vgrav, cats.odd, times, tol=tol, max_step=step)
    elif method == "direct":
        step = min(step, stability_step(static + vgrav(0.0)))
        psi = schrodinger_integrate(lambda t: static + vgrav(t), cats.odd, times, tol=tol,
                                    max_step=step)
    else:
        raise ConfigError(f"unknown method {method!r}")
    full = np.abs(psi @ cats.even.conj()) ** 2
    _, eff = evolve_closed_mcq(params, times)
    return EffectiveVsFull(times, full, eff, float(np.max(np.abs(full - eff))),
                           meta={"dim": space.dim, "tol": tol, "max_step": step,
                                 "method": method})
