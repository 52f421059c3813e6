"""Parameter sets, Hamiltonians and the two effective qubit frames.

Hamiltonians are returned in joules.  Qubit-frame matrices use the ordered
basis (upper, lower) = (|1⟩, |0⟩) for the mechanical qubit and (|C+⟩, |C−⟩)
for the cat qubit, so that the standard Pauli matrices apply unchanged:
σz = diag(1, −1), σ⁺ = |upper⟩⟨lower|.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
import math
from typing import Callable, NamedTuple

import numpy as np

from .constants import HBAR, KB
from .errors import ConfigError, DegenerateBasisError
from .qcore import check_truncation, coherent_state, eigh, make_fock_space, required_dim

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MechanicalParams:
    """Physical parameters of the levitated oscillator, SI units throughout.

    The defaults are the reference operating point: ω/2π = 10 kHz, m = 1e-9 kg,
    D/2π = 1 kHz, P/2π = 36 kHz, Q = 1e8, T = 10 mK, and a counter-force
    that exactly cancels gravity (so Ω₁ = 0 until the force is tuned).
    """

    m: float = 1e-9
    omega: float = TWO_PI * 1e4
    duffing: float = TWO_PI * 1e3
    pump: float = TWO_PI * 36e3
    g: float = 9.8
    force: float = 9.8e-9
    T: float = 0.01
    Q: float = 1e8
    mass_density: float = 3500.0
    dielectric: float = 5.7

    def __post_init__(self):
        if not (self.m > 0 and self.omega > 0):
            raise ConfigError("mass and frequency must be positive")
        if self.duffing < 0 or self.pump < 0:
            raise ConfigError("duffing and pump must be non-negative")
        if self.Q <= 0:
            raise ConfigError("quality factor must be positive")
        if self.T < 0:
            raise ConfigError("temperature must be non-negative")
        if self.pump > 0 and self.duffing == 0:
            raise ConfigError("a two-phonon pump needs a nonzero Duffing term (alpha = sqrt(P/D))")
        if self.mass_density <= 0:
            raise ConfigError("mass_density must be positive")

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown MechanicalParams field(s): {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})


def thermal_occupation(omega, T):
    """Bose-Einstein occupation; 0 at T = 0 and for ħω/k_BT > 700."""
    if T <= 0:
        return 0.0
    x = HBAR * omega / (KB * T)
    if x > 700:
        return 0.0
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class DerivedQuantities:
    z0: float
    alpha: float
    N: float
    Delta1: float
    omega_gap: float
    kappa: float
    n_th: float
    Omega1: float
    Omega2: float
    A: float


def net_acceleration(params):
    """g − F/m.  Forming mg − F instead loses the small difference to rounding
    of the two nearly equal products, which biases finite differences in g."""
    return params.g - params.force / params.m


def derive(params):
    z0 = math.sqrt(HBAR / (2.0 * params.m * params.omega))
    alpha = math.sqrt(params.pump / params.duffing) if params.pump > 0 else 0.0
    omega1 = params.m * net_acceleration(params) * z0 / HBAR
    return DerivedQuantities(
        z0=z0,
        alpha=alpha,
        N=alpha * alpha,
        Delta1=2.0 * HBAR * params.duffing,
        omega_gap=4.0 * params.duffing * alpha * alpha,
        kappa=params.omega / params.Q,
        n_th=thermal_occupation(params.omega, params.T),
        Omega1=omega1,
        Omega2=2.0 * alpha * omega1,
        A=math.sqrt(params.omega**2 + 4.0 * omega1**2),
    )


def tune_force(params, omega1=None, omega2=None):
    """Return params with the counter-force set so that Ω₁ (or Ω₂) hits a target."""
    if (omega1 is None) == (omega2 is None):
        raise ConfigError("give exactly one of omega1, omega2")
    d = derive(params)
    if omega2 is not None:
        if d.alpha == 0:
            raise DegenerateBasisError("Omega2 needs alpha > 0")
        omega1 = omega2 / (2.0 * d.alpha)
    force = params.m * (params.g - omega1 * HBAR / (params.m * d.z0))
    return params.replace(force=force)


def default_dim(params, extra=0):
    return max(required_dim(derive(params).alpha), 3) + extra


def _space(params, space):
    return space if space is not None else make_fock_space(default_dim(params))


def gravity_coupling(params):
    """(mg − F) z₀ in joules."""
    return params.m * net_acceleration(params) * derive(params).z0


def h1(params, space, include_gravity=True):
    """ħω a†a − ħD a†a†aa [+ (mg − F) z₀ (a† + a)]."""
    n = np.arange(space.dim, dtype=float)
    h = np.diag(HBAR * (params.omega * n - params.duffing * n * (n - 1))).astype(complex)
    if include_gravity:
        h = h + gravity_coupling(params) * (space.raising + space.lowering)
    return h


def kerr_pump(params, space):
    """−ħD a†a†aa + ħP(a†² + a²), time independent."""
    n = np.arange(space.dim, dtype=float)
    a2 = space.lowering @ space.lowering
    return (
        np.diag(-HBAR * params.duffing * n * (n - 1)).astype(complex)
        + HBAR * params.pump * (a2.conj().T + a2)
    )


def h2(params, space, include_gravity=True, t=0.0):
    """Rotating-frame cat Hamiltonian, optionally with the gravity term at time t."""
    h = kerr_pump(params, space)
    if include_gravity:
        phase = np.exp(1j * params.omega * t)
        h = h + gravity_coupling(params) * (phase * space.raising + np.conj(phase) * space.lowering)
    return h


def drive(space, omega_d):
    """Resonant drive ħω_d(a† + a)."""
    return HBAR * omega_d * (space.raising + space.lowering)


def kerr_pump_eigensystem(params, space, digits=40):
    """Eigenpairs of −D a†a†aa + P(a†² + a²) in rad/s, ascending.

    The operator is real and conserves parity; each parity block is
    tridiagonal (n ↔ n ± 2) and is diagonalized in ``digits``-digit
    arithmetic before rounding to double precision.  A double-precision
    eigh leaves eigenvector errors of order ε‖H‖/gap, and ‖H‖ grows like
    D·dim², which swamps quantities as small as the cat phase-flip
    probability; here the vectors are correct to rounding.
    """
    import mpmath

    dim = space.dim
    evals = np.empty(dim)
    evecs = np.zeros((dim, dim))
    col = 0
    with mpmath.workdps(digits):
        dmp, pmp = mpmath.mpf(params.duffing), mpmath.mpf(params.pump)
        for start in (0, 1):
            idx = np.arange(start, dim, 2)
            block = mpmath.zeros(len(idx), len(idx))
            for r, n in enumerate(idx):
                block[r, r] = -dmp * n * (n - 1)
                if r + 1 < len(idx):
                    block[r, r + 1] = block[r + 1, r] = pmp * mpmath.sqrt((n + 1) * (n + 2))
            e, q = mpmath.eigsy(block)
            for k in range(len(idx)):
                evals[col] = float(e[k])
                evecs[idx, col] = [float(q[r, k]) for r in range(len(idx))]
                col += 1
    order = np.argsort(evals, kind="stable")
    return evals[order], evecs[:, order]


class CatBasis(NamedTuple):
    even: np.ndarray
    odd: np.ndarray
    normalizations: tuple


def cat_normalizations(alpha):
    e = math.exp(-2.0 * alpha * alpha)
    return (2.0 + 2.0 * e) ** -0.5, (2.0 - 2.0 * e) ** -0.5


def cat_basis(params, space):
    alpha = derive(params).alpha
    if alpha == 0:
        raise DegenerateBasisError("alpha = 0: the odd cat state is undefined")
    check_truncation(alpha, space)
    plus = coherent_state(alpha, space)
    minus = coherent_state(-alpha, space)
    n_even, n_odd = cat_normalizations(alpha)
    even = plus + minus
    odd = plus - minus
    # renormalize on the truncated space; the analytic constants are reported
    return CatBasis(even / np.linalg.norm(even), odd / np.linalg.norm(odd), (n_even, n_odd))


@dataclass(frozen=True)
class SpectrumReport:
    """Cat-manifold diagnostics of H₂ (no gravity).

    H₂ = −ħD(a†² − α²)(a² − α²) + const, so the cat pair sits at the *top*
    of the spectrum; ``gap`` is the distance down to the next level.
    Energies in joules.
    """

    eigenvalues: np.ndarray
    overlaps: tuple
    splitting: float
    gap: float
    gap_asymptote: float


def spectrum_check(params, space):
    evals, evecs = eigh(kerr_pump(params, space))
    cats = cat_basis(params, space)
    span = np.column_stack([cats.even, cats.odd])
    top = evecs[:, -2:]
    overlaps = tuple(float(np.linalg.norm(span.conj().T @ top[:, k]) ** 2) for k in range(2))
    d = derive(params)
    return SpectrumReport(
        eigenvalues=evals,
        overlaps=overlaps,
        splitting=float(evals[-1] - evals[-2]),
        gap=float(evals[-2] - evals[-3]),
        gap_asymptote=HBAR * d.omega_gap,
    )


@dataclass(frozen=True)
class QubitFrame:
    """Two-level effective description of the MQ or the MCQ.

    ``h_eff(t)`` returns the traceless 2×2 Hamiltonian in joules; the dropped
    identity part is kept in ``energy_shift``.  ``jump_ops`` pairs each 2×2
    jump operator with its rate in rad/s.
    """

    kind: str
    basis_vectors: tuple
    projector: np.ndarray
    h_eff: Callable[[float], np.ndarray]
    jump_ops: list
    energy_shift: float = 0.0
    time_dependent: bool = False
    valid: bool = True
    validity_ratio: float = 0.0
    meta: dict = field(default_factory=dict)

    def project(self, op):
        return self.projector.conj().T @ op @ self.projector


def mq_frame(params, space=None):
    space = space if space is not None else make_fock_space(10)
    d = derive(params)
    h = HBAR * (0.5 * params.omega * SIGMA_Z + d.Omega1 * SIGMA_X)
    basis = (space.basis(1), space.basis(0))
    ratio = abs(d.Omega1) / (d.Delta1 / HBAR) if params.duffing > 0 else math.inf
    jumps = [
        (SIGMA_MINUS, d.kappa * (d.n_th + 1.0)),
        (SIGMA_PLUS, d.kappa * d.n_th),
    ]
    return QubitFrame(
        kind="MQ",
        basis_vectors=basis,
        projector=np.column_stack(basis),
        h_eff=lambda t, _h=h: _h,
        jump_ops=jumps,
        energy_shift=0.5 * HBAR * params.omega,
        time_dependent=False,
        valid=ratio <= 0.1 * (1 + 1e-9),
        validity_ratio=ratio,
    )


def mcq_frame(params, space=None, jumps=None):
    """Cat-qubit frame.

    ``jumps``: ``"large_n"`` for the single σx channel with rate κN(2n_th+1),
    ``"exact"`` for the projected pair σx ± i e^{−2N} σy.  Default is
    ``"large_n"`` when N ≥ 10.
    """
    d = derive(params)
    if d.alpha == 0:
        raise DegenerateBasisError("alpha = 0: no cat qubit")
    space = _space(params, space)
    cats = cat_basis(params, space)
    if jumps is None:
        jumps = "large_n" if d.N >= 10 else "exact"
    if jumps == "large_n":
        jump_ops = [(SIGMA_X, d.kappa * d.N * (2.0 * d.n_th + 1.0))]
    elif jumps == "exact":
        eps = math.exp(-2.0 * d.N)
        jump_ops = [
            (SIGMA_X + 1j * eps * SIGMA_Y, d.kappa * d.N * (d.n_th + 1.0)),
            (SIGMA_X - 1j * eps * SIGMA_Y, d.kappa * d.N * d.n_th),
        ]
    else:
        raise ConfigError(f"unknown jump model {jumps!r}")

    omega = params.omega
    amp = HBAR * d.Omega2

    def h_eff(t):
        return amp * math.cos(omega * t) * SIGMA_X

    ratio = abs(d.Omega2) / d.omega_gap
    shift = HBAR * params.duffing * d.alpha**4
    return QubitFrame(
        kind="MCQ",
        basis_vectors=(cats.even, cats.odd),
        projector=np.column_stack([cats.even, cats.odd]),
        h_eff=h_eff,
        jump_ops=jump_ops,
        energy_shift=shift,
        time_dependent=True,
        valid=ratio <= 0.1 * (1 + 1e-9),
        validity_ratio=ratio,
        meta={"jumps": jumps},
    )
