"""Time integration of Schrödinger and Lindblad equations.

The workhorse is a classical fourth-order Runge–Kutta step wrapped in
step-doubling error control: every step is taken once with ``h`` and twice
with ``h/2``; the difference estimates the local error and the Richardson
combination of the two is propagated (locally fifth order).

For time-independent generators two exact propagators are provided as
independent oracles and for long windows where an explicit scheme would
need an impractical number of steps.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
import scipy.linalg

from .constants import HBAR
from .errors import ConfigError, StiffnessError
from .qcore import check_density, density_defects

SAFETY = 0.9
MAX_GROWTH = 4.0
MIN_SHRINK = 0.2


def _rk4(rhs, t, y, h, k1=None):
    if k1 is None:
        k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    h_min: float = math.inf
    h_max: float = 0.0


def integrate_adaptive(rhs, y0, times, tol=1e-10, max_step=None, first_step=None, stats=None):
    """Integrate y' = rhs(t, y) and return y at every entry of ``times``.

    ``tol`` bounds the estimated local error per step in the max norm,
    measured relative to max(1, |y|_max).  Steps never exceed ``max_step``
    and always land exactly on the requested output times.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ConfigError("times must be a non-empty 1-D grid")
    if np.any(np.diff(times) <= 0):
        raise ConfigError("times must be strictly increasing")
    if not 1e-14 <= tol <= 1e-3:
        raise ConfigError(f"tol={tol} outside supported range [1e-14, 1e-3]")

    y = np.array(y0, dtype=complex)
    out = np.empty((times.size,) + y.shape, dtype=complex)
    out[0] = y
    span = times[-1] - times[0]
    if span == 0:
        return out
    if max_step is None:
        max_step = span / 20.0
    h = min(first_step or max_step, max_step)
    h_floor = span * 1e-13
    stats = stats if stats is not None else StepStats()

    t = times[0]
    for i in range(1, times.size):
        target = times[i]
        while t < target:
            h_try = min(h, target - t, max_step)
            last = h_try >= target - t
            k1 = rhs(t, y)
            y_full = _rk4(rhs, t, y, h_try, k1)
            y_mid = _rk4(rhs, t, y, 0.5 * h_try, k1)
            y_half = _rk4(rhs, t + 0.5 * h_try, y_mid, 0.5 * h_try)
            diff = y_half - y_full
            scale = max(1.0, float(np.max(np.abs(y_half))))
            err = float(np.max(np.abs(diff))) / (15.0 * scale)
            if err <= tol or h_try <= h_floor:
                if err > tol:
                    raise StiffnessError(t, h_try)
                t = target if last else t + h_try
                y = y_half + diff / 15.0
                stats.accepted += 1
                stats.h_min = min(stats.h_min, h_try)
                stats.h_max = max(stats.h_max, h_try)
                grow = MAX_GROWTH if err == 0 else min(MAX_GROWTH, SAFETY * (tol / err) ** 0.2)
                # do not let a short landing step throttle the next one
                h = max(h, h_try * grow) if last else h_try * grow
            else:
                stats.rejected += 1
                h = h_try * max(MIN_SHRINK, SAFETY * (tol / err) ** 0.2)
                if h < h_floor:
                    raise StiffnessError(t, h)
        out[i] = y
    return out


def _as_function(h):
    if callable(h):
        return h
    h = np.asarray(h, dtype=complex)
    return lambda t: h


@dataclass(frozen=True)
class DensityTrajectory:
    times: np.ndarray
    states: np.ndarray  # (len(times), d, d)
    space_kind: str = "qubit"
    meta: dict | None = None

    def population(self, k):
        return np.real(self.states[:, k, k])

    def expect(self, op):
        return np.real(np.einsum("ij,tji->t", op, self.states))

    def overlap(self, psi):
        """⟨ψ|ρ(t)|ψ⟩ series."""
        psi = np.asarray(psi, dtype=complex)
        return np.real(np.einsum("i,tij,j->t", psi.conj(), self.states, psi))

    def check(self):
        for rho in self.states:
            check_density(rho)
        return self

    def worst_defects(self):
        d = np.array([density_defects(r) for r in self.states])
        return float(d[:, 0].max()), float(d[:, 1].max()), float(d[:, 2].min())


def _checked_jumps(jumps):
    jumps = [(np.asarray(L, dtype=complex), float(rate)) for L, rate in jumps]
    for _, rate in jumps:
        if rate < 0:
            raise ConfigError("jump rates must be non-negative")
    return jumps


def lindblad_rhs(h_of_t, jumps, hbar=HBAR):
    """ρ' = −(i/ħ)[H, ρ] + Σ γ (L ρ L† − ½{L†L, ρ})."""
    h_of_t = _as_function(h_of_t)
    jumps = _checked_jumps(jumps)
    damp = sum(rate * (L.conj().T @ L) for L, rate in jumps) if jumps else None
    active = [(L, rate) for L, rate in jumps if rate > 0]

    def rhs(t, rho):
        k = h_of_t(t) / hbar
        if damp is not None:
            k = k - 0.5j * damp
        out = -1j * (k @ rho - rho @ k.conj().T)
        for L, rate in active:
            out += rate * (L @ rho @ L.conj().T)
        return out

    return rhs


def lindblad_integrate(h, jumps, rho0, times, tol=1e-10, hbar=HBAR, max_step=None,
                       space_kind="qubit", check=True):
    """Integrate a Lindblad master equation with a possibly time-dependent H.

    Parameters
    ----------
    h : array or callable t -> array
        Hamiltonian in energy units (divide by ``hbar`` to get rad/s).
    jumps : list of (operator, rate)
        Rates in 1/s; operators act as in D[L]ρ = LρL† − ½{L†L, ρ}.
    rho0 : initial density matrix.
    times : strictly increasing output grid (s).
    tol : local error tolerance of the step-doubling controller.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim != 2 or rho0.shape[0] != rho0.shape[1]:
        raise ConfigError("rho0 must be a square matrix")
    if not 1e-12 <= tol <= 1e-4:
        raise ConfigError(f"tol={tol} outside [1e-12, 1e-4]")
    for L, _ in jumps:
        if np.shape(L) != rho0.shape:
            raise ConfigError("jump operator dimension does not match rho0")
    check_density(rho0)
    rhs = lindblad_rhs(h, jumps, hbar)
    states = integrate_adaptive(rhs, rho0, times, tol=tol, max_step=max_step)
    traj = DensityTrajectory(np.asarray(times, dtype=float), states, space_kind)
    return traj.check() if check else traj


def schrodinger_integrate(h, psi0, times, tol=1e-10, hbar=HBAR, max_step=None):
    """Kets ψ(t) for iħ ψ' = H(t) ψ; rows of the result are states."""
    h = _as_function(h)

    def rhs(t, psi):
        return (-1j / hbar) * (h(t) @ psi)

    return integrate_adaptive(rhs, np.asarray(psi0, dtype=complex), times, tol=tol,
                              max_step=max_step)


def schrodinger_interaction(h0, v_of_t, psi0, times, tol=1e-10, hbar=HBAR, max_step=None):
    """Kets for H = H0 + V(t), integrated in the interaction picture of H0.

    With H0 = Σ E_k |k⟩⟨k| the transformed amplitudes c_I obey
    c_I' = −(i/ħ) e^{iEt} V_E(t) e^{−iEt} c_I, whose step size is set by V
    rather than by the (possibly huge) spectral radius of H0.  ``v_of_t``
    returns V(t) in the original basis.
    """
    evals, evecs = np.linalg.eigh(np.asarray(h0, dtype=complex))
    w = evals / hbar
    t0 = float(np.asarray(times)[0])
    vdag = evecs.conj().T

    def rhs(t, c):
        ph = np.exp(1j * w * (t - t0))
        v = vdag @ (v_of_t(t) @ (evecs @ (c / ph)))
        return (-1j / hbar) * ph * v

    c0 = vdag @ np.asarray(psi0, dtype=complex)
    cs = integrate_adaptive(rhs, c0, times, tol=tol, max_step=max_step)
    times = np.asarray(times, dtype=float)
    back = np.exp(-1j * np.outer(times - t0, w)) * cs
    return back @ evecs.T


def unitary_propagate(h, psi0, times, hbar=HBAR):
    """Exact evolution under a constant Hamiltonian via its eigendecomposition."""
    evals, evecs = np.linalg.eigh(np.asarray(h, dtype=complex) / hbar)
    times = np.asarray(times, dtype=float)
    c0 = evecs.conj().T @ np.asarray(psi0, dtype=complex)
    phases = np.exp(-1j * np.outer(times - times[0], evals))
    return (phases * c0) @ evecs.T


def liouvillian(h, jumps, hbar=HBAR, index=None):
    """Superoperator matrix acting on row-major vec(ρ).

    ``index`` optionally restricts rows and columns to a subset of vec
    positions (an invariant sector of the generator).
    """
    h = np.asarray(h, dtype=complex) / hbar
    d = h.shape[0]
    if index is None:
        index = np.arange(d * d)
    rows, cols = np.divmod(np.asarray(index), d)
    eye = np.eye(d)

    def kron(x, y):
        # kron(x, y)[(i, j), (k, l)] = x[i, k] y[j, l] on the chosen positions
        return x[np.ix_(rows, rows)] * y[np.ix_(cols, cols)]

    gen = -1j * (kron(h, eye) - kron(eye, h.T))
    for L, rate in jumps:
        L = np.asarray(L, dtype=complex)
        ldl = L.conj().T @ L
        gen = gen + rate * (kron(L, L.conj()) - 0.5 * kron(ldl, eye) - 0.5 * kron(eye, ldl.T))
    return gen


def parity_sectors(dim):
    """vec(ρ) positions with equal / opposite Fock parity of row and column.

    A generator built from a parity-conserving H and jumps that are parity
    even or odd leaves both sets invariant.
    """
    i, j = np.divmod(np.arange(dim * dim), dim)
    same = (i - j) % 2 == 0
    return [np.flatnonzero(same), np.flatnonzero(~same)]


def propagate_constant(h, jumps, rho0, times, hbar=HBAR, method="expm", check=True,
                       sectors=None):
    """Exact Lindblad evolution for a time-independent generator.

    ``method="expm"`` uses one matrix exponential per distinct output step;
    ``method="eig"`` diagonalizes the Liouvillian once and is preferable for
    long windows where ‖L‖·t is large.  ``sectors`` (lists of vec positions,
    e.g. from :func:`parity_sectors`) propagates each invariant block
    separately.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    d = rho0.shape[0]
    times = np.asarray(times, dtype=float)
    if sectors is None:
        sectors = [np.arange(d * d)]
    v0 = rho0.reshape(-1)
    flat = np.zeros((times.size, d * d), dtype=complex)
    for index in sectors:
        v = v0[index]
        if not np.any(v):
            continue
        gen = liouvillian(h, jumps, hbar, index=index)
        if method == "expm":
            cache = {}
            flat[0, index] = v
            for i in range(1, times.size):
                dt = times[i] - times[i - 1]
                key = round(dt / max(abs(times[-1]), 1e-300), 12)
                if key not in cache:
                    cache[key] = scipy.linalg.expm(gen * dt)
                v = cache[key] @ v
                flat[i, index] = v
        elif method == "eig":
            lam, vecs = scipy.linalg.eig(gen)
            coeff = np.linalg.solve(vecs, v)
            flat[:, index] = (np.exp(np.outer(times - times[0], lam)) * coeff) @ vecs.T
        else:
            raise ConfigError(f"unknown method {method!r}")
    out = flat.reshape(times.size, d, d)
    if method == "eig":
        # the eigenbasis route leaves O(eps) anti-Hermitian residue
        out = 0.5 * (out + np.conj(np.transpose(out, (0, 2, 1))))
    traj = DensityTrajectory(times, out, "exact")
    return traj.check() if check else traj


def secular_propagate(freqs, evecs, jumps, rho0, times, cutoff):
    """Lindblad evolution for constant H in its eigenbasis, secular blocks only.

    ``freqs`` (rad/s) and orthonormal ``evecs`` diagonalize H/ħ.  Elements
    ρ_jk are grouped by Bohr frequency ω_jk = ω_j − ω_k, splitting wherever
    neighbouring frequencies differ by more than ``cutoff``; dissipative
    couplings between groups are dropped (they average out at order
    rate/cutoff).  Inside a group the rotation is factored out, so each
    generator has norm of order the jump rates and its exponential is well
    conditioned even when ‖H/ħ‖·t is enormous.
    """
    freqs = np.asarray(freqs, dtype=float)
    evecs = np.asarray(evecs, dtype=complex)
    d = freqs.size
    times = np.asarray(times, dtype=float)
    jumps = [(evecs.conj().T @ L @ evecs, rate) for L, rate in _checked_jumps(jumps)]
    damp = sum((rate * (L.conj().T @ L) for L, rate in jumps), np.zeros((d, d), complex))
    r0 = (evecs.conj().T @ np.asarray(rho0, dtype=complex) @ evecs).reshape(-1)
    bohr = (freqs[:, None] - freqs[None, :]).reshape(-1)
    order = np.argsort(bohr, kind="stable")
    groups = np.split(order, np.flatnonzero(np.diff(bohr[order]) > cutoff) + 1)
    eye = np.eye(d)
    flat = np.zeros((times.size, d * d), dtype=complex)
    dt = times - times[0]
    for grp in groups:
        v0 = r0[grp]
        if not np.any(v0):
            continue
        j, k = np.divmod(grp, d)
        jj, kk = np.ix_(j, j), np.ix_(k, k)
        gen = -0.5 * (damp[jj] * eye[kk] + eye[jj] * damp[kk].T)
        for L, rate in jumps:
            gen = gen + rate * L[jj] * L[kk].conj()
        centre = float(np.mean(bohr[grp]))
        gen = gen - 1j * np.diag(bohr[grp] - centre)
        for i, t in enumerate(dt):
            flat[i, grp] = np.exp(-1j * centre * t) * (scipy.linalg.expm(gen * t) @ v0)
    rho = flat.reshape(times.size, d, d)
    out = np.einsum("ij,tjk,lk->til", evecs, rho, evecs.conj())
    return DensityTrajectory(times, 0.5 * (out + np.conj(np.transpose(out, (0, 2, 1)))),
                             "exact-secular")


def stability_step(h, hbar=HBAR, fraction=2.5):
    """A step bound from the spectral radius of H/ħ (explicit RK4 stability)."""
    radius = float(np.max(np.abs(np.linalg.eigvalsh(np.asarray(h) / hbar))))
    if radius == 0:
        return math.inf
    return fraction / radius
