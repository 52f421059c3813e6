import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from catgrav.errors import ConfigError, ContractViolation, StiffnessError
from catgrav.integrator import (
    StepStats,
    integrate_adaptive,
    lindblad_integrate,
    liouvillian,
    parity_sectors,
    propagate_constant,
    schrodinger_integrate,
    schrodinger_interaction,
    secular_propagate,
    stability_step,
    unitary_propagate,
)
from catgrav.qcore import make_fock_space

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
LOWER = np.array([[0, 0], [1, 0]], dtype=complex)  # level 0 decays into level 1
EXCITED = np.diag([1.0, 0.0]).astype(complex)
TIMES = np.linspace(0.0, 3.0, 31)


@given(st.floats(-3.0, 3.0), st.floats(-3.0, 3.0))
def test_linear_ode(re, im):
    lam = complex(re, im)
    out = integrate_adaptive(lambda t, y: lam * y, np.array([1.0 + 0j]), TIMES, tol=1e-12)
    assert np.allclose(out[:, 0], np.exp(lam * TIMES), rtol=1e-9, atol=1e-9)


def test_output_grid_hit_exactly_and_stats():
    stats = StepStats()
    times = np.array([0.0, 0.1, 0.35, 1.0])
    out = integrate_adaptive(lambda t, y: np.array([1.0 + 0j]), np.array([0j]), times,
                             stats=stats)
    assert np.allclose(out[:, 0], times, atol=1e-14)
    assert stats.accepted >= 3 and stats.h_max <= 1.0 / 20 + 1e-15


@pytest.mark.parametrize("times, tol", [
    ([0.0, 1.0, 0.5], 1e-8), ([], 1e-8), ([0.0, 1.0], 1e-2), ([0.0, 1.0], 1e-16),
])
def test_bad_grid_or_tolerance(times, tol):
    with pytest.raises(ConfigError):
        integrate_adaptive(lambda t, y: y, np.array([1.0 + 0j]), times, tol=tol)


def test_stiffness_detected():
    with pytest.raises(StiffnessError):
        integrate_adaptive(lambda t, y: -1e20 * y, np.array([1.0 + 0j]), [0.0, 1.0], tol=1e-12)


@pytest.mark.parametrize("gamma", [0.1, 0.7, 2.0])
def test_amplitude_decay_oracle(gamma):
    tr = lindblad_integrate(np.zeros((2, 2)), [(LOWER, gamma)], EXCITED, TIMES, tol=1e-12, hbar=1.0)
    assert np.max(np.abs(tr.population(0) - np.exp(-gamma * TIMES))) < 1e-8


@pytest.mark.parametrize("rabi", [0.5, 2.3, 7.0])
def test_rabi_oracle(rabi):
    tr = lindblad_integrate(0.5 * rabi * SX, [], EXCITED, TIMES, tol=1e-12, hbar=1.0)
    assert np.max(np.abs(tr.population(1) - np.sin(0.5 * rabi * TIMES) ** 2)) < 1e-8


@pytest.mark.parametrize("gamma", [0.2, 1.1])
def test_sigma_x_dephasing_oracle(gamma):
    tr = lindblad_integrate(np.zeros((2, 2)), [(SX, gamma)], EXCITED, TIMES, tol=1e-12, hbar=1.0)
    assert np.max(np.abs(tr.expect(SZ) - np.exp(-2 * gamma * TIMES))) < 1e-8


def test_time_dependent_drive_oracle():
    # H = (Ω/2)cos(t)σx commutes with itself: population sin²((Ω/2)sin t)
    om = 1.7
    tr = lindblad_integrate(lambda t: 0.5 * om * math.cos(t) * SX, [], EXCITED, TIMES,
                            tol=1e-12, hbar=1.0)
    assert np.allclose(tr.population(1), np.sin(0.5 * om * np.sin(TIMES)) ** 2, atol=1e-9)


def test_lindblad_input_validation():
    with pytest.raises(ConfigError):
        lindblad_integrate(SZ, [(LOWER, -1.0)], EXCITED, TIMES, hbar=1.0)
    with pytest.raises(ConfigError):
        lindblad_integrate(SZ, [(np.eye(3), 1.0)], EXCITED, TIMES, hbar=1.0)
    with pytest.raises(ConfigError):
        lindblad_integrate(SZ, [], EXCITED, TIMES, tol=1e-3, hbar=1.0)
    with pytest.raises(ContractViolation):
        lindblad_integrate(SZ, [], np.diag([2.0, 0.0]), TIMES, hbar=1.0)


def _random_problem(seed, dim=5):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = g + g.conj().T
    lops = [(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)), 0.3)]
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    return h, lops, np.outer(psi, psi.conj()), psi


@given(st.integers(0, 2**31 - 1))
def test_exact_routes_agree_with_integrator(seed):
    h, lops, rho0, _ = _random_problem(seed)
    times = np.linspace(0, 1.0, 6)
    ref = lindblad_integrate(h, lops, rho0, times, tol=1e-12, hbar=1.0)
    for method in ("expm", "eig"):
        ex = propagate_constant(h, lops, rho0, times, hbar=1.0, method=method)
        assert np.allclose(ex.states, ref.states, atol=1e-8)


def test_liouvillian_vec_convention():
    h, lops, rho, _ = _random_problem(3, dim=3)
    gen = liouvillian(h, lops, hbar=1.0)
    L, g = lops[0]
    direct = -1j * (h @ rho - rho @ h) + g * (L @ rho @ L.conj().T
                                              - 0.5 * (L.conj().T @ L @ rho + rho @ L.conj().T @ L))
    assert np.allclose((gen @ rho.reshape(-1)).reshape(3, 3), direct)


def test_parity_sectors_partition_and_invariance():
    dim = 8
    same, opp = parity_sectors(dim)
    assert len(same) + len(opp) == dim * dim
    assert set(same).isdisjoint(opp)
    s = make_fock_space(dim)
    h = np.diag(-np.arange(dim) * (np.arange(dim) - 1.0)).astype(complex)
    h += 0.3 * (s.raising @ s.raising + s.lowering @ s.lowering)
    gen = liouvillian(h, [(s.lowering, 0.2)], hbar=1.0)
    assert np.abs(gen[np.ix_(same, opp)]).max() == 0
    assert np.abs(gen[np.ix_(opp, same)]).max() == 0
    rho0 = np.full((dim, dim), 1.0 / dim, dtype=complex)
    times = np.linspace(0, 2, 5)
    a = propagate_constant(h, [(s.lowering, 0.2)], rho0, times, hbar=1.0)
    b = propagate_constant(h, [(s.lowering, 0.2)], rho0, times, hbar=1.0,
                           sectors=parity_sectors(dim))
    assert np.allclose(a.states, b.states, atol=1e-12)


def test_secular_limit_of_well_separated_spectrum():
    # Bohr frequencies all distinct by >> rate: secular evolution equals the full one
    dim = 6
    s = make_fock_space(dim)
    freqs = -50.0 * np.arange(dim) * (np.arange(dim) - 1.0) - 7.0 * np.arange(dim)
    rate = 1e-3
    rho0 = np.full((dim, dim), 1.0 / dim, dtype=complex)
    times = np.linspace(0, 200.0, 9)
    sec = secular_propagate(freqs, np.eye(dim), [(s.lowering, rate)], rho0, times, cutoff=1.0)
    full = propagate_constant(np.diag(freqs).astype(complex), [(s.lowering, rate)], rho0,
                              times, hbar=1.0, method="eig")
    assert np.allclose(sec.states, full.states, atol=2e-5)
    sec.check()


def test_unitary_and_interaction_picture():
    h, _, _, psi = _random_problem(11)
    times = np.linspace(0, 2.0, 9)
    exact = unitary_propagate(h, psi, times, hbar=1.0)
    direct = schrodinger_integrate(h, psi, times, tol=1e-12, hbar=1.0)
    assert np.allclose(direct, exact, atol=1e-8)
    h0 = np.diag(np.diag(h))
    v = h - h0
    inter = schrodinger_interaction(h0, lambda t: v, psi, times, tol=1e-12, hbar=1.0)
    assert np.allclose(inter, exact, atol=1e-8)


def test_stability_step():
    assert stability_step(np.zeros((2, 2)), hbar=1.0) == math.inf
    assert stability_step(np.diag([1.0, -4.0]), hbar=1.0) == pytest.approx(2.5 / 4.0)
