import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from catgrav.constants import HBAR
from catgrav.dynamics import evolve_closed_mcq, evolve_closed_mq
from catgrav.errors import (
    ConfigError,
    DegenerateStatisticsError,
    InsensitivePointError,
    NumericalError,
)
from catgrav.metrology import (
    QfiResult,
    SensitivityResult,
    cramer_rao,
    derivative_step,
    mcq_dissipative_limit,
    mcq_envelope,
    mq_envelope,
    mq_limit,
    optimal_time,
    qfi_mcq_closed,
    qfi_mq_closed,
    qfi_sld,
    sensitivity_mcq_closed,
    sensitivity_mq_closed,
    sensitivity_numeric,
)
from catgrav.model import MechanicalParams, derive, tune_force

P0 = MechanicalParams()
W = P0.omega
T1, T2 = math.pi / W, math.pi / (2 * W)


def _mq(frac):
    return tune_force(P0, omega1=frac * W)


@pytest.mark.parametrize("frac", [1e-4, 0.02, 0.3])
@pytest.mark.parametrize("wt", [0.3, 1.0, math.pi, 5.0, 11.0])
def test_f1_closed_form_against_sld(frac, wt):
    p = _mq(frac)
    t = wt / W
    num = qfi_sld(lambda g: evolve_closed_mq(p.replace(g=g), t)[0], p.g, derivative_step(p), t)
    assert num.value == pytest.approx(qfi_mq_closed(p, t).value, rel=1e-6)


@pytest.mark.parametrize("wt", [0.3, 1.0, math.pi / 2, 2.5, 7.0])
def test_f2_closed_form_against_sld(wt):
    p = tune_force(P0, omega2=0.4 * W)
    t = wt / W
    num = qfi_sld(lambda g: evolve_closed_mcq(p.replace(g=g), t)[0], p.g, derivative_step(p), t)
    assert num.value == pytest.approx(qfi_mcq_closed(p, t).value, rel=1e-6)


def test_sld_on_mixed_states():
    p = _mq(0.02)

    def rho(g, mix=0.3):
        psi = evolve_closed_mq(p.replace(g=g), T1)[0]
        return (1 - mix) * np.outer(psi, psi.conj()) + mix * np.eye(2) / 2

    pure = qfi_sld(lambda g: evolve_closed_mq(p.replace(g=g), T1)[0], p.g, derivative_step(p))
    mixed = qfi_sld(rho, p.g, derivative_step(p))
    # for a qubit, depolarizing by λ multiplies the QFI of a pure state by (1 − λ)²
    assert mixed.value == pytest.approx(0.7**2 * pure.value, rel=1e-6)


def test_qfi_limit():
    limit = 8 * P0.m / (HBAR * W**3)
    assert limit == pytest.approx(3.0583e11, rel=1e-4)
    assert qfi_mq_closed(_mq(1e-6), T1).value == pytest.approx(limit, rel=1e-9)
    assert qfi_mcq_closed(P0, T2).value == pytest.approx(36 * limit, rel=1e-12)
    assert qfi_mq_closed(_mq(0.1), 0.0).value == 0.0


@given(st.floats(0.0, 0.5), st.floats(0.0, 30.0))
def test_qfi_non_negative(frac, wt):
    assert qfi_mq_closed(_mq(frac), wt / W).value >= 0.0
    assert qfi_mcq_closed(P0, wt / W).value >= 0.0


def test_qfi_result_validation():
    with pytest.raises(NumericalError):
        QfiResult(-1.0, 0.0, "x")
    with pytest.raises(ConfigError):
        qfi_mq_closed(P0, -1.0)


def test_sensitivity_result_errors():
    with pytest.raises(InsensitivePointError):
        SensitivityResult.from_statistics(1.0, 0.5, 0.0, "x")
    with pytest.raises(DegenerateStatisticsError):
        SensitivityResult.from_statistics(1.0, 0.0, 1.0, "x")
    r = SensitivityResult.from_statistics(4.0, 0.5, 0.25, "x")
    assert r.value == pytest.approx(2.0 * 0.5 / 0.25)
    assert r.microgal == pytest.approx(r.value / 1e-8)


def test_s1_limit_and_saturation():
    p = _mq(1e-6)
    s1 = sensitivity_mq_closed(p, T1).value
    assert s1 == pytest.approx(mq_limit(P0), rel=1e-9)
    assert s1 / 1e-8 == pytest.approx(1.278639, rel=1e-6)
    assert s1 == pytest.approx(math.sqrt(T1 / qfi_mq_closed(p, T1).value), rel=1e-9)


@pytest.mark.parametrize("frac", [0.02, 0.2])
@pytest.mark.parametrize("wt", [0.7, 2.0, 4.4])
def test_analytic_derivative_vs_numeric(frac, wt):
    p = _mq(frac)
    t = wt / W
    num = sensitivity_numeric(lambda g: evolve_closed_mq(p.replace(g=g), t)[1], p.g, t,
                              derivative_step(p))
    assert num.value == pytest.approx(sensitivity_mq_closed(p, t).value, rel=1e-6)


def test_s2_values():
    p = tune_force(P0, omega2=math.pi * W / 4)
    s2 = sensitivity_mcq_closed(p, T2)
    assert s2.microgal == pytest.approx(0.150689, rel=1e-5)
    assert s2.value == pytest.approx(math.sqrt(T2 / qfi_mcq_closed(p, T2).value), rel=1e-12)
    diss = sensitivity_mcq_closed(p, T2, dissipative=True)
    assert diss.provenance == "analytic"
    assert diss.value == pytest.approx(mcq_dissipative_limit(p), rel=1e-12)
    assert diss.microgal == pytest.approx(0.157961, rel=1e-5)


def test_s2_dissipative_numeric_branch():
    p = tune_force(P0, omega2=0.5 * W)
    r = sensitivity_mcq_closed(p, 0.8 / W, dissipative=True)
    assert r.provenance == "numeric"
    assert r.value > sensitivity_mcq_closed(p, 0.8 / W).value


def test_s2_at_zero_of_sine():
    with pytest.raises(DegenerateStatisticsError):
        sensitivity_mcq_closed(tune_force(P0, omega2=0.3 * W), 2 * math.pi / W)


@given(st.floats(0.05, 30.0))
def test_envelopes_bound_from_below(wt):
    t = wt / W
    p2 = tune_force(P0, omega2=0.3 * W)
    if abs(math.sin(wt)) > 1e-6:
        assert sensitivity_mcq_closed(p2, t).value >= mcq_envelope(p2, t) * (1 - 1e-12)
    # the MQ envelope is a bound on the Ω₁ → 0 family; at finite Ω₁ it is off by O(Ω₁²/ω²)
    p1 = _mq(1e-4)
    try:
        s = sensitivity_mq_closed(p1, t).value
    except DegenerateStatisticsError:
        return  # Ō₁ returns to 0 at 𝒜t = 2πk, where S₁⁰ is infinite
    assert s >= mq_envelope(p1, t) * (1 - 1e-6)


def test_mq_dissipative_value():
    r = sensitivity_mq_closed(_mq(0.02), T1, dissipative=True)
    assert r.provenance == "numeric"
    assert r.microgal == pytest.approx(1.52126, rel=1e-4)


@pytest.mark.parametrize("scheme, expected", [("MQ", T1), ("MCQ", T2)])
def test_optimal_time(scheme, expected):
    assert optimal_time(scheme, P0) == pytest.approx(expected)
    with pytest.raises(ConfigError):
        optimal_time("XQ", P0)


def test_raw_s2_minimum_is_not_the_contact_point():
    # S₂⁰ ∝ √t/|sin ωt| has its first minimum where tan ωt = 2ωt, not at π/2
    p = tune_force(P0, omega2=0.3 * W)
    grid = np.linspace(0.5, 3.0, 25001) / W
    vals = [sensitivity_mcq_closed(p, t).value for t in grid]
    assert W * grid[int(np.argmin(vals))] == pytest.approx(1.1656, abs=1e-3)


def test_cramer_rao():
    assert cramer_rao(4.0, 10.0, 2.5) == pytest.approx(0.25)
    assert cramer_rao(QfiResult(4.0, 1.0, "x"), 1.0, 1.0) == pytest.approx(0.5)
    with pytest.raises(InsensitivePointError):
        cramer_rao(0.0, 1.0, 1.0)
    with pytest.raises(ConfigError):
        cramer_rao(1.0, 0.5, 1.0)


def test_derivative_step_floor():
    assert derivative_step(P0) == pytest.approx(1e-10)
    assert derivative_step(P0.replace(force=0.0)) == pytest.approx(9.8e-6)
    assert derive(P0).N == pytest.approx(36.0, rel=1e-14)
