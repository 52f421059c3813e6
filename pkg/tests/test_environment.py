import math

import pytest
from hypothesis import given, strategies as st

from catgrav.constants import AMU, KB
from catgrav.environment import (
    GasParams,
    blackbody_damping,
    damping_report,
    gas_damping,
    knudsen_number,
    mean_free_path,
    radius,
)
from catgrav.errors import ConfigError
from catgrav.model import MechanicalParams

P0 = MechanicalParams()
GAS = GasParams(temperature=P0.T)


def test_radius():
    assert radius(P0) == pytest.approx((3e-9 / (4 * math.pi * 3500)) ** (1 / 3), rel=1e-14)


def test_gas_damping_reference():
    # 0.571·𝔓·(mϱ²)^{-1/3}·√(m_gas/k_BT), evaluated by hand
    by_hand = 0.571 * 1e-5 * (1e-9 * 3500**2) ** (-1 / 3) * math.sqrt(28 * AMU / (KB * 0.01))
    g = gas_damping(P0, GAS)
    assert g.kappa / (2 * math.pi) == pytest.approx(by_hand, rel=1e-12)
    assert g.kappa / (2 * math.pi) == pytest.approx(1.44e-5, rel=0.02)
    assert g.regime == "high-vacuum" and g.knudsen is None


@given(st.floats(1e-10, 1e-3))
def test_gas_damping_linear_in_pressure(pr):
    ref = gas_damping(P0, GAS).kappa
    k = gas_damping(P0, GasParams(pressure=pr, temperature=P0.T)).kappa
    assert k == pytest.approx(ref * pr / 1e-5, rel=1e-12)


def test_full_regime_needs_viscosity():
    with pytest.raises(ConfigError):
        gas_damping(P0, GAS, regime="full")
    with pytest.raises(ConfigError):
        gas_damping(P0, GAS, regime="bogus")


def test_full_regime_and_knudsen():
    gas = GasParams(pressure=1e5, temperature=300.0, viscosity=1.8e-5)
    lam = mean_free_path(gas)
    assert 3e-8 < lam < 1.5e-7  # air at ambient conditions: ~70 nm
    kn = knudsen_number(P0, gas)
    assert kn == pytest.approx(lam / radius(P0))
    g = gas_damping(P0, gas, regime="full")
    assert g.low_knudsen
    # continuum limit: Stokes drag 6πηr/m up to the slip correction
    stokes = 6 * math.pi * 1.8e-5 * radius(P0) / P0.m
    assert g.kappa == pytest.approx(stokes, rel=0.05)


@pytest.mark.parametrize("change", [{"pressure": 0.0}, {"molecule_mass": -1.0},
                                    {"temperature": 0.0}, {"viscosity": 0.0}])
def test_gas_validation(change):
    with pytest.raises(ConfigError):
        GasParams(**change)


@given(st.floats(1e-3, 10.0))
def test_blackbody_scaling(T):
    # 𝔻 ∝ T⁹ and κ_b = 𝔻/(m k_B T), so κ_b ∝ T⁸
    ref = blackbody_damping(P0)
    assert blackbody_damping(P0.replace(T=T)) == pytest.approx(ref * (T / P0.T) ** 8, rel=1e-10)


def test_blackbody_edges():
    assert blackbody_damping(P0.replace(T=0.0)) == 0.0
    assert blackbody_damping(P0.replace(dielectric=1.0)) == 0.0
    with pytest.raises(ConfigError):
        blackbody_damping(P0.replace(dielectric=0.5))


def test_damping_report():
    rep = damping_report(P0, GAS)
    assert rep.kappa_total == pytest.approx(rep.kappa_gas + rep.kappa_blackbody)
    assert rep.quality_factor == pytest.approx(6.957e8, rel=1e-3)
    assert rep.kappa_blackbody / rep.kappa_gas < 1e-20
    assert set(rep.to_dict()) >= {"kappa_gas", "quality_factor"}
