"""Dissipation sources of a levitated particle: residual gas and blackbody light.

Damping rates are angular (rad/s); divide by 2π for the Hz figures usually
quoted.  The particle is treated as a homogeneous sphere whose radius follows
from its mass and density.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Optional

from .constants import AMU, C_LIGHT, HBAR, KB
from .errors import ConfigError
from .model import thermal_occupation  # noqa: F401  (re-exported)

HIGH_VACUUM_COEFF = 0.571
KNUDSEN_FLAG = 10.0


@dataclass(frozen=True)
class GasParams:
    """Residual-gas state.  ``viscosity`` (Pa·s) is only needed by the full
    Knudsen-corrected formula, which uses it to recover the mean free path."""

    pressure: float = 1e-5
    molecule_mass: float = 28.0 * AMU
    temperature: float = 0.01
    viscosity: Optional[float] = None

    def __post_init__(self):
        if not (self.pressure > 0 and self.molecule_mass > 0 and self.temperature > 0):
            raise ConfigError("gas pressure, molecule mass and temperature must be positive")
        if self.viscosity is not None and self.viscosity <= 0:
            raise ConfigError("viscosity must be positive")


def radius(params):
    """r = (3m/(4πϱ))^{1/3}."""
    return (3.0 * params.m / (4.0 * math.pi * params.mass_density)) ** (1.0 / 3.0)


def mean_free_path(gas):
    """L̄ from η = 𝔓 L̄ √(2m_gas/(π k_B T))."""
    if gas.viscosity is None:
        raise ConfigError("the full gas-damping formula needs GasParams.viscosity")
    return gas.viscosity / (gas.pressure * math.sqrt(2.0 * gas.molecule_mass / (math.pi * KB * gas.temperature)))


def knudsen_number(params, gas):
    return mean_free_path(gas) / radius(params)


@dataclass(frozen=True)
class GasDamping:
    kappa: float
    regime: str
    knudsen: Optional[float]
    low_knudsen: bool


def gas_damping(params, gas, regime="high-vacuum"):
    """Gas-collision damping rate κ_gas in rad/s.

    high-vacuum: κ/2π = 0.571 𝔓 (mϱ²)^{-1/3} √(m_gas/(k_B T)).
    full: κ/2π = 3η (r/m) 0.619/(0.617 + K_n) (1 + c_K),
          c_K = 0.31K_n/(0.785 + 1.152K_n + K_n²).
    ``low_knudsen`` flags K_n < 10, where the high-vacuum form is unreliable.
    """
    kn = knudsen_number(params, gas) if gas.viscosity is not None else None
    if regime == "high-vacuum":
        rate = (HIGH_VACUUM_COEFF * gas.pressure / (params.m * params.mass_density**2) ** (1.0 / 3.0)
                * math.sqrt(gas.molecule_mass / (KB * gas.temperature)))
    elif regime == "full":
        if kn is None:
            raise ConfigError("the full gas-damping formula needs GasParams.viscosity")
        ck = 0.31 * kn / (0.785 + 1.152 * kn + kn * kn)
        rate = 3.0 * gas.viscosity * radius(params) / params.m * 0.619 / (0.617 + kn) * (1.0 + ck)
    else:
        raise ConfigError(f"unknown regime {regime!r}")
    return GasDamping(2.0 * math.pi * rate, regime, kn, kn is not None and kn < KNUDSEN_FLAG)


def blackbody_damping(params):
    """κ_b = 𝔻/(m k_B T) with the r⁶T⁹ momentum-diffusion coefficient

    2𝔻 = ħ²(1024π²/135) r⁶ c |(ε − 1)/(ε + 2)|² (k_BT/(ħc))⁹.
    """
    if params.dielectric < 1:
        raise ConfigError("dielectric constant must be >= 1")
    if params.T == 0:
        return 0.0
    pol = (params.dielectric - 1.0) / (params.dielectric + 2.0)
    two_d = (HBAR**2 * 1024.0 * math.pi**2 / 135.0 * radius(params) ** 6 * C_LIGHT
             * pol * pol * (KB * params.T / (HBAR * C_LIGHT)) ** 9)
    return 0.5 * two_d / (params.m * KB * params.T)


@dataclass(frozen=True)
class DampingReport:
    kappa_gas: float
    kappa_blackbody: float
    kappa_total: float
    quality_factor: float
    radius: float
    knudsen: Optional[float] = None
    low_knudsen: bool = False

    def to_dict(self):
        return dict(self.__dict__)


def damping_report(params, gas, regime="high-vacuum"):
    gas_part = gas_damping(params, gas, regime)
    kb = blackbody_damping(params)
    total = gas_part.kappa + kb
    return DampingReport(
        kappa_gas=gas_part.kappa,
        kappa_blackbody=kb,
        kappa_total=total,
        quality_factor=params.omega / total,
        radius=radius(params),
        knudsen=gas_part.knudsen,
        low_knudsen=gas_part.low_knudsen,
    )
