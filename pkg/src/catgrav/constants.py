"""Physical constants (SI) and unit conversions used across the package."""

from scipy import constants as _c

HBAR = _c.hbar
KB = _c.k
C_LIGHT = _c.c
AMU = 1.66053906660e-27
MICROGAL = 1e-8  # m/s^2


def to_microgal(value):
    """Convert m s^-2 Hz^-1/2 to µGal/√Hz."""
    return value / MICROGAL
