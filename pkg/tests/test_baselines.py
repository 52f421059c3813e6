import math

import pytest
from hypothesis import given, strategies as st

from catgrav.baselines import (
    REFERENCE_SCALA,
    REFERENCE_WANG,
    BaselineParams,
    calibrate,
    calibrated_defaults,
    s_scala,
    s_wang,
)
from catgrav.errors import ConfigError, UndefinedBaselineError

W = 2 * math.pi * 1e4


def test_formulas():
    bp = BaselineParams(gamma_e_Bprime=2.0, t_S=4e-3, t_W=1e-2, tau=1e-3, T_W=2e-3)
    assert s_scala(W, bp) == pytest.approx(W * math.sqrt(4e-3) / (2 * 2.0 * 4e-3))
    assert s_wang(W, bp) == pytest.approx(W * math.sqrt(1e-2) / (4 * 2.0 * 1e-3 + 2 * 2.0 * W * 2e-3))


def test_calibrated_defaults_hit_references():
    sets = calibrated_defaults(W)
    assert s_scala(W, sets["scala"]) == pytest.approx(REFERENCE_SCALA, rel=1e-12)
    assert s_wang(W, sets["wang"]) == pytest.approx(REFERENCE_WANG, rel=1e-12)
    assert sets["scala"].gamma_e_Bprime != sets["wang"].gamma_e_Bprime


@given(st.floats(1e-9, 1e-3), st.floats(1e2, 1e6), st.sampled_from(["scala", "wang"]))
def test_calibrate_roundtrip(target, omega, scheme):
    bp = BaselineParams()
    fn = s_scala if scheme == "scala" else s_wang
    gamma = calibrate(target, omega, bp, scheme)
    assert fn(omega, bp.replace(gamma_e_Bprime=gamma)) == pytest.approx(target, rel=1e-12)


def test_undefined_baselines():
    with pytest.raises(UndefinedBaselineError):
        s_scala(W, BaselineParams(gamma_e_Bprime=0.0))
    with pytest.raises(UndefinedBaselineError):
        s_wang(W, BaselineParams(tau=0.0, T_W=0.0))
    with pytest.raises(UndefinedBaselineError):
        calibrate(1e-7, W, BaselineParams(tau=0.0, T_W=0.0), "wang")
    with pytest.raises(ConfigError):
        calibrate(-1.0, W, BaselineParams(), "scala")
    with pytest.raises(ConfigError):
        calibrate(1.0, W, BaselineParams(), "other")
    with pytest.raises(ConfigError):
        BaselineParams(t_S=0.0)
