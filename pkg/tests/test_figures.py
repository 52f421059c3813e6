import math

import numpy as np
import pytest

from catgrav import figures as F
from catgrav.config import ExperimentConfig
from catgrav.errors import ConfigError

CFG = ExperimentConfig()


def _cols(table):
    return np.array(table.rows, dtype=float).T


def test_fig2a_slope_one():
    data = F.fig2a(CFG, points=4)
    assert len(data.tables) == 3
    for table in data.tables.values():
        m, closed, sld = _cols(table)
        assert np.allclose(sld, closed, rtol=1e-6)
        assert np.polyfit(np.log10(m), np.log10(sld), 1)[0] == pytest.approx(1.0, abs=1e-6)


def test_fig4b_cat_beats_spin_baseline_at_large_mass():
    m, s2, s2d, s1, ss, sw = _cols(F.fig4b(CFG, points=5).tables["sensitivity_vs_mass"])
    assert np.all(s2d > s2)
    assert np.all(s1 > s2)
    assert s2[-1] < sw[-1] and s2d[-1] < sw[-1]
    assert np.allclose(s2 * np.sqrt(m), s2[0] * np.sqrt(m[0]))


def test_sm5b_paths_agree():
    m, analytic, numeric = _cols(F.sm5b(CFG, points=3).tables["S2_diss_vs_mass"])
    assert np.allclose(numeric, analytic, rtol=1e-6)


def test_sm6_range_and_linearity():
    pr, k = _cols(F.sm6(CFG, points=6).tables["gas_damping"])
    assert pr[0] == pytest.approx(1e-9) and pr[-1] == pytest.approx(1e-4)
    assert np.allclose(k / pr, k[0] / pr[0])


def test_sm3d_and_sm3c_metadata():
    d = F.sm3d(CFG, points=3)
    assert d.meta["window_kappa_t"] == 1.0
    t, a1, a2 = _cols(d.tables["phase_flip"])
    assert np.all(a2[1:] < a1[1:])
    c = F.sm3c(CFG, points=21)
    assert c.meta["omega_d"] == pytest.approx(0.1 * CFG.params.omega)
    assert "window" in c.meta


def test_table1_rows():
    rows, text = F.run_table1(CFG)
    assert [r.provenance for r in rows] == ["calibrated baseline"] * 2 + ["analytic", "numeric",
                                                                         "analytic", "analytic"]
    values = [r.sensitivity_ugal for r in rows]
    assert values == pytest.approx([501.8, 17.0, 1.2786, 1.5213, 0.15069, 0.15796], rel=1e-4)
    assert len(text.splitlines()) == 8


def test_unknown_figure():
    with pytest.raises(ConfigError):
        F.run_figure("fig9", CFG)


def test_byte_identical_output(tmp_path):
    a = F.write_figure(F.run_figure("sm6", CFG), tmp_path / "a")
    b = F.write_figure(F.run_figure("sm6", CFG), tmp_path / "b")
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()
    header = a[0].read_text().splitlines()[0]
    assert header == "pressure_Pa,kappa_gas_over_2pi_Hz"


def test_csv_uses_round_trip_floats():
    table = F.Table(["x"], [[0.1 + 0.2], [np.float64(1 / 3)], [7]])
    lines = F.table_csv(table).splitlines()
    assert [float(v) for v in lines[1:]] == [0.1 + 0.2, 1 / 3, 7.0]
    assert lines[1] == "0.30000000000000004"


def test_parallel_map_is_order_stable():
    items = [(m, CFG.params, 1e-12, F.baseline_sets(CFG.params.omega))
             for m in (1e-12, 1e-10, 1e-8)]
    serial = F.parallel_map(F._fig2b_row, items, jobs=1)
    parallel = F.parallel_map(F._fig2b_row, items, jobs=2)
    assert serial == parallel


def test_jobs_from_env(monkeypatch):
    monkeypatch.delenv("CATGRAV_JOBS", raising=False)
    assert F.jobs_from_env() == 1
    monkeypatch.setenv("CATGRAV_JOBS", "3")
    assert F.jobs_from_env() == 3 and F.jobs_from_env(2) == 2
    monkeypatch.setenv("CATGRAV_JOBS", "x")
    with pytest.raises(ConfigError):
        F.jobs_from_env()
    monkeypatch.setenv("CATGRAV_JOBS", "0")
    with pytest.raises(ConfigError):
        F.jobs_from_env()


def test_scaled_keeps_ratios():
    p = F.scaled(CFG.params, 2 * math.pi * 5e3)
    assert p.duffing / p.omega == pytest.approx(CFG.params.duffing / CFG.params.omega)
    assert p.pump / p.omega == pytest.approx(CFG.params.pump / CFG.params.omega)
