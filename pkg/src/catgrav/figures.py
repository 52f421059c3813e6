"""Figure datasets and the sensitivity table as deterministic CSV + JSON.

Each figure generator returns a :class:`FigureData` holding one table per
curve (or surface, in long format) plus metadata.  Nothing here draws;
plotting is left to whatever consumes the CSV files.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import csv
import dataclasses
import io
import json
import math
import os
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import BaselineParams, calibrate, REFERENCE_SCALA, REFERENCE_WANG, s_scala, s_wang
from .config import ExperimentConfig
from .constants import to_microgal
from .dynamics import (
    effective_vs_full,
    evolve_closed_mcq,
    evolve_closed_mq,
    leakage_study,
    phase_flip_study,
)
from .environment import GasParams, gas_damping
from .errors import CatgravError, ConfigError
from .metrology import (
    derivative_step,
    mcq_envelope,
    mq_envelope,
    mq_limit,
    qfi_mcq_closed,
    qfi_mq_closed,
    qfi_sld,
    sensitivity_mcq_closed,
    sensitivity_mq_closed,
)
from .model import derive, tune_force

TWO_PI = 2.0 * math.pi
OMEGAS_KHZ = (5.0, 10.0, 20.0)
FIGURE_IDS = ("fig2a", "fig2b", "fig4a", "fig4b", "fig4c", "fig4d",
              "sm1", "sm3c", "sm3d", "sm4", "sm5a", "sm5b", "sm6")


@dataclass
class Table:
    columns: list
    rows: list


@dataclass
class FigureData:
    figure_id: str
    tables: dict
    meta: dict = field(default_factory=dict)


def jobs_from_env(jobs=None):
    if jobs is not None:
        return jobs
    raw = os.environ.get("CATGRAV_JOBS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"CATGRAV_JOBS must be an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError("CATGRAV_JOBS must be >= 1")
    return value


def parallel_map(fn, items, jobs=1):
    """Order-stable map; results come back in input order for any ``jobs``."""
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- helpers

def scaled(params, omega):
    """Same D/ω, P/ω and Q at a new frequency."""
    r = omega / params.omega
    return params.replace(omega=omega, duffing=params.duffing * r, pump=params.pump * r)


def with_mass(params, m):
    return params.replace(m=m, force=m * params.g)


def mq_ideal(params):
    """S₁ at t₁ = π/ω in the Ω₁ → 0⁺ limit."""
    return mq_limit(params)


def mq_dissipative(params, tol=1e-12):
    p = tune_force(params, omega1=0.02 * params.omega)
    return sensitivity_mq_closed(p, math.pi / params.omega, dissipative=True, tol=tol).value


def mcq_ideal(params):
    p = tune_force(params, omega2=math.pi * params.omega / 4.0)
    return sensitivity_mcq_closed(p, math.pi / (2.0 * params.omega)).value


def mcq_dissipative(params, numeric=False, tol=1e-12):
    p = tune_force(params, omega2=math.pi * params.omega / 4.0)
    t2 = math.pi / (2.0 * params.omega)
    if not numeric:
        return sensitivity_mcq_closed(p, t2, dissipative=True).value

    from .dynamics import evolve_mcq_thermal
    from .metrology import sensitivity_numeric

    def mean_o(g):
        traj = evolve_mcq_thermal(p.replace(g=g), [0.0, t2], mode="numeric", tol=tol)
        return traj.population(0)[-1]

    return sensitivity_numeric(mean_o, p.g, t2, derivative_step(p)).value


def baseline_sets(omega_ref, baseline=None):
    bp = baseline or BaselineParams()
    if baseline is not None and baseline.gamma_e_Bprime != 1.0:
        return {"scala": bp, "wang": bp}
    return {
        "scala": bp.replace(gamma_e_Bprime=calibrate(REFERENCE_SCALA, omega_ref, bp, "scala")),
        "wang": bp.replace(gamma_e_Bprime=calibrate(REFERENCE_WANG, omega_ref, bp, "wang")),
    }


def _mass_grid(points, lo=1e-12, hi=1e-8):
    return np.logspace(math.log10(lo), math.log10(hi), points)


def _qfi_mq_numeric(params):
    p = tune_force(params, omega1=1e-4 * params.omega)
    t1 = math.pi / params.omega
    return qfi_sld(lambda g: evolve_closed_mq(p.replace(g=g), t1)[0], p.g,
                   derivative_step(p), t1).value


def _qfi_mcq_numeric(params):
    p = tune_force(params, omega2=math.pi * params.omega / 4.0)
    t2 = math.pi / (2.0 * params.omega)
    return qfi_sld(lambda g: evolve_closed_mcq(p.replace(g=g), t2)[0], p.g,
                   derivative_step(p), t2).value


# ---------------------------------------------------------------- figures

def fig2a(cfg, points=9):
    tables = {}
    for khz in OMEGAS_KHZ:
        base = scaled(cfg.params, TWO_PI * khz * 1e3)
        rows = []
        for m in _mass_grid(points):
            p = with_mass(base, m)
            closed = qfi_mq_closed(tune_force(p, omega1=1e-4 * p.omega), math.pi / p.omega).value
            rows.append([m, closed, _qfi_mq_numeric(p)])
        tables[f"omega_{khz:g}kHz"] = Table(["m_kg", "qfi_closed_s4_per_m2", "qfi_sld_s4_per_m2"], rows)
    return FigureData("fig2a", tables, {"omega_khz": list(OMEGAS_KHZ), "t": "pi/omega",
                                         "omega1_over_omega": 1e-4})


def _fig2b_row(args):
    m, params, tol, bsets = args
    p = with_mass(params, m)
    return [m, to_microgal(mq_ideal(p)), to_microgal(mq_dissipative(p, tol)),
            to_microgal(s_scala(p.omega, bsets["scala"])), to_microgal(s_wang(p.omega, bsets["wang"]))]


def fig2b(cfg, points=9, jobs=1):
    bsets = baseline_sets(cfg.params.omega, cfg.baseline)
    rows = parallel_map(_fig2b_row, [(m, cfg.params, 1e-12, bsets) for m in _mass_grid(points)], jobs)
    return FigureData("fig2b", {"sensitivity_vs_mass": Table(
        ["m_kg", "S1_uGal", "S1_diss_uGal", "S_S_uGal", "S_W_uGal"], rows)},
        {"omega1_over_omega_diss": 0.02, "t1": "pi/omega"})


def fig4a(cfg, points=9):
    tables = {}
    for khz in OMEGAS_KHZ:
        base = scaled(cfg.params, TWO_PI * khz * 1e3)
        rows = []
        for m in _mass_grid(points):
            p = with_mass(base, m)
            rows.append([m, qfi_mcq_closed(p, math.pi / (2.0 * p.omega)).value, _qfi_mcq_numeric(p)])
        tables[f"omega_{khz:g}kHz"] = Table(["m_kg", "qfi_closed_s4_per_m2", "qfi_sld_s4_per_m2"], rows)
    return FigureData("fig4a", tables, {"omega_khz": list(OMEGAS_KHZ), "t": "pi/(2 omega)",
                                         "N": derive(cfg.params).N})


def fig4b(cfg, points=13):
    bsets = baseline_sets(cfg.params.omega, cfg.baseline)
    rows = []
    for m in _mass_grid(points, 1e-12, 1e-6):
        p = with_mass(cfg.params, m)
        rows.append([m, to_microgal(mcq_ideal(p)), to_microgal(mcq_dissipative(p)),
                     to_microgal(mq_ideal(p)), to_microgal(s_scala(p.omega, bsets["scala"])),
                     to_microgal(s_wang(p.omega, bsets["wang"]))])
    return FigureData("fig4b", {"sensitivity_vs_mass": Table(
        ["m_kg", "S2_uGal", "S2_diss_uGal", "S1_uGal", "S_S_uGal", "S_W_uGal"], rows)},
        {"omega2_over_omega": math.pi / 4.0, "t2": "pi/(2 omega)"})


def fig4c(cfg, points=13):
    bsets = baseline_sets(cfg.params.omega, cfg.baseline)
    rows = []
    for khz in np.logspace(0.0, 2.0, points):
        p = scaled(cfg.params, TWO_PI * khz * 1e3)
        rows.append([p.omega / TWO_PI, to_microgal(mcq_ideal(p)), to_microgal(mcq_dissipative(p)),
                     to_microgal(mq_ideal(p)), to_microgal(s_scala(p.omega, bsets["scala"])),
                     to_microgal(s_wang(p.omega, bsets["wang"]))])
    return FigureData("fig4c", {"sensitivity_vs_frequency": Table(
        ["f_Hz", "S2_uGal", "S2_diss_uGal", "S1_uGal", "S_S_uGal", "S_W_uGal"], rows)},
        {"m_kg": cfg.params.m, "baselines": "gamma_e_Bprime calibrated at the config frequency"})


def fig4d(cfg, points=11):
    rows = []
    for m in _mass_grid(points):
        for khz in np.logspace(0.0, 2.0, points):
            p = with_mass(scaled(cfg.params, TWO_PI * khz * 1e3), m)
            rows.append([m, p.omega / TWO_PI, to_microgal(mcq_ideal(p))])
    return FigureData("fig4d", {"S2_surface": Table(["m_kg", "f_Hz", "S2_uGal"], rows)}, {})


def sm1(cfg, points=2001, periods=5.0):
    p = tune_force(cfg.params, omega1=0.02 * cfg.params.omega)
    rows = []
    for t in np.linspace(0.0, periods * TWO_PI / p.omega, points)[1:]:
        try:
            s = sensitivity_mq_closed(p, t).microgal
        except CatgravError:
            s = math.nan
        rows.append([t, s, to_microgal(mq_envelope(p, t))])
    return FigureData("sm1", {"S1_vs_time": Table(["t_s", "S1_0_uGal", "S1_envelope_uGal"], rows)},
                      {"omega1_over_omega": 0.02, "periods": periods})


def _alpha2(params):
    return params.replace(duffing=0.1 * params.omega, pump=0.4 * params.omega)


def sm3c(cfg, points=501):
    p = _alpha2(cfg.params)
    rep = leakage_study(p, p.duffing, dim=cfg.dim, points=points)
    rows = [[t, a, b, rep.populations["mq_0"][i], rep.populations["mq_1"][i],
             rep.populations["mq_2"][i], rep.populations["mcq_even"][i], rep.populations["mcq_odd"][i]]
            for i, (t, a, b) in enumerate(zip(rep.times, rep.p_leak_mq, rep.p_leak_mcq))]
    return FigureData("sm3c", {"leakage": Table(
        ["t_s", "P1", "P2", "pop_0", "pop_1", "pop_2", "pop_even_cat", "pop_odd_cat"], rows)},
        {"alpha": 2.0, "omega_d_over_D": 1.0, **rep.meta})


def sm3d(cfg, points=41, kappa_times=1.0):
    p = _alpha2(cfg.params)
    d = derive(p)
    times = np.linspace(0.0, kappa_times / d.kappa, points)
    a1 = phase_flip_study(p, times, "MQ", dim=cfg.dim)
    a2 = phase_flip_study(p, times, "MCQ", dim=cfg.dim)
    rows = [[t, x, y] for t, x, y in zip(times, a1, a2)]
    return FigureData("sm3d", {"phase_flip": Table(["t_s", "A1", "A2"], rows)},
                      {"alpha": 2.0, "Q": p.Q, "window_kappa_t": kappa_times,
                       "method": "secular eigenbasis"})


def sm4(cfg, points=201, periods=2.0):
    p = cfg.params
    d = derive(p)
    p = tune_force(p, omega2=0.1 * d.omega_gap)
    times = np.linspace(0.0, periods * TWO_PI / p.omega, points)
    res = effective_vs_full(p, times, dim=cfg.dim, tol=cfg.tol)
    rows = [[t, a, b] for t, a, b in zip(res.times, res.full, res.effective)]
    return FigureData("sm4", {"even_cat_population": Table(["t_s", "full", "effective"], rows)},
                      {"omega2_over_gap": 0.1, "max_deviation": res.max_deviation, **res.meta})


def sm5a(cfg, points=2001, periods=5.0):
    p = tune_force(cfg.params, omega2=math.pi * cfg.params.omega / 4.0)
    rows = []
    for t in np.linspace(0.0, periods * TWO_PI / p.omega, points)[1:]:
        try:
            s = sensitivity_mcq_closed(p, t).microgal
        except CatgravError:
            s = math.nan
        rows.append([t, s, to_microgal(mcq_envelope(p, t))])
    return FigureData("sm5a", {"S2_vs_time": Table(["t_s", "S2_0_uGal", "S2_envelope_uGal"], rows)},
                      {"periods": periods})


def _sm5b_row(args):
    m, params = args
    p = with_mass(params, m)
    return [m, to_microgal(mcq_dissipative(p)), to_microgal(mcq_dissipative(p, numeric=True))]


def sm5b(cfg, points=9, jobs=1):
    rows = parallel_map(_sm5b_row, [(m, cfg.params) for m in _mass_grid(points)], jobs)
    return FigureData("sm5b", {"S2_diss_vs_mass": Table(
        ["m_kg", "S2_diss_analytic_uGal", "S2_diss_numeric_uGal"], rows)},
        {"omega2_over_omega": math.pi / 4.0})


def sm6(cfg, points=21):
    gas = cfg.gas or GasParams(temperature=cfg.params.T)
    rows = []
    for pr in np.logspace(-9.0, -4.0, points):
        k = gas_damping(cfg.params, dataclasses.replace(gas, pressure=pr)).kappa
        rows.append([pr, k / TWO_PI])
    return FigureData("sm6", {"gas_damping": Table(["pressure_Pa", "kappa_gas_over_2pi_Hz"], rows)},
                      {"pressure_range_Pa": [1e-9, 1e-4], "regime": "high-vacuum"})


GENERATORS = {
    "fig2a": fig2a, "fig2b": fig2b, "fig4a": fig4a, "fig4b": fig4b, "fig4c": fig4c,
    "fig4d": fig4d, "sm1": sm1, "sm3c": sm3c, "sm3d": sm3d, "sm4": sm4, "sm5a": sm5a,
    "sm5b": sm5b, "sm6": sm6,
}
PARALLEL = {"fig2b", "sm5b"}


def run_figure(figure_id, cfg=None, jobs=None):
    if figure_id not in GENERATORS:
        raise ConfigError(f"unknown figure id {figure_id!r}; choose from {', '.join(FIGURE_IDS)}")
    cfg = cfg or ExperimentConfig()
    if figure_id in PARALLEL:
        data = GENERATORS[figure_id](cfg, jobs=jobs_from_env(jobs))
    else:
        data = GENERATORS[figure_id](cfg)
    data.meta = {**data.meta, "config": cfg.to_dict()}
    return data


# ---------------------------------------------------------------- table

@dataclass(frozen=True)
class TableRow:
    scheme: str
    frequency_khz: float
    mass: float
    duffing_khz: float
    pump_khz: float
    sensing_time: str
    sensitivity_ugal: float
    provenance: str


def run_table1(cfg=None):
    """The six-row sensitivity comparison at the default parameter block."""
    cfg = cfg or ExperimentConfig()
    p = cfg.params
    bsets = baseline_sets(p.omega, cfg.baseline)
    f_khz = p.omega / TWO_PI / 1e3
    dk, pk = p.duffing / TWO_PI / 1e3, p.pump / TWO_PI / 1e3
    rows = [
        TableRow("S_S (spin, Scala)", f_khz, p.m, math.nan, math.nan,
                 f"t_S={bsets['scala'].t_S:g} s", to_microgal(s_scala(p.omega, bsets["scala"])),
                 "calibrated baseline"),
        TableRow("S_W (spin, Wang)", f_khz, p.m, math.nan, math.nan,
                 f"2t_W={2 * bsets['wang'].t_W:g} s", to_microgal(s_wang(p.omega, bsets["wang"])),
                 "calibrated baseline"),
        TableRow("S1 (MQ, ideal)", f_khz, p.m, dk, math.nan, "t1=pi/omega",
                 to_microgal(mq_ideal(p)), "analytic"),
        TableRow("S1_diss (MQ, thermal)", f_khz, p.m, dk, math.nan, "t1=pi/omega",
                 to_microgal(mq_dissipative(p)), "numeric"),
        TableRow("S2 (MCQ, ideal)", f_khz, p.m, dk, pk, "t2=pi/(2 omega)",
                 to_microgal(mcq_ideal(p)), "analytic"),
        TableRow("S2_diss (MCQ, thermal)", f_khz, p.m, dk, pk, "t2=pi/(2 omega)",
                 to_microgal(mcq_dissipative(p)), "analytic"),
    ]
    return rows, render_table(rows)


def render_table(rows):
    head = ["scheme", "f (kHz)", "m (kg)", "D/2pi (kHz)", "P/2pi (kHz)", "time", "S (uGal/rtHz)", "source"]
    body = [[r.scheme, f"{r.frequency_khz:g}", f"{r.mass:g}",
             "-" if math.isnan(r.duffing_khz) else f"{r.duffing_khz:g}",
             "-" if math.isnan(r.pump_khz) else f"{r.pump_khz:g}",
             r.sensing_time, f"{r.sensitivity_ugal:.4g}", r.provenance] for r in rows]
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    line = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    return "\n".join([line(head), line(["-" * w for w in widths])] + [line(b) for b in body])


# ---------------------------------------------------------------- output

def _cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def table_csv(table):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def write_figure(data, out_dir):
    """Write ``<id>_<curve>.csv`` files and ``<id>.json``; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name in sorted(data.tables):
        path = out / f"{data.figure_id}_{name}.csv"
        path.write_text(table_csv(data.tables[name]), encoding="utf-8")
        paths.append(path)
    sidecar = {
        "figure": data.figure_id,
        "software": {"package": "catgrav", "version": __version__},
        "files": [p.name for p in paths],
        "columns": {name: data.tables[name].columns for name in sorted(data.tables)},
        "meta": _jsonable(data.meta),
    }
    meta_path = out / f"{data.figure_id}.json"
    meta_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return paths + [meta_path]
