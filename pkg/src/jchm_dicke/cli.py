"""Command-line sweeps over the lattice and Dicke mean-field theories.

Usage::

    jchm-phase <command> [--config FILE] [--set key=value ...] --out PATH

Settings are resolved as built-in defaults, then the JSON config file, then
``--set`` overrides.  A value is a scalar, a list, or a range
``{"start": a, "stop": b, "count": n}``; sweeps run over the Cartesian
product of the list-valued keys in declaration order.  Energies may be given
in any unit: they are divided by ``g`` and every output energy is in units of
``g``.

Exit codes: 0 success, 2 configuration error, 3 fatal solver error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import bridge as br
from . import dicke as dk
from . import ed
from . import slave_boson as sb
from .bogoliubov import DynamicalInstability
from .jc_onsite import BRANCHES, ModelParams, chi_n, jc_energy, mixing_angle

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4

# failures that end one row, not the sweep
ROW_ERRORS = (sb.NoLobeError, sb.ConvergenceError, sb.SoundVelocityError,
              DynamicalInstability, ArithmeticError, ValueError)


class ConfigError(ValueError):
    pass


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class Command:
    name: str
    defaults: dict
    sweep: tuple            # keys that may hold lists, outermost first
    energies: tuple         # keys divided by g
    columns: tuple
    rows: object            # callable(point, cfg) -> list of row tuples
    tolerances: dict = field(default_factory=dict)
    plot: tuple = ()        # (x column, y columns) for the gnuplot script


def _params(cfg, **kw) -> ModelParams:
    base = dict(delta=cfg.get("delta", 0.0), mu_rel=cfg.get("mu_rel", 0.0), g=1.0,
                J=cfg.get("J", 0.0), D=int(cfg.get("D", 1)))
    base.update(kw)
    return ModelParams.from_detuning(**base)


# ---- lattice commands ------------------------------------------------------

def _onsite_rows(pt, cfg):
    p = _params(pt)
    # the vacuum |0, g> is the theta = 0 member of the lower family
    rows = [(0, -1, pt["delta"], 0.0, 0.0, 0.0)]
    for n in range(1, int(cfg["n_max"]) + 1):
        for s in BRANCHES:
            rows.append((n, s, pt["delta"], jc_energy(n, s, p), mixing_angle(n, p), chi_n(n, p)))
    return rows


def _boundary_rows(pt, cfg):
    n, delta = int(pt["n"]), pt["delta"]
    p = _params(pt, J=0.0)
    rows = []
    if n == 0:
        for J in np.linspace(0.0, cfg["J_max"], int(cfg["J_count"])):
            rows.append((n, delta, float(J), sb.mott_boundary(0, p.with_(J=float(J)), +1), +1))
        return rows
    tip = sb.lobe_tip(n, p)
    for J in np.linspace(0.0, tip.J, int(cfg["J_count"])):
        q = p.with_(J=float(J))
        for branch in (-1, +1):
            mu = tip.mu if J == tip.J else sb.mott_boundary(n, q, branch)
            rows.append((n, delta, float(J), mu - q.omega_c, branch))
    return rows


def _spectrum_rows(pt, cfg):
    p = _params(pt, mu_rel=0.0, J=0.0)
    tip = sb.lobe_tip(int(cfg["n"]), p)
    mu = tip.mu if cfg["mu_rel"] == "tip" else pt["mu_rel"] + p.omega_c
    J = pt["J_factor"] * tip.J if cfg["J"] == "tip" else pt["J"]
    sol = sb.solve(p.with_(J=J, mu=mu), n=int(cfg["n"]))
    rows = []
    for k in np.linspace(0.0, math.pi, int(cfg["k_count"])):
        vec = np.zeros(p.D)
        vec[0] = k
        lo, hi = sb.bogoliubov_spectrum(vec, sol)
        rows.append((J, float(k), lo, hi))
    return rows


def _fluct_rows(pt, cfg):
    p = _params(pt)
    sol = sb.solve(p, n=None if cfg["n"] == "auto" else int(cfg["n"]))
    return [(pt["delta"], pt["mu_rel"], pt["J"], sol.lobe.n, sol.theta, sol.phi_c, sol.e_var,
             sb.fluctuation_energy(sol, n_k=int(cfg["n_k"])))]


def _ed_rows(pt, cfg):
    p = _params(pt)
    spec = ed.LatticeSpec(int(cfg["n_sites"]), int(cfg["n_max"]), p, cfg["geometry"])
    gs = ed.ground_state(spec)
    sol = sb.solve(p)
    # product-state energy on the actual bonds; e_var counts z = 2 per site
    phi2 = sol.phi_c ** 2
    bound = spec.n_sites * (sol.e_var + p.z * p.J * phi2) - 2 * p.J * len(spec.bonds) * phi2
    return [(pt["delta"], pt["mu_rel"], pt["J"], gs.energy, bound, int(gs.energy <= bound),
             gs.filling, int(gs.converged))]


# ---- Dicke and comparison commands ----------------------------------------

def _dicke_boundary_rows(pt, cfg):
    dd = pt["delta_d"]
    rows = [(dd, "vacuum", dk.vacuum_boundary_t0(dd))]
    if dd <= -2.0:
        lo, hi = dk.boundary_t0(dd)
        rows += [(dd, "lobe_lower", lo), (dd, "lobe_upper", hi)]
    return rows


def _dicke_spectrum_rows(pt, cfg):
    d = dk.DickeParams(pt["mu_d"], pt["delta_d"], J=pt["J"])
    sol = dk.condensate_t0(d)
    return [(d.mu_d, d.delta_d, d.J, float(k), *dk.spectrum(float(k), d, sol), sol.psi0_sq,
             int(sol.superradiant))
            for k in np.linspace(0.0, cfg["k_max"], int(cfg["k_count"]))]


def _tc_rows(pt, cfg):
    d = dk.DickeParams(pt["mu_d"], pt["delta_d"])
    tcs = [sb.critical_temperature(br.lattice_params(d.mu_d, d.delta_d, J, int(cfg["D"])),
                                   T_max=cfg["T_max"]) for J in cfg["J_list"]]
    return [(d.delta_d, d.mu_d, *tcs, dk.tc_solve(d, T_max=cfg["T_max"]).tc)]


def _compare_rows(pt, cfg):
    D = int(pt["D"])
    J_values = tuple(cfg["J_list"])
    tip_d, tip_mu = br.lobe_tip_match(1.0, D, J_values)
    gap = br.amplitude_gap_match(cfg["delta_d"], 1.0, D, J_values)
    rows = []
    for name, cmp in (("tip_delta_d", tip_d), ("tip_mu_d", tip_mu), ("amplitude_gap", gap)):
        for J, v in zip(cmp.J_values, cmp.sb_values):
            rows.append((name, D, J, v, cmp.dicke_value, abs(v - cmp.dicke_value)))
        rows.append((name, D, math.inf, cmp.extrapolated, cmp.dicke_value, cmp.abs_error))
    for J in J_values:
        sup = br.boundary_match(J, D).sup_norm
        rows.append(("boundary_sup_norm", D, J, sup, 0.0, sup))
        v = br.sound_velocity_match(1.0, D, J)
        rows.append(("sound_velocity", D, J, v.c_sb, v.c_formula, abs(v.c_sb - v.c_formula)))
    return rows


def _range(v):
    if isinstance(v, dict):
        try:
            start, stop, count = float(v["start"]), float(v["stop"]), int(v["count"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad range {v!r}") from exc
        if count < 1:
            raise ConfigError("range count must be >= 1")
        return [float(x) for x in np.linspace(start, stop, count)]
    if isinstance(v, list):
        if not v:
            raise ConfigError("empty list")
        return v
    return [v]


COMMANDS = {c.name: c for c in (
    Command("onsite", dict(delta=0.0, mu_rel=0.0, n_max=4, g=1.0), ("delta",), ("delta", "mu_rel"),
            ("n", "sigma", "delta_over_g", "energy_over_g", "mixing_angle", "chi_n_over_g"),
            _onsite_rows, plot=("n", ("energy_over_g",))),
    Command("boundary", dict(n=[1, 2, 3], delta=[-1.0, -0.5, 0.0, 0.5, 1.0], D=1, J_count=41,
                             J_max=0.2, g=1.0),
            ("n", "delta"), ("delta", "J_max"),
            ("n", "delta", "J_over_g", "mu_minus_omega_c_over_g", "branch"),
            _boundary_rows, plot=("J_over_g", ("mu_minus_omega_c_over_g",))),
    Command("spectrum", dict(delta=0.0, mu_rel="tip", J="tip", J_factor=[0.5, 1.0, 1.5], n=1,
                             D=2, k_count=65, g=1.0),
            ("J_factor", "J", "mu_rel"), ("delta", "mu_rel", "J"),
            ("J_over_g", "k", "eps_minus_over_g", "eps_plus_over_g"),
            _spectrum_rows, tolerances=dict(goldstone=1e-8, angle_polish_dps=40),
            plot=("k", ("eps_minus_over_g", "eps_plus_over_g"))),
    Command("fluct", dict(delta=0.0, mu_rel=-0.7, J=[0.0, 0.01, 0.02, 0.03], D=2, n="auto",
                          n_k=64, g=1.0),
            ("delta", "mu_rel", "J"), ("delta", "mu_rel", "J"),
            ("delta_over_g", "mu_rel_over_g", "J_over_g", "n", "theta", "phi_c", "e_var_over_g",
             "e_fluct_over_g"),
            _fluct_rows, tolerances=dict(gradient=1e-10),
            plot=("J_over_g", ("e_fluct_over_g",))),
    Command("dicke-boundary", dict(delta_d={"start": -5.0, "stop": 1.0, "count": 61}, g=1.0),
            ("delta_d",), ("delta_d",),
            ("delta_d_over_g", "boundary", "mu_d_over_g"),
            _dicke_boundary_rows, plot=("delta_d_over_g", ("mu_d_over_g",))),
    Command("dicke-spectrum", dict(mu_d=-1.0, delta_d=-2.0, J=1.0, k_max=2.0, k_count=41, g=1.0),
            ("mu_d", "delta_d", "J"), ("mu_d", "delta_d", "J"),
            ("mu_d_over_g", "delta_d_over_g", "J_over_g", "k", "eps_minus_over_g",
             "eps_plus_over_g", "psi0_sq", "superradiant"),
            _dicke_spectrum_rows, plot=("k", ("eps_minus_over_g", "eps_plus_over_g"))),
    Command("tc", dict(delta_d=-3.0, mu_d={"start": -3.5, "stop": -0.05, "count": 70},
                       J_list=[10.0, 30.0, 100.0], D=2, T_max=100.0, g=1.0),
            ("delta_d", "mu_d"), ("delta_d", "mu_d", "J_list", "T_max"),
            None, _tc_rows, tolerances=dict(bisection_rtol=1e-10),
            plot=("mu_d_over_g", ("Tc_dicke_over_g",))),
    Command("compare", dict(D=2, delta_d=-3.0, J_list=[10.0, 30.0, 100.0, 300.0], g=1.0),
            ("D",), ("delta_d", "J_list"),
            ("observable", "D", "J_over_g", "slave_boson", "reference", "abs_error"),
            _compare_rows, tolerances=dict(extrapolation="quadratic in 1/J")),
    Command("ed-check", dict(delta=0.0, mu_rel=-0.7, J=[0.01, 0.05, 0.1], n_sites=2, n_max=8,
                             geometry="periodic", g=1.0),
            ("delta", "mu_rel", "J"), ("delta", "mu_rel", "J"),
            ("delta_over_g", "mu_rel_over_g", "J_over_g", "E_ed_over_g", "E_var_over_g",
             "bound_ok", "filling", "cutoff_converged"),
            _ed_rows, tolerances=dict(cutoff=1e-8)),
)}


def columns_for(cmd: Command, cfg: dict) -> tuple:
    if cmd.name == "tc":
        return (("delta_d_over_g", "mu_d_over_g")
                + tuple(f"Tc_jchm_J{J:g}_over_g" for J in cfg["J_list"]) + ("Tc_dicke_over_g",))
    return cmd.columns


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def resolve_config(cmd: Command, file_cfg: dict | None, overrides: list[str]) -> dict:
    """Defaults, then the config file, then ``key=value`` overrides."""
    cfg = dict(cmd.defaults)
    layers = [file_cfg or {}]
    extra = {}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        extra[key.strip()] = _parse_value(value.strip())
    layers.append(extra)
    for layer in layers:
        if not isinstance(layer, dict):
            raise ConfigError("config must be a JSON object")
        for key, value in layer.items():
            if key in ("command", "out"):
                continue
            if key not in cmd.defaults:
                raise ConfigError(f"unknown key {key!r} for command {cmd.name!r}")
            cfg[key] = value
    g = cfg.get("g", 1.0)
    if not isinstance(g, (int, float)) or not g > 0:
        raise ConfigError("g must be a positive number")
    for key, value in cfg.items():
        if isinstance(value, (list, dict)) and key not in cmd.sweep and key != "J_list":
            raise ConfigError(f"key {key!r} cannot be swept")
        if isinstance(value, dict):
            cfg[key] = _range(value)
    for key in cmd.energies:
        try:
            if isinstance(cfg[key], list):
                cfg[key] = [v / g if isinstance(v, (int, float)) else v for v in cfg[key]]
            elif isinstance(cfg[key], (int, float)):
                cfg[key] = cfg[key] / g
        except TypeError as exc:
            raise ConfigError(f"bad value for {key!r}") from exc
    cfg["g"] = 1.0
    cfg["g_input"] = g
    return cfg


def sweep_points(cmd: Command, cfg: dict) -> list[dict]:
    keys = [k for k in cmd.sweep if k in cfg]
    values = [_range(cfg[k]) for k in keys]
    return [dict(cfg, **dict(zip(keys, combo))) for combo in itertools.product(*values)]


def _format(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v) + 0.0)  # folds -0.0 into 0.0
    return str(v)


def _point_label(cmd: Command, pt: dict) -> dict:
    return {k: pt[k] for k in cmd.sweep if k in pt}


def _run_point(args):
    name, pt = args
    cmd = COMMANDS[name]
    try:
        return [tuple(r) for r in cmd.rows(pt, pt)], None
    except ROW_ERRORS as exc:
        return [], f"{type(exc).__name__}: {exc}".replace("\n", " ")


def compute(cmd: Command, cfg: dict, workers: int = 1):
    """Rows for every sweep point, in sweep order regardless of ``workers``."""
    points = sweep_points(cmd, cfg)
    jobs = [(cmd.name, pt) for pt in points]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(j) for j in jobs]
    return points, results


def render_csv(cmd: Command, cfg: dict, points, results) -> str:
    cols = columns_for(cmd, cfg)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(cols) + ["error"])
    for pt, (rows, err) in zip(points, results):
        if err is not None:
            label = json.dumps(_point_label(cmd, pt), sort_keys=True)
            w.writerow([""] * len(cols) + [f"{err} at {label}"])
            continue
        for r in rows:
            w.writerow([_format(v) for v in r] + [""])
    return buf.getvalue()


def sidecar(cmd: Command, cfg: dict) -> dict:
    return dict(command=cmd.name, version=__version__, config=cfg,
                tolerances=cmd.tolerances, energy_unit="g")


def gnuplot_script(cmd: Command, csv_name: str, cfg: dict) -> str:
    if not cmd.plot:
        return ""
    cols = list(columns_for(cmd, cfg))
    x, ys = cmd.plot
    if cmd.name == "tc":
        ys = tuple(c for c in cols if c.startswith("Tc_"))
    lines = ["set datafile separator ','", f"set xlabel '{x}'", "set key autotitle columnhead"]
    parts = [f"'{csv_name}' using {cols.index(x) + 1}:{cols.index(y) + 1} with points"
             for y in ys]
    lines.append("plot " + ", ".join(parts))
    return "\n".join(lines) + "\n"


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jchm-phase", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", type=Path, help="JSON settings file")
    ap.add_argument("--set", dest="overrides", action="append", default=[],
                    metavar="KEY=VALUE", help="override one setting (JSON value)")
    ap.add_argument("--out", type=Path, required=True, help="CSV output path")
    ap.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")
    ap.add_argument("--workers", type=int, default=1, help="worker processes for the sweep")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    cmd = COMMANDS[args.command]
    try:
        file_cfg = None
        if args.config is not None:
            file_cfg = json.loads(args.config.read_text(encoding="utf-8"))
        cfg = resolve_config(cmd, file_cfg, args.overrides)
        sweep_points(cmd, cfg)
    except OSError as exc:
        return _error("io", str(exc), EXIT_IO)
    except (ConfigError, json.JSONDecodeError, ValueError, TypeError) as exc:
        return _error("config", str(exc), EXIT_CONFIG)
    if args.workers < 1:
        return _error("config", "--workers must be >= 1", EXIT_CONFIG)
    try:
        points, results = compute(cmd, cfg, args.workers)
    except Exception as exc:  # anything not confined to one row is fatal
        return _error("solver", f"{type(exc).__name__}: {exc}", EXIT_SOLVER)
    if results and all(err is not None for _, err in results):
        text = render_csv(cmd, cfg, points, results)
        code = EXIT_SOLVER
    else:
        text, code = render_csv(cmd, cfg, points, results), EXIT_OK
    try:
        out = args.out
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        side = out.with_name(out.name + ".json")
        side.write_text(json.dumps(sidecar(cmd, cfg), indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        if args.gnuplot:
            out.with_name(out.name + ".gp").write_text(gnuplot_script(cmd, out.name, cfg),
                                                       encoding="utf-8")
    except OSError as exc:
        return _error("io", str(exc), EXIT_IO)
    if code == EXIT_SOLVER:
        return _error("solver", "every sweep point failed", EXIT_SOLVER)
    return code


if __name__ == "__main__":
    sys.exit(main())
