"""Command-line front end: ``kerrfpi <verb> [--config FILE] [flags]``.

Configuration is an INI file. Values are resolved in this order, later
ones winning: built-in defaults, the config file, environment variables
``KERRFPI__<SECTION>__<KEY>``, then command-line flags (``--mode``,
``--units``, ``--seed``, ``--tol`` and generic ``--set section.key=value``).

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 selfcheck failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, feasibility, oracle, spectra
from .errors import (
    ConfigurationError,
    InvalidParameterError,
    KerrFPIError,
    MonochromaticInputError,
    QuadratureError,
    SolverError,
)
from .params import MODES, PhysicalParams, derive_rates, nonlinear_detuning
from .selfcheck import run_selfcheck
from .stationary import bistability_boundary, output_power, stationary_photon_numbers
from .sweep import sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_SELFCHECK = 4

ENV_PREFIX = "KERRFPI__"
COMMANDS = ("roots", "boundary", "spectra", "sweep", "feasibility", "selfcheck")

DEFAULTS: dict[str, dict[str, str]] = {
    "params": {
        "mode": "quantum",
        "units": "normalized",
        "delta0": "4.4",
        "delta1": "1.8",
        "kappa_in": "0.5",
        "kappa_out": "0.5",
        "kappa_abs": "0",
        "kappa_s": "1",
        "p_eff": "1.3",
    },
    "grid": {"control": "delta0", "start": "0", "stop": "10", "num": "201"},
    "boundary": {"modes": "quantum,semiclassical"},
    "spectra": {"num": "401", "tol": "1e-8", "fluct": "true"},
    "sweep": {"direction": "both"},
    "medium": {
        "tilde_n2": "1e-6",
        "n0": "3.3",
        "lambda0": "1.55e-6",
        "volume": "auto",
        "Q": "1000",
        "m": "1",
        "n": "1",
    },
    "selfcheck": {"draws": "2000", "seed": "0", "grid_points": "4001"},
}

RATE_KEYS = ("delta0", "delta1", "kappa_in", "kappa_out", "kappa_abs", "kappa_s", "p_in", "p_eff")


class ConfigError(KerrFPIError, ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    sections: dict[str, dict[str, str]]
    curves: dict[str, dict[str, str]] = field(default_factory=dict)
    out: str | None = None

    def get(self, section: str, key: str, default: str | None = None) -> str:
        try:
            return self.sections[section][key]
        except KeyError:
            if default is not None:
                return default
            raise ConfigError(f"missing [{section}] {key}") from None

    def getfloat(self, section: str, key: str, default: float | None = None) -> float:
        raw = self.get(section, key, None if default is None else repr(default))
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from None

    def getint(self, section: str, key: str) -> int:
        raw = self.get(section, key)
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key} = {raw!r} is not an integer") from None

    def getbool(self, section: str, key: str) -> bool:
        raw = self.get(section, key).strip().lower()
        if raw in ("1", "true", "yes", "on"):
            return True
        if raw in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a boolean")


# ---------------------------------------------------------------------------
# config resolution
# ---------------------------------------------------------------------------


def load_config(args: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    sections = {name: dict(values) for name, values in DEFAULTS.items()}
    curves: dict[str, dict[str, str]] = {}

    if args.config:
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
        parser.optionxform = str
        try:
            with open(args.config, encoding="utf-8") as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        for name in parser.sections():
            if name.startswith("curve:"):
                curves[name.split(":", 1)[1].strip()] = dict(parser[name])
            else:
                sections.setdefault(name, {}).update(parser[name])
        if "p_in" in parser["params"] if parser.has_section("params") else False:
            if "p_eff" not in parser["params"]:
                sections["params"].pop("p_eff", None)

    for key, value in sorted(environ.items()):
        if not key.startswith(ENV_PREFIX):
            continue
        parts = key[len(ENV_PREFIX):].split("__")
        if len(parts) != 2:
            raise ConfigError(f"environment override {key} must look like {ENV_PREFIX}SECTION__KEY")
        sec, k = parts[0].lower(), parts[1]
        k = next((name for name in sections.get(sec, {}) if name.lower() == k.lower()), k.lower())
        sections.setdefault(sec, {})[k] = value

    if args.mode:
        sections["params"]["mode"] = args.mode
    if args.units:
        sections["params"]["units"] = args.units
    if args.seed is not None:
        sections["selfcheck"]["seed"] = str(args.seed)
    if args.tol is not None:
        sections["spectra"]["tol"] = repr(args.tol)
    for item in args.set or []:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        lhs, value = item.split("=", 1)
        sec, k = lhs.split(".", 1)
        if sec.startswith("curve:"):
            curves.setdefault(sec.split(":", 1)[1], {})[k] = value
        else:
            sections.setdefault(sec, {})[k] = value
    if "p_in" in sections["params"] and "p_eff" in sections["params"]:
        raise ConfigError("give either p_in or p_eff in [params], not both")
    return RunConfig(args.command, sections, curves, args.out)


def _unit_scale(values: dict[str, str]) -> float:
    units = values.get("units", "normalized")
    if units == "physical":
        return 1.0
    if units != "normalized":
        raise ConfigError(f"units must be 'normalized' or 'physical', got {units!r}")
    kc = sum(float(values.get(k, "0")) for k in ("kappa_in", "kappa_out", "kappa_abs"))
    if not kc > 0:
        raise ConfigError("kappa_in + kappa_out + kappa_abs must be > 0")
    return kc


def build_params(values: dict[str, str]) -> tuple[PhysicalParams, float]:
    """PhysicalParams from a flat key/value block, plus the unit scale applied."""
    mode = values.get("mode", "quantum")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    try:
        num = {k: float(values[k]) for k in RATE_KEYS if k in values}
    except ValueError as exc:
        raise ConfigError(f"bad number in parameters: {exc}") from None
    missing = [k for k in ("delta0", "delta1", "kappa_in") if k not in num]
    if missing:
        raise ConfigError(f"missing parameters: {', '.join(missing)}")
    s = _unit_scale(values)
    num = {k: v / s for k, v in num.items()}
    p = PhysicalParams(
        delta0=num["delta0"],
        delta1=num["delta1"],
        kappa_in=num["kappa_in"],
        kappa_out=num.get("kappa_out", 0.0),
        kappa_abs=num.get("kappa_abs", 0.0),
        kappa_s=num.get("kappa_s", 0.0),
        p_in=num.get("p_in", 0.0),
        mode=mode,
    )
    if "p_eff" in num:
        p = p.with_p_eff(num["p_eff"])
    return p, s


def _grid(cfg: RunConfig, scale: float) -> tuple[str, np.ndarray]:
    control = cfg.get("grid", "control")
    if control not in ("delta0", "p_eff"):
        raise ConfigError(f"[grid] control must be delta0 or p_eff, got {control!r}")
    if "values" in cfg.sections["grid"]:
        raw = cfg.get("grid", "values").strip()
        try:
            grid = np.array([float(v) for v in raw.split(",") if v.strip()], dtype=float)
        except ValueError:
            raise ConfigError(f"[grid] values = {raw!r} is not a list of numbers") from None
    else:
        num = cfg.getint("grid", "num")
        grid = np.linspace(cfg.getfloat("grid", "start"), cfg.getfloat("grid", "stop"), max(num, 0))
    if grid.size == 0:
        raise ConfigError("grid is empty")
    if not np.all(np.isfinite(grid)):
        raise ConfigError("grid contains non-finite values")
    return control, grid / scale


def _curves(cfg: RunConfig) -> list[tuple[str, PhysicalParams, float]]:
    base = cfg.sections["params"]
    if not cfg.curves:
        p, s = build_params(base)
        return [("main", p, s)]
    out = []
    for name in sorted(cfg.curves):
        merged = dict(base)
        if "p_in" in cfg.curves[name]:
            merged.pop("p_eff", None)
        if "p_eff" in cfg.curves[name]:
            merged.pop("p_in", None)
        merged.update(cfg.curves[name])
        p, s = build_params(merged)
        out.append((name, p, s))
    return out


def _at(p: PhysicalParams, control: str, value: float) -> PhysicalParams:
    return p.with_p_eff(value) if control == "p_eff" else p.replace(delta0=value)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def _resolved(cfg: RunConfig, extra: dict | None = None) -> dict:
    meta = {"command": cfg.command, "version": __version__, "config": cfg.sections}
    if cfg.curves:
        meta["curves"] = cfg.curves
    if extra:
        meta.update(extra)
    return meta


def write_csv(cfg: RunConfig, header: list[str], rows, meta: dict) -> None:
    buf = io.StringIO(newline="")
    buf.write("# kerrfpi " + json.dumps(meta, sort_keys=True, default=_json_default) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    _emit(cfg, buf.getvalue())


def _json_default(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"not JSON serializable: {type(v).__name__}")


def write_json(cfg: RunConfig, payload) -> None:
    _emit(cfg, json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_roots(cfg: RunConfig) -> int:
    curves = _curves(cfg)
    header = ["curve", "mode", "control", "value", "root_index", "n", "branch", "stability", "residual", "p_out"]
    rows = []
    resolved = {}
    for name, p, s in curves:
        control, grid = _grid(cfg, s)
        resolved[name] = p.as_dict()
        for v in grid:
            q = _at(p, control, float(v))
            for i, st in enumerate(stationary_photon_numbers(q)):
                rows.append([name, p.mode, control, float(v), i, st.n, st.branch,
                             st.stability_label, st.residual, output_power(q, st)])
    write_csv(cfg, header, rows, _resolved(cfg, {"resolved_params": resolved}))
    return EXIT_OK


def cmd_boundary(cfg: RunConfig) -> int:
    modes = [m.strip() for m in cfg.get("boundary", "modes").split(",") if m.strip()]
    for m in modes:
        if m not in MODES:
            raise ConfigError(f"[boundary] modes: unknown mode {m!r}")
    base = dict(cfg.sections["params"])
    header = ["mode", "delta0", "exists", "n_minus", "n_plus", "p_minus", "p_plus", "delta_min"]
    rows = []
    resolved = {}
    for m in modes:
        p, s = build_params({**base, "mode": m})
        resolved[m] = p.as_dict()
        cfg_grid = RunConfig(cfg.command, {**cfg.sections, "grid": {**cfg.sections["grid"], "control": "delta0"}})
        _, grid = _grid(cfg_grid, s)
        for d0 in grid:
            b = bistability_boundary(p.replace(delta0=float(d0)))
            rows.append([m, float(d0), b.exists, b.n_minus, b.n_plus, b.p_minus, b.p_plus, b.delta_min])
    write_csv(cfg, header, rows, _resolved(cfg, {"resolved_params": resolved}))
    return EXIT_OK


def cmd_spectra(cfg: RunConfig) -> int:
    p, s = build_params(cfg.sections["params"])
    if p.kappa_s <= 0.0:
        raise MonochromaticInputError("spectral densities need kappa_s > 0 (quantum mode with a finite input linewidth)")
    tol = cfg.getfloat("spectra", "tol")
    num = cfg.getint("spectra", "num")
    if num < 2:
        raise ConfigError("[spectra] num must be >= 2")
    with_fluct = cfg.getbool("spectra", "fluct")
    states = [st for st in stationary_photon_numbers(p) if st.stable]
    if "omega_min" in cfg.sections["spectra"] or "omega_max" in cfg.sections["spectra"]:
        lo = cfg.getfloat("spectra", "omega_min") / s
        hi = cfg.getfloat("spectra", "omega_max") / s
        if not hi > lo:
            raise ConfigError("[spectra] omega_max must exceed omega_min")
        grid = np.linspace(lo, hi, num)
    else:
        dns = [float(nonlinear_detuning(p, st.n)) for st in states]
        W = 50.0 * max(derive_rates(p).kappa_eff, p.kappa_s)
        grid = np.linspace(min([0.0] + dns) - W, max([0.0] + dns) + W, num)

    header = ["state", "n", "branch", "omega", "input", "cavity", "output", "commutator", "photon_fluct",
              "int_cavity", "int_commutator", "int_photon_fluct", "n_times_n_plus_1"]
    rows = []
    for k, st in enumerate(states):
        n = st.n
        cav = spectra.spectrum("cavity_field", grid, p, n, rtol=tol)
        com = spectra.spectrum("commutator", grid, p, n, rtol=tol)
        inp = spectra.input_spectrum(grid, p)
        outp = spectra.output_spectrum(grid, p, n)
        if with_fluct:
            fl = spectra.photon_fluct_spectrum(grid, p, n, rtol=tol, with_total=True)
            fl_vals, fl_total = fl.values, fl.total
        else:
            fl_vals, fl_total = np.full(grid.shape, math.nan), math.nan
        for j, w in enumerate(grid):
            rows.append([k, n, st.branch, w, inp[j], cav.values[j], outp[j], com.values[j], fl_vals[j],
                         cav.total, com.total, fl_total, n * (n + 1.0)])
    write_csv(cfg, header, rows, _resolved(cfg, {"resolved_params": p.as_dict()}))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    p, s = build_params(cfg.sections["params"])
    control, grid = _grid(cfg, s)
    direction = cfg.get("sweep", "direction")
    if direction not in ("up", "down", "both"):
        raise ConfigError(f"[sweep] direction must be up, down or both, got {direction!r}")
    asc = np.sort(grid)
    if np.any(np.diff(asc) <= 0):
        raise ConfigError("sweep grid values must be distinct")
    runs = []
    if direction in ("up", "both"):
        runs.append(sweep(p, control, asc, "up"))
    if direction in ("down", "both"):
        runs.append(sweep(p, control, asc[::-1], "down"))
    header = ["direction", "index", "control", "value", "n", "branch", "jump", "from_n"]
    rows = []
    for tr in runs:
        jumps = {j.index: j for j in tr.jumps}
        for i, (v, st) in enumerate(zip(tr.grid, tr.states)):
            j = jumps.get(i)
            rows.append([tr.direction, i, control, v, st.n, st.branch, j is not None,
                         j.from_n if j else math.nan])
    jumps_meta = {tr.direction: [[j.index, float(tr.grid[j.index]), j.from_n, j.to_n] for j in tr.jumps]
                  for tr in runs}
    write_csv(cfg, header, rows, _resolved(cfg, {"resolved_params": p.as_dict(), "jumps": jumps_meta}))
    return EXIT_OK


def cmd_feasibility(cfg: RunConfig) -> int:
    n0 = cfg.getfloat("medium", "n0")
    lam = cfg.getfloat("medium", "lambda0")
    vol_raw = cfg.get("medium", "volume").strip().lower()
    V = None if vol_raw == "auto" else cfg.getfloat("medium", "volume")
    m_raw = cfg.getfloat("medium", "m")
    if m_raw != int(m_raw):
        raise ConfigError("[medium] m must be an integer")
    spec = feasibility.KerrMediumSpec.from_cm2_per_kw(
        cfg.getfloat("medium", "tilde_n2"), n0, lam, V, cfg.getfloat("medium", "Q"), int(m_raw)
    )
    n = cfg.getfloat("medium", "n")
    res = feasibility.bistability_feasible(spec, n)
    mn = feasibility.min_tilde_n2(spec)
    report = {
        "inputs": {
            "tilde_n2_cm2_per_kW": cfg.getfloat("medium", "tilde_n2"),
            "n0": n0,
            "lambda0_m": lam,
            "V_m3": spec.V,
            "Q": spec.Q,
            "m": spec.m,
            "n_photons": n,
        },
        "omega0_rad_s": spec.omega0,
        "kappa_eff_rad_s": spec.kappa_eff,
        "photon_intensity_W_m2": feasibility.photon_intensity(spec),
        "n2_per_photon": feasibility.n2_per_photon(spec),
        "delta1_rad_s": feasibility.kerr_delta1(spec),
        "mode_frequency_rad_s": feasibility.mode_frequency(spec, n),
        "refractive_index": feasibility.refractive_index(spec, n),
        "min_tilde_n2_m2_per_W": mn,
        "min_tilde_n2_cm2_per_W": feasibility.si_to_cm2_per_w(mn),
        "min_tilde_n2_cm2_per_kW": feasibility.si_to_cm2_per_kw(mn),
        "margin": res.margin,
        "feasible": res.feasible,
        "detuning_sign": res.detuning_sign,
    }
    write_json(cfg, report)
    return EXIT_OK


def cmd_selfcheck(cfg: RunConfig) -> int:
    seed = cfg.getint("selfcheck", "seed")
    reports = run_selfcheck(
        seed=seed,
        draws=cfg.getint("selfcheck", "draws"),
        grid_points=cfg.getint("selfcheck", "grid_points"),
    )
    ok = all(r.passed for r in reports)
    write_json(cfg, {"seed": seed, "passed": ok, "reports": [r.as_dict() for r in reports]})
    return EXIT_OK if ok else EXIT_SELFCHECK


HANDLERS = {
    "roots": cmd_roots,
    "boundary": cmd_boundary,
    "spectra": cmd_spectra,
    "sweep": cmd_sweep,
    "feasibility": cmd_feasibility,
    "selfcheck": cmd_selfcheck,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI config file")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--mode", choices=MODES)
    common.add_argument("--units", choices=("normalized", "physical"))
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="override one config value")
    parser = argparse.ArgumentParser(prog="kerrfpi", description="Few-photon Kerr cavity bistability toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = load_config(args)
        return HANDLERS[cfg.command](cfg)
    except (ConfigError, InvalidParameterError, MonochromaticInputError, ConfigurationError) as exc:
        print(f"kerrfpi: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, QuadratureError) as exc:
        print(f"kerrfpi: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
