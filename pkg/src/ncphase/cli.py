"""Command-line front end.

    ncphase [--config job.ini] [overrides] spectrum
    ncphase wigner-grid --n1 1 --coords original --axis1 x1 --axis2 p1
    ncphase verify algebra --backend exact
    ncphase evolve --tau 0.5

Configuration is an INI file with sections [deformation], [oscillator],
[quantum], [grid], [evolution], [verify], [numerics] and [output]. Every key
can be overridden by a flag of the same name. Precedence: built-in default,
then config file, then flag.

Exit status: 0 success, 1 verification failure, 2 configuration or
validation error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import sys
from fractions import Fraction

import numpy as np

from . import oscillators as osc
from . import verify as vf
from .errors import NcPhaseError
from .poly import DeformationParams, gausslag_eval, grid_normalize
from .scalars import BACKENDS, EXACT

log = logging.getLogger("ncphase")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

COMMANDS = ("spectrum", "wigner-grid", "verify", "evolve")

AXES = {
    "original": {"x1": 0, "x2": 1, "p1": 2, "p2": 3},
    "normal": {"y1": 0, "y2": 1, "q1": 2, "q2": 3},
}


class ConfigError(ValueError):
    pass


def _rational(text):
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def _finite(text):
    try:
        v = float(text)
    except ValueError as exc:
        raise ConfigError(f"not a number: {text!r}") from exc
    if not math.isfinite(v):
        raise ConfigError(f"value must be finite, got {text!r}")
    return v


def _optional_float(text):
    return None if str(text).strip().lower() in ("", "none") else _finite(text)


def _count(text):
    try:
        v = int(text)
    except ValueError as exc:
        raise ConfigError(f"not an integer: {text!r}") from exc
    if v < 0:
        raise ConfigError(f"expected a non-negative integer, got {v}")
    return v


def _bool(text):
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _floats(text):
    return tuple(_finite(v) for v in str(text).split(",") if v.strip())


def _choice(*options):
    def parse(text):
        s = str(text).strip()
        if s not in options:
            raise ConfigError(f"expected one of {', '.join(options)}, got {s!r}")
        return s

    return parse


# section -> key -> (parser, default)
SCHEMA = {
    "deformation": {"hbar": (_rational, "1"), "mu": (_rational, "0"), "nu": (_rational, "0")},
    "oscillator": {
        "m1": (_finite, "1"),
        "m2": (_finite, "1"),
        "C1": (_finite, "1"),
        "C2": (_finite, "1"),
        "C3": (_finite, "0"),
    },
    "quantum": {"n1": (_count, "0"), "n2": (_count, "0"), "n1_max": (_count, "2"), "n2_max": (_count, "2")},
    "grid": {
        "coords": (_choice("normal", "original"), "normal"),
        "axis1": (str, "y1"),
        "axis2": (str, "q1"),
        "axis1_min": (_finite, "-3"),
        "axis1_max": (_finite, "3"),
        "axis1_count": (_count, "41"),
        "axis2_min": (_finite, "-3"),
        "axis2_max": (_finite, "3"),
        "axis2_count": (_count, "41"),
        "fixed": (_floats, "0,0,0,0"),
        "normalize": (_bool, "false"),
    },
    "evolution": {"t": (_optional_float, "none"), "tau": (_optional_float, "none")},
    "verify": {
        "suite": (_choice(*vf.SUITES), "algebra"),
        "samples": (_count, "200"),
        "hamiltonians": (_count, "20"),
        "seed": (_count, "0"),
        "n_max": (_count, "5"),
        "n_terms": (_count, "25"),
        "taus": (_floats, "0.3,0.5,1.0"),
    },
    "numerics": {"backend": (_choice(*BACKENDS), EXACT), "tolerance": (_optional_float, "none")},
    "output": {"out": (str, "-"), "format": (_choice("csv", "json"), "csv")},
}


def _key_section():
    index = {}
    for section, keys in SCHEMA.items():
        for key in keys:
            index[key] = section
    return index


def load_config(path=None, overrides=None):
    """Raw (string) config after layering defaults, file and overrides."""
    raw = {s: {k: d for k, (_, d) in keys.items()} for s, keys in SCHEMA.items()}
    if path:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from exc
        for section in cp.sections():
            if section not in SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key, value in cp.items(section):
                if key not in SCHEMA[section]:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
                raw[section][key] = value
    index = _key_section()
    for key, value in (overrides or {}).items():
        raw[index[key]][key] = str(value)
    return raw


def parse_config(raw):
    """Typed config: ``{section: {key: value}}``."""
    typed = {}
    for section, keys in SCHEMA.items():
        typed[section] = {}
        for key, (parser, _) in keys.items():
            try:
                typed[section][key] = parser(raw[section][key])
            except ConfigError as exc:
                raise ConfigError(f"[{section}] {key}: {exc}") from exc
    _validate(typed)
    return typed


def _validate(cfg):
    g = cfg["grid"]
    for ax in ("axis1", "axis2"):
        if g[f"{ax}_count"] < 1:
            raise ConfigError(f"[grid] {ax}_count must be >= 1")
        if g[f"{ax}_count"] > 1 and not g[f"{ax}_min"] < g[f"{ax}_max"]:
            raise ConfigError(f"[grid] {ax}_min < {ax}_max required")
    names = AXES[g["coords"]]
    for ax in ("axis1", "axis2"):
        if g[ax].lower() not in names:
            raise ConfigError(f"[grid] {ax} = {g[ax]!r} is not one of {', '.join(names)} for coords = {g['coords']}")
    if names[g["axis1"].lower()] == names[g["axis2"].lower()]:
        raise ConfigError("[grid] axis1 and axis2 must differ")
    if len(g["fixed"]) != 4:
        raise ConfigError("[grid] fixed needs four comma-separated values")
    e = cfg["evolution"]
    if e["t"] is not None and e["tau"] is not None:
        raise ConfigError("[evolution] give either t or tau, not both")


def deformation(cfg) -> DeformationParams:
    d = cfg["deformation"]
    if not d["hbar"] > 0:
        raise ConfigError(f"hbar > 0 required, got hbar={d['hbar']}")
    if not d["hbar"] * d["hbar"] > d["mu"] * d["nu"]:
        raise ConfigError(f"hbar^2 > mu*nu violated: hbar^2 = {d['hbar'] ** 2}, mu*nu = {d['mu'] * d['nu']}")
    return DeformationParams(d["hbar"], d["mu"], d["nu"])


def oscillator(cfg) -> osc.CoupledOscillatorSpec:
    o = cfg["oscillator"]
    return osc.CoupledOscillatorSpec(o["m1"], o["m2"], o["C1"], o["C2"], o["C3"])


# output -----------------------------------------------------------------


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def config_lines(command, raw):
    lines = [f"# ncphase {command}"]
    for section in SCHEMA:
        for key in SCHEMA[section]:
            if key == "out":
                continue
            lines.append(f"# [{section}] {key} = {raw[section][key]}")
    return lines


def render(command, raw, columns, rows, fmt_name, extra=None):
    if fmt_name == "json":
        doc = {
            "command": command,
            "config": {s: {k: v for k, v in keys.items() if k != "out"} for s, keys in raw.items()},
            "columns": list(columns),
            "rows": [[_json_value(v) for v in row] for row in rows],
        }
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    for line in config_lines(command, raw):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


# commands ---------------------------------------------------------------


def cmd_spectrum(cfg):
    sol = osc.solve(oscillator(cfg), deformation(cfg))
    q = cfg["quantum"]
    rows = []
    for n1 in range(q["n1_max"] + 1):
        for n2 in range(q["n2_max"] + 1):
            E = osc.energy(sol, n1, n2)
            Ec = osc.energy_commutative(sol, n1, n2)
            rows.append((n1, n2, E, Ec, E - Ec))
    return ("n1", "n2", "E", "E_comm", "shift"), rows, EXIT_OK


def grid_points(cfg):
    """Row-major (axis1 outer) grid plus the two axis vectors."""
    g = cfg["grid"]
    names = AXES[g["coords"]]
    i1, i2 = names[g["axis1"].lower()], names[g["axis2"].lower()]
    a1 = np.linspace(g["axis1_min"], g["axis1_max"], g["axis1_count"])
    a2 = np.linspace(g["axis2_min"], g["axis2_max"], g["axis2_count"])
    G1, G2 = np.meshgrid(a1, a2, indexing="ij")
    coords = [np.full(G1.shape, v) for v in g["fixed"]]
    coords[i1], coords[i2] = G1, G2
    return coords, G1, G2


def cmd_wigner_grid(cfg):
    sol = osc.solve(oscillator(cfg), deformation(cfg))
    q, g = cfg["quantum"], cfg["grid"]
    state = osc.wigner_state(sol, q["n1"], q["n2"])
    w = osc.to_original_coords(state, sol) if g["coords"] == "original" else state.w
    coords, G1, G2 = grid_points(cfg)
    values = np.real(gausslag_eval(w, coords))
    if g["normalize"]:
        d1 = (g["axis1_max"] - g["axis1_min"]) / max(g["axis1_count"] - 1, 1)
        d2 = (g["axis2_max"] - g["axis2_min"]) / max(g["axis2_count"] - 1, 1)
        values = grid_normalize(values, d1 * d2)
    rows = list(zip(G1.ravel(), G2.ravel(), values.ravel()))
    return ("axis1", "axis2", "value"), rows, EXIT_OK


def cmd_evolve(cfg):
    sol = osc.solve(oscillator(cfg), deformation(cfg))
    e = cfg["evolution"]
    if e["tau"] is not None:
        t = -1j * e["tau"]
    else:
        t = e["t"] if e["t"] is not None else 0.0
    evo = osc.time_evolution(sol, t)
    coords, G1, G2 = grid_points(cfg)
    if cfg["grid"]["coords"] == "original":
        coords = sol.to_normal(coords)
    values = np.asarray(evo(coords), dtype=complex)
    rows = list(zip(G1.ravel(), G2.ravel(), values.real.ravel(), values.imag.ravel()))
    return ("axis1", "axis2", "re", "im"), rows, EXIT_OK


def run_suite(cfg):
    v, num = cfg["verify"], cfg["numerics"]
    tol = num["tolerance"]
    suite = v["suite"]
    if suite == "algebra":
        backend = num["backend"]
        params = deformation(cfg)
        if backend == EXACT and not params.is_rational:
            raise ConfigError("exact backend needs rational hbar, mu, nu")
        return vf.algebra_suite(params, backend, v["samples"], v["seed"], tol if tol is not None else 1e-10)
    if suite == "genvalue":
        return vf.genvalue_suite(deformation(cfg), v["hamiltonians"], v["n_max"], v["seed"], num["backend"], tol if tol is not None else 1e-10)
    if suite == "oscillator":
        return vf.oscillator_suite(oscillator(cfg), deformation(cfg), tol if tol is not None else 1e-10, min(v["n_max"], 3), v["seed"])
    return vf.evolution_suite(oscillator(cfg), deformation(cfg), v["taus"], v["n_terms"], tol if tol is not None else 1e-6)


def cmd_verify(cfg):
    checks = run_suite(cfg)
    rows = [(c.identity, c.anchor, c.residual, c.tolerance, c.passed) for c in checks]
    status = EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL
    return ("identity", "anchor", "residual", "tolerance", "passed"), rows, status


HANDLERS = {
    "spectrum": cmd_spectrum,
    "wigner-grid": cmd_wigner_grid,
    "verify": cmd_verify,
    "evolve": cmd_evolve,
}


# argument parsing -------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="INI job file")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    for section, keys in SCHEMA.items():
        group = common.add_argument_group(f"[{section}]")
        for key, (_, default) in keys.items():
            group.add_argument(f"--{key}", dest=f"key_{key}", metavar=key.upper(), default=argparse.SUPPRESS, help=f"default {default}")
    parser = argparse.ArgumentParser(prog="ncphase", parents=[common], description="Noncommutative phase-space star calculus tools.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "verify":
            p.add_argument("suite_arg", nargs="?", choices=vf.SUITES, metavar="SUITE")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    opts = vars(args)
    logging.basicConfig(level=logging.INFO if opts.get("verbose") else logging.WARNING, format="%(name)s: %(message)s")
    overrides = {k[4:]: v for k, v in opts.items() if k.startswith("key_")}
    if opts.get("suite_arg"):
        overrides["suite"] = opts["suite_arg"]
    command = args.command
    try:
        raw = load_config(opts.get("config"), overrides)
        cfg = parse_config(raw)
        columns, rows, status = HANDLERS[command](cfg)
    except (ConfigError, NcPhaseError, ValueError) as exc:
        print(f"ncphase {command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = render(command, raw, columns, rows, cfg["output"]["format"])
    out = cfg["output"]["out"]
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if status != EXIT_OK:
        print(f"ncphase {command}: verification failed", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
