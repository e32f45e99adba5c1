"""Command-line front end.

Each subcommand resolves its parameters as flags > config file > defaults,
runs one analysis and writes a CSV or JSON report whose metadata echoes
every resolved parameter and the package version.  Exit codes: 0 success,
2 usage or I/O failure, 3 validation or module error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from . import causalnet, dispersion, lattice
from .errors import InfoflowError
from .io import atomic_write, render_table

EXIT_USAGE = 2
EXIT_MODULE = 3

DEFAULTS = {
    "evolve": {
        "sites": 128, "mu": 0.0, "steps": 64, "width": 4.0, "center": None, "k0": 0.0,
        "weights": "1,0", "initial": "packet", "mode": "unitary", "substeps": 16,
        "cadence": 1, "observables": False,
    },
    "dispersion": {"mu": 0.6, "n_k": 256},
    "zeta": {"mu": "0,0.6,1"},
    "zitter": {"mu": 0.3, "sites": 4096, "width": 32.0, "k0": 0.0, "weights": "1,0", "steps": 1000},
    "convergence": {"mu": 0.2, "sites": 64, "width": 4.0, "k0": 0.0, "weights": "1,0", "steps": 16, "levels": 4},
    "lorentz": {"beta": "3/5", "d": "16,64", "ticks": 1, "factor": 1, "max_den": 1000},
}


class UsageError(Exception):
    """Bad command line or config file contents (exit code 2)."""


# ---------------------------------------------------------------------------
# parameter parsing helpers
# ---------------------------------------------------------------------------

def _floats(text) -> list:
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _ints(text) -> list:
    if isinstance(text, int):
        return [text]
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


def _weights(text) -> tuple:
    vals = [complex(str(v).replace(" ", "")) for v in (text if isinstance(text, (list, tuple)) else str(text).split(","))]
    if len(vals) != 2:
        raise UsageError(f"--weights needs two comma-separated values, got {text!r}")
    return tuple(vals)


def beta_from_text(text, max_den: int = 1000) -> Fraction:
    """``p/q`` is taken exactly; a decimal is replaced by its best rational
    approximation with denominator <= ``max_den`` (a continued-fraction
    convergent or semiconvergent)."""
    s = str(text).strip()
    if "/" in s:
        p, _, q = s.partition("/")
        return causalnet.parse_beta((int(p), int(q)))
    value = float(s)
    if not math.isfinite(value):
        raise UsageError(f"beta must be finite, got {text!r}")
    return causalnet.parse_beta(Fraction(value).limit_denominator(int(max_den)))


def _load_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as exc:
        raise UsageError(f"config {path} is not valid YAML/JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a mapping")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def resolve(command: str, args: argparse.Namespace) -> dict:
    """Merge defaults, config file and explicit flags (in increasing priority)."""
    params = dict(DEFAULTS[command])
    if args.config:
        cfg = _load_config(args.config)
        cfg.pop("command", None)
        for key in ("out", "format"):
            if getattr(args, key) is None and key in cfg:
                setattr(args, key, cfg[key])
            cfg.pop(key, None)
        unknown = sorted(set(cfg) - set(params))
        if unknown:
            raise UsageError(f"unknown config keys for {command}: {', '.join(unknown)}")
        params.update(cfg)
    for key in params:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    return params


# ---------------------------------------------------------------------------
# commands: each returns (columns, rows, extra_metadata)
# ---------------------------------------------------------------------------

def cmd_evolve(p: dict):
    params = lattice.LatticeParams(int(p["sites"]))
    mass = lattice.MassCoupling(float(p["mu"]))
    center = float(p["center"]) if p["center"] is not None else params.n_sites / 4.0
    if p["initial"] == "delta":
        w = _weights(p["weights"])
        state = lattice.FieldState.delta(params.n_sites, int(round(center)), "plus" if w[0] != 0 else "minus")
    elif p["initial"] == "packet":
        spec = lattice.WavepacketSpec(center, float(p["width"]), float(p["k0"]), _weights(p["weights"]))
        state = lattice.make_wavepacket(spec, params)
    else:
        raise UsageError(f"initial must be 'packet' or 'delta', got {p['initial']!r}")
    traj = lattice.evolve(
        state, params, mass, int(p["steps"]), mode=p["mode"],
        cadence=int(p["cadence"]), substeps=int(p["substeps"]),
    )
    if p["observables"]:
        means = lattice.unwrapped_means(traj.states)
        columns = ["step", "norm", "mean", "variance"]
        rows = [
            [step, lattice.total_norm(s), float(m), lattice.position_variance(s)]
            for (step, s), m in zip(traj, means)
        ]
    else:
        columns = ["step", "x", "re_plus", "im_plus", "re_minus", "im_minus"]
        rows = []
        for step, s in traj:
            for x in range(params.n_sites):
                rows.append([step, x, s.plus[x].real, s.plus[x].imag, s.minus[x].real, s.minus[x].imag])
    return columns, rows, {"center_resolved": center}


def cmd_dispersion(p: dict):
    mass = lattice.MassCoupling(float(p["mu"]))
    curve = dispersion.dispersion(mass, int(p["n_k"]))
    extra = {"nu": mass.nu(), "zeta": dispersion.zeta(mass)}
    return ["k", "omega", "group_velocity"], [list(r) for r in curve.rows()], extra


def cmd_zeta(p: dict):
    rows = []
    for mu in _floats(p["mu"]):
        mass = lattice.MassCoupling(mu)
        n = math.inf if mu >= 1.0 else dispersion.refraction_index(mass)
        rows.append([mu, mass.nu(), dispersion.zeta(mass), n])
    return ["mu", "nu", "zeta", "refraction_index"], rows, {}


def cmd_zitter(p: dict):
    params = lattice.LatticeParams(int(p["sites"]))
    mass = lattice.MassCoupling(float(p["mu"]))
    spec = lattice.WavepacketSpec(params.n_sites / 2.0, float(p["width"]), float(p["k0"]), _weights(p["weights"]))
    trace = lattice.zitterbewegung_trace(spec, params, mass, int(p["steps"]))
    slope, _, residual = lattice.detrend(trace.times, trace.positions)
    extra = {
        "omega_dispersion": trace.omega_dispersion,
        "omega_conversion": trace.omega_conversion,
        "predicted_frequency": trace.predicted_frequency,
        "drift": slope,
        "residual_max": float(np.max(np.abs(residual))),
    }
    if mass.mu > 0:
        extra["measured_frequency"] = lattice.dominant_frequency(trace.times, residual)
    return ["t", "mean", "residual"], [list(r) + [float(e)] for r, e in zip(trace.as_rows(), residual)], extra


def cmd_convergence(p: dict):
    params = lattice.LatticeParams(int(p["sites"]))
    mass = lattice.MassCoupling(float(p["mu"]))
    spec = lattice.WavepacketSpec(params.n_sites / 2.0, float(p["width"]), float(p["k0"]), _weights(p["weights"]))
    table = dispersion.convergence_report(spec, params, mass, float(p["steps"]), int(p["levels"]))
    extra = {"ratios": table.ratios, "orders": table.orders}
    return ["a", "error"], [list(r) for r in table.rows()], extra


def cmd_lorentz(p: dict):
    beta = beta_from_text(p["beta"], int(p["max_den"]))
    reports = causalnet.sweep(beta, _ints(p["d"]), n_ticks=int(p["ticks"]), factor=int(p["factor"]))
    columns = ["beta_num", "beta_den", "d", "raw_count", "dilation", "contraction", "factor"]
    rows = [[r.as_dict()[c] for c in columns] for r in reports]
    extra = {"beta_resolved": f"{beta.numerator}/{beta.denominator}", "gamma": causalnet.lorentz_gamma(beta)}
    return columns, rows, extra


COMMANDS = {
    "evolve": cmd_evolve,
    "dispersion": cmd_dispersion,
    "zeta": cmd_zeta,
    "zitter": cmd_zitter,
    "convergence": cmd_convergence,
    "lorentz": cmd_lorentz,
}


# ---------------------------------------------------------------------------
# argument parser
# ---------------------------------------------------------------------------

def _common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="YAML or JSON file with parameters")
    sub.add_argument("--out", help="output path (default: stdout)")
    sub.add_argument("--format", choices=("csv", "json"), help="report format (default csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infoflow", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("evolve", help="evolve a field on the lattice")
    _common(s)
    s.add_argument("--sites", type=int)
    s.add_argument("--mu", type=float)
    s.add_argument("--steps", type=int)
    s.add_argument("--width", type=float)
    s.add_argument("--center", type=float)
    s.add_argument("--k0", type=float)
    s.add_argument("--weights", help="spinor weights 'plus,minus' (complex allowed, e.g. 1,1j)")
    s.add_argument("--initial", choices=("packet", "delta"))
    s.add_argument("--mode", choices=("unitary", "finite_difference"))
    s.add_argument("--substeps", type=int)
    s.add_argument("--cadence", type=int, help="keep every n-th snapshot")
    s.add_argument("--observables", action="store_const", const=True,
                   help="write norm/mean/variance per snapshot instead of amplitudes")

    s = subs.add_parser("dispersion", help="sample omega(k) and group velocity")
    _common(s)
    s.add_argument("--mu", type=float)
    s.add_argument("--n-k", dest="n_k", type=int)

    s = subs.add_parser("zeta", help="maximal speed and refraction index over a mu grid")
    _common(s)
    s.add_argument("--mu", help="comma-separated mu values")

    s = subs.add_parser("zitter", help="<x>(t) trace and its oscillation frequency")
    _common(s)
    for flag, typ in (("--mu", float), ("--sites", int), ("--width", float), ("--k0", float), ("--steps", int)):
        s.add_argument(flag, type=typ)
    s.add_argument("--weights")

    s = subs.add_parser("convergence", help="automaton vs continuum under refinement")
    _common(s)
    for flag, typ in (("--mu", float), ("--sites", int), ("--width", float), ("--k0", float),
                      ("--steps", int), ("--levels", int)):
        s.add_argument(flag, type=typ)
    s.add_argument("--weights")

    s = subs.add_parser("lorentz", help="clock and rod counts on the causal network")
    _common(s)
    s.add_argument("--beta", help="boost as p/q, or a decimal to approximate")
    s.add_argument("--d", "--ds", dest="d", help="comma-separated mirror separations")
    s.add_argument("--ticks", type=int)
    s.add_argument("--factor", type=int, help="coarse-graining factor")
    s.add_argument("--max-den", dest="max_den", type=int, help="denominator bound for decimal boosts")
    return parser


def _metadata(command: str, params: dict, fmt_name: str, extra: dict) -> dict:
    return {
        "artifact": "infoflow",
        "version": __version__,
        "command": command,
        "format": fmt_name,
        "parameters": {k: (str(v) if isinstance(v, Fraction) else v) for k, v in params.items()},
        "results": extra,
    }


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    command = args.command
    try:
        params = resolve(command, args)
        fmt_name = args.format or "csv"
        if fmt_name not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {fmt_name!r}")
        columns, rows, extra = COMMANDS[command](params)
        text = render_table(columns, rows, _metadata(command, params, fmt_name, extra), fmt_name)
        if args.out:
            atomic_write(args.out, text)
        else:
            sys.stdout.write(text)
    except UsageError as exc:
        print(f"infoflow: error: UsageError: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"infoflow: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfoflowError, ValueError, TypeError) as exc:
        print(f"infoflow: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MODULE
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
