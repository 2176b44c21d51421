"""Command-line front end.

    exciton-sae spectrum --kappa 1 --a 1 --A 1 --sigma 1.0 --nmax 5
    exciton-sae fplot --kappa 1 --a 1 --A 1 --alpha-min 0.01 --alpha-max 5 --samples 2000
    exciton-sae scattering --sigma 1.0 --emin 1e-3 --emax 1e2 --epoints 50
    exciton-sae oracle --sigma 1.0 --nmax 4

Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from . import oracle, sae, scattering, spectrum
from .errors import ConditioningError, DegenerateIndexError, DomainError, ExcitonSAEError
from .model import PhysicalParams

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_ORACLE = 0, 2, 3, 4
ORACLE_THRESHOLD = 1e-6
MAX_TOL = 1e-6

DEFAULTS: Dict[str, Any] = {
    "kappa": 1.0,
    "a": 1.0,
    "A": 0.0,
    "sigma": None,
    "sigma_rhs_zero": False,
    "sigma_rhs_inf": False,
    "nmax": 5,
    "tol": 1e-12,
    "samples": 1000,
    "alpha_min": 1e-3,
    "alpha_max": 6.0,
    "emin": 1e-3,
    "emax": 1e2,
    "epoints": 20,
    "format": "csv",
    "out": None,
    "mode": "paper",
    "state": 0,
    "zmax": 20.0,
    "points": 201,
    "workers": 1,
}


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    params: PhysicalParams
    sigma: float
    n_max: int
    tol: float
    output_format: str = "csv"
    output_path: Optional[str] = None
    mode: str = "paper"
    extra: Dict[str, Any] = field(default_factory=dict)


# --------------------------------------------------------------------------
# argument handling
# --------------------------------------------------------------------------

def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model")
    g.add_argument("--kappa", type=float)
    g.add_argument("--a", type=float)
    g.add_argument("--A", dest="A", type=float)
    s = p.add_mutually_exclusive_group()
    s.add_argument("--sigma", type=float, help="extension angle in radians")
    s.add_argument("--sigma-rhs-zero", dest="sigma_rhs_zero", action="store_true", default=None,
                   help="use Sigma = (2 theta1 + pi) mod 2 pi")
    s.add_argument("--sigma-rhs-inf", dest="sigma_rhs_inf", action="store_true", default=None,
                   help="use Sigma = (2 theta2 + pi) mod 2 pi")
    p.add_argument("--nmax", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--mode", choices=("paper", "rigorous"))
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out")
    p.add_argument("--config", help="JSON file with the same keys as the flags")
    p.add_argument("--workers", type=int, help="threads for grid sweeps")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="exciton-sae", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="bound states of one extension")
    fp = sub.add_parser("fplot", parents=[common], help="samples of the spectral function f(alpha)")
    fp.add_argument("--samples", type=int)
    fp.add_argument("--alpha-min", dest="alpha_min", type=float)
    fp.add_argument("--alpha-max", dest="alpha_max", type=float)
    ef = sub.add_parser("eigenfunction", parents=[common], help="tabulate one eigenfunction")
    ef.add_argument("--state", type=int, help="index of the state in the spectrum (0 = lowest)")
    ef.add_argument("--zmax", type=float)
    ef.add_argument("--points", type=int)
    sc = sub.add_parser("scattering", parents=[common], help="C/D ratio and phase shift on an energy grid")
    sc.add_argument("--emin", type=float)
    sc.add_argument("--emax", type=float)
    sc.add_argument("--epoints", type=int)
    sub.add_parser("oracle", parents=[common], help="compare Whittaker and shooting eigenvalues")
    return parser


def merge_settings(ns: argparse.Namespace) -> Dict[str, Any]:
    """Defaults < config file < flags."""
    merged = dict(DEFAULTS)
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(cfg) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged.update(cfg)
    flags = {k: v for k, v in vars(ns).items() if v is not None and k in DEFAULTS}
    if any(k in flags for k in ("sigma", "sigma_rhs_zero", "sigma_rhs_inf")):
        # an explicit Sigma choice on the command line replaces the file's one
        for key in ("sigma", "sigma_rhs_zero", "sigma_rhs_inf"):
            merged[key] = DEFAULTS[key]
    merged.update(flags)
    return merged


def _number(settings, key, kind=float):
    value = settings[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if kind is int:
        if float(value) != int(value):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite")
    return value


def build_config(settings: Dict[str, Any], command: str) -> RunConfig:
    try:
        params = PhysicalParams(
            _number(settings, "kappa"), _number(settings, "a"), _number(settings, "A"),
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    mode = settings["mode"]
    if mode not in sae.MODES:
        raise ConfigError(f"mode must be one of {sae.MODES}")
    if settings["format"] not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    n_max = _number(settings, "nmax", int)
    if n_max < 0:
        raise ConfigError("nmax must be >= 0")
    tol = _number(settings, "tol")
    if not 0 < tol <= MAX_TOL:
        raise ConfigError(f"tol must lie in (0, {MAX_TOL}], got {tol}")
    choices = [settings["sigma"] is not None, bool(settings["sigma_rhs_zero"]), bool(settings["sigma_rhs_inf"])]
    if sum(choices) > 1:
        raise ConfigError("give only one of sigma, sigma_rhs_zero, sigma_rhs_inf")
    if command != "fplot" and sum(choices) == 0:
        raise ConfigError("an extension angle is required (--sigma, --sigma-rhs-zero or --sigma-rhs-inf)")
    sigma = math.nan
    if choices[0]:
        sigma = sae.ExtensionAngle(_number(settings, "sigma")).sigma
    elif choices[1] or choices[2]:
        data = sae.deficiency_data(params, mode, strict=False)
        special = sae.sigma_rhs_zero(data) if choices[1] else sae.sigma_rhs_infinity(data)
        sigma = special.sigma
    extra = {k: settings[k] for k in ("samples", "alpha_min", "alpha_max", "emin", "emax",
                                      "epoints", "state", "zmax", "points", "workers")}
    workers = _number(extra, "workers", int)
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    return RunConfig(params, sigma, n_max, tol, settings["format"], settings["out"], mode, extra)


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return "nan"
    return format(float(value), ".17g")


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if value is None:
        return None
    value = float(value)
    if not math.isfinite(value):
        # JSON has no literal for nan/inf; keep the text form
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def render(columns: Sequence[str], rows: Sequence[Sequence], fmt: str, meta: Dict[str, Any],
           sidecar: Optional[Dict[str, List[float]]] = None) -> str:
    if fmt == "json":
        doc = dict(meta)
        doc["columns"] = list(columns)
        doc["rows"] = [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows]
        if sidecar:
            doc.update({k: [_json_value(v) for v in vals] for k, vals in sidecar.items()})
        return json.dumps(doc, indent=2) + "\n"
    lines = [",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if sidecar:
        text += "\n" + render_sidecar(sidecar)
    return text


def render_sidecar(sidecar: Dict[str, List[float]]) -> str:
    lines = ["kind,alpha"]
    for kind, vals in sidecar.items():
        lines += [f"{kind.rstrip('s')},{_fmt(v)}" for v in vals]
    return "\n".join(lines) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write to a temporary file in the target directory, then rename over the target."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(config: RunConfig, columns, rows, meta, sidecar=None, stdout=None) -> None:
    stdout = stdout or sys.stdout
    if config.output_path is None:
        stdout.write(render(columns, rows, config.output_format, meta, sidecar))
        return
    if config.output_format == "csv" and sidecar:
        # the CSV table stays a plain table; asymptotes go to a sibling file
        write_atomic(config.output_path + ".asymptotes.csv", render_sidecar(sidecar))
        write_atomic(config.output_path, render(columns, rows, "csv", meta))
    else:
        write_atomic(config.output_path, render(columns, rows, config.output_format, meta, sidecar))


def _meta(config: RunConfig, command: str) -> Dict[str, Any]:
    p = config.params
    return {
        "command": command,
        "kappa": p.kappa, "a": p.a, "A": p.bigA, "m": p.m,
        "sigma": _json_value(config.sigma), "mode": config.mode,
    }


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_spectrum(config: RunConfig, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    p = config.params
    states = spectrum.solve_spectrum(p, config.sigma, config.n_max, min(config.tol, 1e-13), config.mode)
    rows = []
    for n, st in enumerate(states):
        try:
            norm = spectrum.normalize(p, st, quad_tol=1e-10)
        except DegenerateIndexError:
            norm = math.nan
            stderr.write(f"warning: 2m is an integer; norm of state n={n} not available\n")
        rows.append((n, st.branch, st.alpha, st.energy, norm))
    emit(config, ("n", "branch", "alpha", "energy", "norm_constant"), rows, _meta(config, "spectrum"),
         stdout=stdout)
    return EXIT_OK


def cmd_fplot(config: RunConfig, stdout=None, stderr=None) -> int:
    ex = config.extra
    lo, hi = _number(ex, "alpha_min"), _number(ex, "alpha_max")
    count = _number(ex, "samples", int)
    if not 0 < lo < hi or count < 2:
        raise ConfigError("need 0 < alpha_min < alpha_max and samples >= 2")
    m = config.params.m
    table = spectrum.fplot_samples(m, (lo, hi), count)
    sidecar = {
        "poles": [x for x in spectrum.pole_positions(m, hi) if x >= lo],
        "zeros": [x for x in spectrum.zero_positions(m, hi) if x >= lo],
    }
    emit(config, ("alpha", "f"), table, _meta(config, "fplot"), sidecar, stdout=stdout)
    return EXIT_OK


def cmd_eigenfunction(config: RunConfig, stdout=None, stderr=None) -> int:
    ex = config.extra
    index = _number(ex, "state", int)
    zmax = _number(ex, "zmax")
    points = _number(ex, "points", int)
    if index < 0 or zmax <= 0 or points < 2:
        raise ConfigError("need state >= 0, zmax > 0 and points >= 2")
    p = config.params
    states = spectrum.solve_spectrum(p, config.sigma, index + 1, min(config.tol, 1e-13), config.mode)
    st = spectrum.with_norm(p, states[index])
    z = np.linspace(0.0, zmax, points)
    chi = spectrum.eigenfunction(p, st, z)
    rows = [(zi, ci, ci / st.norm_constant) for zi, ci in zip(z, chi)]
    meta = _meta(config, "eigenfunction")
    meta.update(n=st.branch, alpha=st.alpha, energy=st.energy, norm_constant=st.norm_constant)
    emit(config, ("z", "chi", "chi_normalized"), rows, meta, stdout=stdout)
    return EXIT_OK


def _wrapped_jump(d1: float, d2: float) -> float:
    """|d2 - d1| with delta taken modulo pi."""
    diff = (d2 - d1 + 0.5 * math.pi) % math.pi - 0.5 * math.pi
    return abs(diff)


def cmd_scattering(config: RunConfig, stdout=None, stderr=None) -> int:
    ex = config.extra
    emin, emax = _number(ex, "emin"), _number(ex, "emax")
    count = _number(ex, "epoints", int)
    if not 0 < emin <= emax or count < 1 or (count > 1 and emin == emax):
        raise ConfigError("need 0 < emin < emax (or emin = emax with epoints = 1) and epoints >= 1")
    grid = np.geomspace(emin, emax, count) if count > 1 else np.array([emin])
    p = config.params

    def one(e):
        try:
            return scattering.scattering_coefficients(p, config.sigma, float(e), config.mode)
        except ConditioningError as exc:
            raise ConditioningError(f"E={float(e)!r}: {exc}", condition=exc.condition) from exc

    workers = _number(ex, "workers", int)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sols = list(pool.map(one, grid))
    else:
        sols = [one(e) for e in grid]
    rows = []
    for i, s in enumerate(sols):
        # a jump beyond pi/4 between neighbours is flagged, not hidden
        jump = i > 0 and _wrapped_jump(sols[i - 1].phase_shift, s.phase_shift) > 0.25 * math.pi
        rows.append((s.energy, s.ratio_c_over_d.real, s.ratio_c_over_d.imag, s.phase_shift,
                     s.unitarity_defect, bool(jump)))
    meta = _meta(config, "scattering")
    meta["max_unitarity_defect"] = max((r[4] for r in rows), default=0.0)
    emit(config, ("energy", "re_c_over_d", "im_c_over_d", "delta", "unitarity_defect", "discontinuity"),
         rows, meta, stdout=stdout)
    return EXIT_OK


def cmd_oracle(config: RunConfig, stdout=None, stderr=None) -> int:
    p = config.params
    states = spectrum.solve_spectrum(p, config.sigma, config.n_max, 1e-13, config.mode)
    shots = oracle.shoot_spectrum(p, config.sigma, config.n_max, tol=min(config.tol, 1e-9), mode=config.mode)
    rows = []
    ok = True
    for n, (st, sh) in enumerate(zip(states, shots)):
        delta = abs(st.energy - sh.energy)
        passed = delta < ORACLE_THRESHOLD
        ok &= passed
        rows.append((n, st.branch, st.energy, sh.energy, delta, passed))
    meta = _meta(config, "oracle")
    meta["threshold"] = ORACLE_THRESHOLD
    emit(config, ("n", "branch", "E_whittaker", "E_shooting", "abs_diff", "pass"), rows, meta, stdout=stdout)
    return EXIT_OK if ok else EXIT_ORACLE


COMMANDS = {
    "spectrum": cmd_spectrum,
    "fplot": cmd_fplot,
    "eigenfunction": cmd_eigenfunction,
    "scattering": cmd_scattering,
    "oracle": cmd_oracle,
}


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        config = build_config(merge_settings(ns), ns.command)
    except (ConfigError, DomainError) as exc:
        stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[ns.command](config, stdout=stdout, stderr=stderr)
    except ConfigError as exc:
        stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except ExcitonSAEError as exc:
        stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
