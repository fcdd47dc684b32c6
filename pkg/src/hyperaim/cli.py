"""Command-line front end.

Subcommands: spectrum, exact-pt, oracle, compare, reproduce, classify.
Parameters come from an optional JSON config file (keys: v0, v1, v2, lambda,
ell, hbar, mass, x0, k_max, precision_digits, e_min, e_max, scan_points,
root_tol, conv_tol, k_stride, method, r_min, r_max, n_points); command-line
flags override file values.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

import mpmath

from .aim import AimSettings, find_spectrum
from .errors import ConfigError, HyperAimError, NoRootsFound
from .oracle import OracleGrid
from .potential import PotentialParams, classify_potential
from .report import Mode, RunConfig, TABLE_K_MAX, reproduce_table, rows_from_results, run, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_NO_ROOTS, EXIT_NUMERIC = 0, 1, 2, 3

PARAM_KEYS = {"v0": "V0", "v1": "V1", "v2": "V2", "lambda": "lam", "ell": "ell", "hbar": "hbar", "mass": "mass"}
SETTING_KEYS = {"x0": float, "k_max": int, "precision_digits": int, "e_min": float, "e_max": float,
                "scan_points": int, "root_tol": float, "conv_tol": float, "k_stride": int, "method": str,
                "series_order": int}
GRID_KEYS = {"r_min": float, "r_max": float, "n_points": int}
PARAM_TYPES = {"v0": float, "v1": float, "v2": float, "lambda": float, "ell": int, "hbar": float, "mass": float}
ALL_KEYS = {**PARAM_TYPES, **SETTING_KEYS, **GRID_KEYS}


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be an object of key/value pairs")
    unknown = sorted(set(data) - set(ALL_KEYS))
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown config key")
    return data


def _coerce(key: str, value):
    kind = ALL_KEYS[key]
    try:
        if kind is int and isinstance(value, float) and not value.is_integer():
            raise ValueError
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected {kind.__name__}, got {value!r}") from None


def merged_values(args: argparse.Namespace) -> dict:
    values = dict(load_config(getattr(args, "config", None)))
    for key in ALL_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return {k: _coerce(k, v) for k, v in values.items()}


def build_params(values: dict) -> PotentialParams:
    missing = [k for k in ("v0", "v1") if k not in values]
    if missing:
        raise ConfigError(f"{missing[0]}: required (flag or config key)")
    kw = {PARAM_KEYS[k]: values[k] for k in PARAM_KEYS if k in values}
    return PotentialParams(**kw)


def build_settings(values: dict, **defaults) -> AimSettings:
    kw = dict(defaults)
    kw.update({k: values[k] for k in SETTING_KEYS if k in values})
    return AimSettings(**kw)


def build_grid(values: dict, p: PotentialParams | None) -> OracleGrid | None:
    if not any(k in values for k in GRID_KEYS):
        return None
    base = OracleGrid.for_params(p) if p is not None else OracleGrid()
    return replace(base, **{k: values[k] for k in GRID_KEYS if k in values})


def _add_common(sp: argparse.ArgumentParser, params: bool = True, settings: bool = True, grid: bool = False):
    sp.add_argument("--config", help="JSON file of key/value settings")
    sp.add_argument("-o", "--output", help="write CSV here instead of standard output")
    if params:
        g = sp.add_argument_group("potential")
        g.add_argument("--v0", type=float)
        g.add_argument("--v1", type=float)
        g.add_argument("--v2", type=float)
        g.add_argument("--lambda", dest="lambda", type=float)
        g.add_argument("--ell", type=int)
        g.add_argument("--hbar", type=float)
        g.add_argument("--mass", type=float)
    if settings:
        g = sp.add_argument_group("iteration")
        g.add_argument("--x0", type=float)
        g.add_argument("--k-max", dest="k_max", type=int)
        g.add_argument("--precision-digits", dest="precision_digits", type=int)
        g.add_argument("--e-min", dest="e_min", type=float)
        g.add_argument("--e-max", dest="e_max", type=float)
        g.add_argument("--scan-points", dest="scan_points", type=int)
        g.add_argument("--root-tol", dest="root_tol", type=float)
        g.add_argument("--conv-tol", dest="conv_tol", type=float)
        g.add_argument("--k-stride", dest="k_stride", type=int)
        g.add_argument("--method", choices=["family", "pointwise"])
    if grid:
        g = sp.add_argument_group("oracle grid")
        g.add_argument("--r-min", dest="r_min", type=float)
        g.add_argument("--r-max", dest="r_max", type=float)
        g.add_argument("--n-points", dest="n_points", type=int)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperaim", description="Bound states of the hyperbolic 1/sinh^2 potential.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("spectrum", help="AIM eigenvalues")
    _add_common(sp)
    sp = sub.add_parser("exact-pt", help="closed-form spectrum (v2 = 0, ell = 0)")
    _add_common(sp, settings=False)
    sp = sub.add_parser("oracle", help="finite-difference reference eigenvalues")
    _add_common(sp, settings=False, grid=True)
    sp = sub.add_parser("compare", help="AIM, exact and oracle side by side")
    _add_common(sp, grid=True)
    sp = sub.add_parser("reproduce", help="recompute a published table")
    _add_common(sp, params=False, grid=True)
    sp.add_argument("--table", type=int, choices=[1, 2, 3, 4], required=True)
    sp.add_argument("--reference", help="published column used as e_reference (default per table)")
    sp = sub.add_parser("classify", help="shape of the potential")
    _add_common(sp, settings=False)
    return parser


def _diagnostics(results, stream) -> None:
    for r in results:
        k = "-" if r.k_converged is None else r.k_converged
        stream.write(f"# n={r.n} E={mpmath.nstr(r.energy, 15)} status={r.status.value} "
                     f"k_converged={k} residual={r.residual:.3g}\n")


def dispatch(args: argparse.Namespace) -> int:
    values = merged_values(args)
    out = getattr(args, "output", None)
    if args.command == "reproduce":
        settings = build_settings(values, k_max=TABLE_K_MAX[args.table])
        rows = reproduce_table(args.table, settings, build_grid(values, None), args.reference)
        write_csv(rows, out)
        return EXIT_OK
    p = build_params(values)
    if args.command == "classify":
        shape = classify_potential(p)
        text = json.dumps({"classification": shape.classification.value,
                           "extrema": [{"r": r, "v": v} for r, v in shape.extrema],
                           "v_min": shape.v_min, "v_floor": shape.v_floor}, indent=2)
        if out:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return EXIT_OK
    mode = {"spectrum": Mode.Aim, "exact-pt": Mode.ExactPT, "oracle": Mode.Oracle, "compare": Mode.Compare}[args.command]
    settings = build_settings(values) if mode in (Mode.Aim, Mode.Compare) else AimSettings()
    config = RunConfig(p, settings, build_grid(values, p), mode, out)
    if mode is Mode.Aim:
        results = find_spectrum(p, settings)
        _diagnostics(results, sys.stderr)
        rows = rows_from_results(results, p.ell)
    else:
        rows = run(config)
    if mode is Mode.ExactPT and not rows:
        raise NoRootsFound("closed-form level count is negative: no bound states")
    if mode is Mode.Oracle and not rows:
        raise NoRootsFound("the discretized operator has no negative eigenvalues")
    write_csv(rows, config.output_path)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoRootsFound as exc:
        print(f"no roots: {exc}", file=sys.stderr)
        return EXIT_NO_ROOTS
    except (HyperAimError, ArithmeticError, ValueError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
