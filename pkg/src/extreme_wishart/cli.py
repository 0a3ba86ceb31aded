"""``extreme-wishart`` command line: analytic curves, simulations, comparisons.

Config files are JSON. A non-central model::

    {"kind": "noncentral-wishart", "m": 2, "n": 3,
     "sigma": "fig1-covariance", "upsilon": "rank-one-mean(0.7853981634)"}

and a gamma-Wishart one::

    {"kind": "gamma-wishart", "m": 2, "n": 2, "alpha": 3,
     "sigma": "fig1-covariance", "omega": "fig2-omega"}

Matrices may instead be nested lists whose entries are reals or ``[re, im]``
pairs. ``--preset fig1:M:N`` and ``--preset fig2:M:N:ALPHA`` stand in for a
config file.

Exit codes: 0 ok, 1 I/O or parse error, 2 unsupported regime, 3 series
non-convergence, 4 sampler precondition, 5 comparison above threshold.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
import time

import numpy as np

from . import gamma_wishart, noncentral, presets
from .diagnostics import Diagnostics
from .errors import (
    InsufficientAcceptance,
    InvalidDOF,
    NoConvergence,
    RegimeUnsupported,
    UnsupportedShape,
)
from .gamma_wishart import GammaWishartModel
from .montecarlo import CdfCurve, RngSpec, sample_gw_eigs, sample_ncw_eigs, sup_distance
from .noncentral import NoncentralWishartModel
from .special import DEFAULT_OPTIONS, SeriesOptions

EXIT_OK, EXIT_IO, EXIT_UNSUPPORTED, EXIT_NOCONV, EXIT_SAMPLER, EXIT_FAIL = 0, 1, 2, 3, 4, 5
KINDS = ("noncentral-wishart", "gamma-wishart")
REQUIRED = {
    "noncentral-wishart": {"kind", "m", "n", "sigma", "upsilon"},
    "gamma-wishart": {"kind", "m", "n", "alpha", "sigma", "omega"},
}
SUPPORTED = {
    ("noncentral-wishart", "min"): noncentral.SUPPORTED_MIN_SHAPES,
    ("noncentral-wishart", "max"): "m = 2, any n >= 2",
    ("gamma-wishart", "min"): "m = 2 with integer alpha > n, and (m, n, alpha) = (3, 3, 4)",
    ("gamma-wishart", "max"): "m = 2 with integer alpha > n",
}
DEFAULT_SAMPLES = 200_000
DEFAULT_THRESHOLD = 0.01
SIG_DIGITS = 12

_ROM = re.compile(r"^rank-one-mean(?:\(\s*([^)]*)\s*\))?$")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------

def _entry(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex entries are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


def parse_matrix(value, rows: int, cols: int, m: int, n: int):
    """Decode a matrix field: builtin name or nested list of entries."""
    if isinstance(value, str):
        name = value.strip()
        if name == "fig1-covariance":
            if rows != cols:
                raise ConfigError("fig1-covariance is square")
            return presets.fig_covariance(rows).entries
        if name == "fig2-omega":
            if rows != cols:
                raise ConfigError("fig2-omega is square")
            return presets.fig_omega(rows).entries
        hit = _ROM.match(name)
        if hit:
            theta = float(hit.group(1)) if hit.group(1) else math.pi / 4
            return presets.rank_one_mean(n, m, theta)
        raise ConfigError(f"unknown builtin {name!r}")
    try:
        arr = np.array([[_entry(v) for v in row] for row in value], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad matrix: {exc}") from exc
    if arr.shape != (rows, cols):
        raise ConfigError(f"expected a {rows} x {cols} matrix, got shape {arr.shape}")
    return arr


def validate_config(cfg: dict) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    kind = cfg.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
    missing = REQUIRED[kind] - cfg.keys()
    extra = cfg.keys() - REQUIRED[kind] - {"comment"}
    if missing:
        raise ConfigError(f"{kind} config is missing {sorted(missing)}")
    if extra:
        raise ConfigError(f"{kind} config has unexpected fields {sorted(extra)}")
    for key in ("m", "n", "alpha"):
        if key in cfg and (not isinstance(cfg[key], int) or isinstance(cfg[key], bool)):
            raise ConfigError(f"{key} must be an integer")
    return cfg


def build_model(cfg: dict):
    cfg = validate_config(cfg)
    m, n = cfg["m"], cfg["n"]
    sigma = parse_matrix(cfg["sigma"], m, m, m, n)
    if cfg["kind"] == "noncentral-wishart":
        return NoncentralWishartModel(sigma, parse_matrix(cfg["upsilon"], n, m, m, n))
    omega = parse_matrix(cfg["omega"], m, m, m, n)
    return GammaWishartModel(sigma, omega, n, cfg["alpha"])


def preset_config(spec: str) -> dict:
    """``fig1:M:N`` or ``fig2:M:N:ALPHA``."""
    parts = spec.split(":")
    try:
        nums = [int(p) for p in parts[1:]]
    except ValueError as exc:
        raise ConfigError(f"bad preset {spec!r}") from exc
    if parts[0] == "fig1" and len(nums) == 2:
        m, n = nums
        return {"kind": "noncentral-wishart", "m": m, "n": n,
                "sigma": "fig1-covariance", "upsilon": "rank-one-mean"}
    if parts[0] == "fig2" and len(nums) == 3:
        m, n, alpha = nums
        return {"kind": "gamma-wishart", "m": m, "n": n, "alpha": alpha,
                "sigma": "fig1-covariance", "omega": "fig2-omega"}
    raise ConfigError(f"preset must be fig1:M:N or fig2:M:N:ALPHA, got {spec!r}")


def load_config(args) -> dict:
    if args.preset:
        return preset_config(args.preset)
    if not args.config:
        raise ConfigError("one of --config or --preset is required")
    try:
        with open(args.config, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config} is not valid JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# grids and CSV
# ---------------------------------------------------------------------------

def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:step``; points ``start + i*step`` below ``stop - step/2``, then ``stop``."""
    try:
        start, stop, step = (float(p) for p in spec.split(":"))
    except ValueError as exc:
        raise ConfigError(f"grid must be start:stop:step, got {spec!r}") from exc
    if not (step > 0 and stop >= start >= 0 and all(map(math.isfinite, (start, stop, step)))):
        raise ConfigError(f"need 0 <= start <= stop and step > 0, got {spec!r}")
    count = math.ceil((stop - start) / step - 0.5)
    pts = [start + i * step for i in range(max(count, 0))]
    pts = [p for p in pts if p < stop - step / 2]
    pts.append(stop)
    return np.array(pts)


def fmt(v: float) -> str:
    return f"{v:.{SIG_DIGITS}g}"


def write_csv(header, columns, out) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def read_csv(text: str):
    """Parse CSV produced by :func:`write_csv` into ``(header, columns)``."""
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    cols = [np.array([float(r[i]) for r in body]) for i in range(len(header))]
    return header, cols


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _kind(model) -> str:
    return "gamma-wishart" if isinstance(model, GammaWishartModel) else "noncentral-wishart"


def evaluate_curve(model, extreme: str, grid, opts: SeriesOptions = DEFAULT_OPTIONS,
                   diag: Diagnostics | None = None) -> np.ndarray:
    diag = diag if diag is not None else Diagnostics()
    if isinstance(model, GammaWishartModel):
        if extreme == "min":
            return np.array([gamma_wishart.min_cdf(model, x, diag) for x in grid])
        return np.array([gamma_wishart.max_cdf(model, x, opts, diag=diag) for x in grid])
    fn = noncentral.min_cdf if extreme == "min" else noncentral.max_cdf
    return np.array([fn(model, x, opts, diag=diag) for x in grid])


def simulate(model, extreme: str, samples: int, seed: int):
    if samples < 1:
        raise InvalidDOF("--samples must be >= 1")
    if isinstance(model, GammaWishartModel):
        return sample_gw_eigs(model, extreme, samples, RngSpec(seed))
    return sample_ncw_eigs(model, extreme, samples, RngSpec(seed))


def _opts(args) -> SeriesOptions:
    return SeriesOptions(rel_tol=args.rel_tol, max_terms=args.max_terms,
                         min_terms=min(DEFAULT_OPTIONS.min_terms, args.max_terms))


def _report_diag(diag: Diagnostics, extra: str = ""):
    print(f"diagnostics: series_terms_max={diag.max_terms} series_evaluations={len(diag.terms)} "
          f"clamps={diag.clamps}{extra}", file=sys.stderr)


def cmd_cdf(args) -> int:
    cfg = load_config(args)
    model = build_model(cfg)
    grid = parse_grid(args.grid)
    diag = Diagnostics()
    t0 = time.perf_counter()
    values = evaluate_curve(model, args.extreme, grid, _opts(args), diag)
    write_csv(["x", "F"], [grid, values], args.out)
    _report_diag(diag, f" seconds={time.perf_counter() - t0:.3f}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args)
    model = build_model(cfg)
    emp = simulate(model, args.extreme, args.samples, args.seed)
    if args.grid:
        grid = parse_grid(args.grid)
        write_csv(["x", "F_emp"], [grid, emp(grid)], args.out)
    else:
        write_csv(["sample"], [emp.sorted_samples], args.out)
    print(f"simulated {emp.count} samples, seed={args.seed}", file=sys.stderr)
    return EXIT_OK


def run_compare(cfg: dict, extreme: str, grid_spec: str | None, samples: int, seed: int,
                opts: SeriesOptions = DEFAULT_OPTIONS, threshold: float = DEFAULT_THRESHOLD) -> dict:
    """Build the comparison report as a plain dict (the run can be repeated from it)."""
    model = build_model(cfg)
    emp = simulate(model, extreme, samples, seed)
    if grid_spec:
        grid = parse_grid(grid_spec)
    else:
        grid = np.linspace(0.0, emp.quantile(0.9999), 101)
    diag = Diagnostics()
    values = evaluate_curve(model, extreme, grid, opts, diag)
    emp_values = emp(grid)
    dist = sup_distance(CdfCurve(grid, values), emp)
    return {
        "model": cfg, "extreme": extreme, "seed": seed, "samples": samples,
        "grid": grid.tolist(), "analytic": values.tolist(), "empirical": emp_values.tolist(),
        "sup_distance": dist, "threshold": threshold, "pass": bool(dist < threshold),
        "diagnostics": {"series_terms_max": diag.max_terms, "clamps": diag.clamps},
        "series_options": {"rel_tol": opts.rel_tol, "max_terms": opts.max_terms},
    }


def cmd_compare(args) -> int:
    cfg = load_config(args)
    report = run_compare(cfg, args.extreme, args.grid, args.samples, args.seed, _opts(args), args.threshold)
    if args.out:
        write_csv(["x", "F", "F_emp"], [report["grid"], report["analytic"], report["empirical"]], args.out)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=1)
    print(f"model: {json.dumps(report['model'])}")
    print(f"extreme: {report['extreme']}  samples: {report['samples']}  seed: {report['seed']}  "
          f"grid_points: {len(report['grid'])}")
    print(f"series_terms_max: {report['diagnostics']['series_terms_max']}  "
          f"clamps: {report['diagnostics']['clamps']}")
    verdict = "PASS" if report["pass"] else "FAIL"
    print(f"sup_distance: {report['sup_distance']:.6f}  threshold: {report['threshold']}  {verdict}")
    return EXIT_OK if report["pass"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", metavar="PATH", help="JSON model configuration")
    src.add_argument("--preset", metavar="SPEC", help="fig1:M:N or fig2:M:N:ALPHA")
    common.add_argument("--extreme", choices=("min", "max"), default="min")
    common.add_argument("--out", metavar="PATH", help="CSV destination (default: standard output)")
    common.add_argument("--rel-tol", type=float, default=DEFAULT_OPTIONS.rel_tol)
    common.add_argument("--max-terms", type=int, default=DEFAULT_OPTIONS.max_terms)

    p = argparse.ArgumentParser(prog="extreme-wishart", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cdf", parents=[common], help="analytic c.d.f. on a grid")
    c.add_argument("--grid", default="0:5:0.05", metavar="A:B:S")
    c.set_defaults(func=cmd_cdf)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo extreme eigenvalues")
    s.add_argument("--grid", metavar="A:B:S", help="emit the empirical c.d.f. on this grid")
    s.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_simulate)

    k = sub.add_parser("compare", parents=[common], help="analytic vs empirical sup-distance")
    k.add_argument("--grid", metavar="A:B:S", help="default: 101 points up to the 0.9999 sample quantile")
    k.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    k.add_argument("--report", metavar="PATH", help="write the full run report as JSON")
    k.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UnsupportedShape, RegimeUnsupported) as exc:
        kind = _kind_from_args(args)
        print(f"error: {exc}", file=sys.stderr)
        if kind:
            print(f"supported {args.extreme} regimes for {kind}: {SUPPORTED[(kind, args.extreme)]}",
                  file=sys.stderr)
        return EXIT_UNSUPPORTED
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except (InvalidDOF, InsufficientAcceptance) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SAMPLER
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def _kind_from_args(args):
    try:
        return load_config(args).get("kind")
    except ConfigError:
        return None


if __name__ == "__main__":
    sys.exit(main())
