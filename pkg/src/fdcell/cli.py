"""Command line front end.

Five subcommands: coverage, inverse-sinr, rate, reproduce, compare.  Every
numeric task reads an optional key=value config file; flags override it.
Exit codes: 0 success, 1 usage or configuration error, 2 numerical
non-convergence or a degenerate distribution, 3 comparison failure.
"""

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .analytic import (
    DegenerateCdfError,
    QuadratureError,
    cell_edge_rate,
    mean_rate,
    rate_cdf,
)
from .harness import (
    FIGURES,
    X_KINDS,
    ConfigError,
    analytic_coverage_fn,
    compare_files,
    coverage_columns,
    curve_rows,
    default_p_d_dbm,
    inverse_sinr_columns,
    manifest_path_for,
    parse_config,
    parse_grid,
    read_config,
    reproduce,
    write_curve_csv,
    write_curve_manifest,
)
from .montecarlo import estimate_rate_stats


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as ConfigError (exit code 1)."""

    def error(self, message):
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="fdcell",
                     description="Coverage, SINR moment, and rate analysis "
                                 "for full-duplex cellular networks.")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add_common(p):
        p.add_argument("--config", metavar="FILE",
                       help="key=value run configuration")
        p.add_argument("--method", choices=("analytic", "sim", "both"),
                       help="analytic curve, Monte Carlo, or both")
        p.add_argument("--drops", type=int, metavar="N",
                       help="Monte Carlo drops")
        p.add_argument("--seed", type=int, metavar="S",
                       help="base seed for the per-drop streams")
        p.add_argument("--workers", type=int, metavar="W",
                       help="worker processes (results do not depend on W)")
        p.add_argument("--out", metavar="FILE",
                       help="write the curve CSV and manifest instead of stdout")

    cov = sub.add_parser("coverage",
                         help="coverage probability over an SINR threshold grid")
    add_common(cov)
    cov.add_argument("--link", choices=("dl", "ul"))
    cov.add_argument("--duplex", choices=("fd", "hd"))
    cov.add_argument("--thresholds", metavar="GRID",
                     help="thresholds in dB, lo:hi:step or comma list")

    inv = sub.add_parser("inverse-sinr",
                         help="mean inverse SINR in dB, analytic bound and/or "
                              "fading-free simulation")
    add_common(inv)
    inv.add_argument("--link", choices=("dl", "ul"))
    inv.add_argument("--p-d-sweep", metavar="GRID",
                     help="downlink power sweep in dBm (default: the single "
                          "configured power)")
    inv.add_argument("--quantity",
                     choices=("mean_inv_sinr_db", "mean_sinr_db"),
                     default="mean_inv_sinr_db",
                     help="mean_sinr_db is the simulation-only overlay")

    rate = sub.add_parser("rate",
                          help="rate CDF plus mean and 5%% cell edge rate")
    add_common(rate)
    rate.add_argument("--link", choices=("dl", "ul"))
    rate.add_argument("--duplex", choices=("fd", "hd"))
    rate.add_argument("--rates", metavar="GRID",
                      help="CDF grid in bps/Hz, lo:hi:step or comma list")

    rep = sub.add_parser("reproduce",
                         help="regenerate published reference curves or the "
                              "rate table")
    rep.add_argument("figure", choices=FIGURES)
    rep.add_argument("--out-dir", default="reproduced", metavar="DIR")
    rep.add_argument("--method", choices=("analytic", "sim", "both"),
                     default="analytic")
    rep.add_argument("--drops", type=int, default=10000, metavar="N")
    rep.add_argument("--seed", type=int, default=1, metavar="S")
    rep.add_argument("--workers", type=int, default=1, metavar="W")

    cmp_ = sub.add_parser("compare",
                          help="point-by-point comparison of two curve files")
    cmp_.add_argument("file_a",
                      help="curve CSV or ref:<figure>:<curve>")
    cmp_.add_argument("file_b",
                      help="curve CSV or ref:<figure>:<curve>")
    cmp_.add_argument("--tol", type=float, required=True,
                      help="absolute tolerance per point")
    cmp_.add_argument("--out", metavar="FILE",
                      help="write the JSON report here as well")
    return parser


def _resolve(args, task):
    """Config file plus flag overrides, resolved into one RunConfig."""
    cfg = read_config(args.config) if args.config else parse_config("")
    updates = {"task": task}
    for attr, field in (("method", "method"), ("seed", "seed"),
                        ("drops", "n_drops"), ("workers", "workers"),
                        ("out", "out"), ("link", "link"),
                        ("duplex", "duplex")):
        value = getattr(args, attr, None)
        if value is not None:
            updates[field] = value
    thresholds = getattr(args, "thresholds", None)
    if thresholds:
        updates["thresholds_db"] = tuple(parse_grid(thresholds, "--thresholds"))
    rates = getattr(args, "rates", None)
    if rates:
        updates["rates_bps_hz"] = tuple(parse_grid(rates, "--rates"))
    cfg = dataclasses.replace(cfg, **updates)
    if cfg.n_drops < 1:
        raise ConfigError(f"--drops must be at least 1, got {cfg.n_drops}")
    if cfg.workers < 1:
        raise ConfigError(f"--workers must be at least 1, got {cfg.workers}")
    if cfg.seed < 0:
        raise ConfigError(f"--seed must be non-negative, got {cfg.seed}")
    return cfg


def _emit(cfg, task, x, analytic, sim, sim_ci, quantity=None):
    if cfg.out:
        path = write_curve_csv(cfg.out, x, analytic, sim, sim_ci)
        write_curve_manifest(path, task=task, x_kind=X_KINDS[task], x=x,
                             scenario=cfg.scenario, link=cfg.link,
                             duplex=cfg.duplex, method=cfg.method,
                             n_drops=cfg.n_drops, seed=cfg.seed,
                             workers=cfg.workers, quad=cfg.quad,
                             quantity=quantity)
        print(f"wrote {path}")
        print(f"wrote {manifest_path_for(path)}")
    else:
        csv.writer(sys.stdout).writerows(curve_rows(x, analytic, sim, sim_ci))


def cmd_coverage(args):
    cfg = _resolve(args, "coverage")
    x, analytic, sim, sim_ci = coverage_columns(
        cfg.scenario, cfg.link, cfg.duplex, cfg.method,
        np.asarray(cfg.thresholds_db), cfg.quad, cfg.n_drops, cfg.seed,
        cfg.workers)
    _emit(cfg, "coverage", x, analytic, sim, sim_ci)
    return 0


def cmd_inverse_sinr(args):
    cfg = _resolve(args, "inverse-sinr")
    sweep = getattr(args, "p_d_sweep", None)
    if sweep:
        grid = parse_grid(sweep, "--p-d-sweep")
    else:
        grid = np.array([default_p_d_dbm(cfg.scenario)])
    x, analytic, sim, sim_ci = inverse_sinr_columns(
        cfg.scenario, cfg.link, cfg.method, grid, cfg.n_drops, cfg.seed,
        cfg.workers, quantity=args.quantity)
    _emit(cfg, "inverse-sinr", x, analytic, sim, sim_ci,
          quantity=args.quantity)
    return 0


def cmd_rate(args):
    cfg = _resolve(args, "rate")
    x = np.asarray(cfg.rates_bps_hz)
    analytic = sim = sim_ci = None
    if cfg.method in ("analytic", "both"):
        fn = analytic_coverage_fn(cfg.scenario, cfg.link, cfg.duplex, cfg.quad)
        analytic = np.array([rate_cdf(fn, c, cfg.duplex) for c in x])
        mean = mean_rate(fn, cfg.duplex, cfg.quad)
        edge = cell_edge_rate(fn, cfg.duplex, quad=cfg.quad)
        print(f"analytic mean rate: {mean:.6g} bps/Hz")
        print(f"analytic cell edge rate (5%): {edge:.6g} bps/Hz")
    if cfg.method in ("sim", "both"):
        profile = estimate_rate_stats(cfg.scenario, link=cfg.link,
                                      duplex=cfg.duplex, n_drops=cfg.n_drops,
                                      seed=cfg.seed, n_workers=cfg.workers)
        counts = np.searchsorted(profile.cdf_rate, x, side="right")
        sim = counts / profile.n_drops
        sim_ci = 1.96 * np.sqrt(sim * (1.0 - sim) / profile.n_drops)
        print(f"simulated mean rate: {profile.mean_rate:.6g} bps/Hz "
              f"({profile.n_drops} drops)")
        print(f"simulated cell edge rate (5%): {profile.edge_rate:.6g} bps/Hz")
    _emit(cfg, "rate-cdf", x, analytic, sim, sim_ci)
    return 0


def cmd_reproduce(args):
    if args.drops < 1 or args.seed < 0 or args.workers < 1:
        raise ConfigError("--drops/--seed/--workers must be positive "
                          "(seed may be zero)")
    written = reproduce(args.figure, args.out_dir, method=args.method,
                        n_drops=args.drops, seed=args.seed,
                        workers=args.workers)
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_compare(args):
    report = compare_files(args.file_a, args.file_b, args.tol)
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"comparison {verdict}: max |deviation| {report.max_abs_dev:.3g} "
          f"(tolerance {report.tol:.3g}, {report.n_points} points, "
          f"columns {','.join(report.columns)})")
    return 0 if report.passed else 3


_COMMANDS = {
    "coverage": cmd_coverage,
    "inverse-sinr": cmd_inverse_sinr,
    "rate": cmd_rate,
    "reproduce": cmd_reproduce,
    "compare": cmd_compare,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (QuadratureError, DegenerateCdfError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
