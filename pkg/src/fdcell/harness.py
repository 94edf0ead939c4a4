"""Run configuration, artifact I/O, and regeneration of the reference curves.

Everything that crosses a process boundary lives here: config files, curve
CSVs, JSON manifests, comparison reports, and the packaged published
reference curves.  Outputs are deterministic functions of the resolved
configuration and seed; nothing in this module consults the wall clock or
the environment.

Artifact conventions
--------------------
* Curve CSVs carry the fixed header ``x,analytic,sim,sim_ci`` with values
  printed to 9 significant digits; absent columns are left blank.
* Each curve CSV has a sibling ``<name>.manifest.json``: a flat JSON object
  of every resolved parameter, unit convention, grid, tolerance, seed and
  drop count.  The manifest alone suffices to re-run and bit-reproduce the
  CSV (see run_from_manifest).
* compare_files never interpolates; two files must share an x grid exactly.
"""

import csv
import dataclasses
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .analytic import (
    QuadratureSpec,
    cell_edge_rate,
    fd_dl_coverage,
    fd_ul_coverage,
    hd_dl_coverage,
    mean_inverse_sinr_dl,
    mean_inverse_sinr_ul,
    mean_rate,
    rate_cdf,
)
from .montecarlo import (
    estimate_coverage,
    estimate_inverse_sinr,
    estimate_rate_stats,
)
from .scenario import (
    PowerUnit,
    PowerUnitConvention,
    ScenarioParams,
    db10,
    dbm_to_linear,
    from_inter_bs_distance,
    linear_to_dbm,
)

ARTIFACT_VERSION = "0.1.0"

_CSV_HEADER = ["x", "analytic", "sim", "sim_ci"]
_CI_FACTOR = 1.96        # 95% normal interval, matching the simulator's convention

FIGURES = ("fig2", "fig3", "fig4", "fig5", "table1")


class ConfigError(ValueError):
    """Invalid configuration, artifact, or comparison input.

    Raised before anything is applied or written, so a failing parse never
    leaves a half-configured run behind.
    """


# ---------------------------------------------------------------------------
# run configuration

_TASKS = ("coverage", "inverse-sinr", "rate", "reproduce", "compare")
_LINKS = ("dl", "ul")
_DUPLEXES = ("fd", "hd")
_METHODS = ("analytic", "sim", "both")
_UNIT_NAMES = tuple(u.value for u in PowerUnit)

# Raw (string) defaults.  Keeping defaults in string form funnels them and
# file overrides through the same conversion code, so a bad default would be
# caught by the exact same checks as a bad config file.  Empty string marks
# an optional key that is derived when unset.
_DEFAULT_RAW = {
    "task": "coverage",
    "link": "dl",
    "duplex": "fd",
    "method": "analytic",
    "inter_bs_m": "400",        # inter-site distance, m; r_c = inter_bs_m / 2
    "r_c_m": "",                # cell radius override, m
    "lambda_bs": "",            # density override, 1/m^2; default 1/(pi r_c^2)
    "p_d_dbm": "40",
    "p_0_dbm": "-64",
    "p_d_unit": "milliwatt",
    "p_0_unit": "milliwatt",
    "p_max_u_dbm": "23",
    "epsilon": "0.2",
    "alpha": "4",
    "sigma2": "0",              # noise power, linear, same unit as p_d
    "window_m": "10000",
    "thresholds_db": "-40:40:5",
    "rates_bps_hz": "0:15:0.5",
    "n_drops": "10000",
    "seed": "1",
    "workers": "1",
    # publication-grade tolerance; fine for every curve here, and the
    # full-duplex downlink rate profile nests two integrals, so anything
    # much tighter turns the rate task from minutes into tens of minutes
    "quad_rel_tol": "1e-6",
    "quad_abs_tol": "1e-9",
    "quad_max_depth": "40",
    "out": "",
}

# scenario field name (as it appears in ScenarioParams error messages)
# -> config key, used to attach a config line number to range errors
_FIELD_TO_KEY = {
    "lambda_bs": "lambda_bs",
    "r_c": "r_c_m",
    "p_max_u": "p_max_u_dbm",
    "p_d": "p_d_dbm",
    "p_0": "p_0_dbm",
    "epsilon": "epsilon",
    "alpha": "alpha",
    "sigma2": "sigma2",
    "window_len": "window_m",
}


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved run: scenario, task selection, grids, and budgets."""

    scenario: ScenarioParams
    task: str = "coverage"
    link: str = "dl"
    duplex: str = "fd"
    method: str = "analytic"
    thresholds_db: tuple = ()
    rates_bps_hz: tuple = ()
    n_drops: int = 10000
    seed: int = 1
    workers: int = 1
    quad: QuadratureSpec = QuadratureSpec()
    out: str = None


def parse_grid(spec, key="grid"):
    """Parse a grid spec: 'lo:hi:step' (inclusive ends) or a comma list."""
    spec = spec.strip()
    if not spec:
        raise ConfigError(f"{key}: empty grid")
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key}: range grids look like lo:hi:step, got {spec!r}")
        try:
            lo, hi, step = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"{key}: non-numeric range bound in {spec!r}") from None
        if step <= 0.0:
            raise ConfigError(f"{key}: step must be positive, got {step}")
        if hi < lo:
            raise ConfigError(f"{key}: upper end {hi} below lower end {lo}")
        values = np.arange(lo, hi + 0.5 * step, step)
    else:
        try:
            values = np.array([float(p) for p in spec.split(",")])
        except ValueError:
            raise ConfigError(f"{key}: non-numeric grid entry in {spec!r}") from None
    if values.size == 0 or not np.all(np.isfinite(values)):
        raise ConfigError(f"{key}: grid must be nonempty and finite")
    return values


def parse_config(text):
    """Parse key=value config text into a RunConfig.

    Lines hold one ``key = value`` pair each; ``#`` starts a comment and
    blank lines are skipped.  Unknown or duplicate keys and malformed
    values are errors naming the key and line, and nothing is applied on
    failure.  Empty text yields the defaults (alpha 4, no noise, 400 m
    inter-site preset at 40 dBm / -64 dBm).
    """
    raw = dict(_DEFAULT_RAW)
    lines = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key=value, got {body!r}")
        key, _, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if key not in raw:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in lines:
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} "
                f"(first set on line {lines[key]})")
        if not value:
            raise ConfigError(f"line {lineno}: key {key!r} has no value")
        raw[key] = value
        lines[key] = lineno
    return _build_config(raw, lines)


def _build_config(raw, lines):
    def where(key):
        return f"key {key!r} (line {lines[key]})" if key in lines else f"key {key!r}"

    def as_float(key):
        try:
            return float(raw[key])
        except ValueError:
            raise ConfigError(f"{where(key)}: expected a number, got {raw[key]!r}") from None

    def as_int(key, minimum):
        try:
            value = int(raw[key])
        except ValueError:
            raise ConfigError(f"{where(key)}: expected an integer, got {raw[key]!r}") from None
        if value < minimum:
            raise ConfigError(f"{where(key)}: must be at least {minimum}, got {value}")
        return value

    def as_choice(key, options):
        if raw[key] not in options:
            raise ConfigError(
                f"{where(key)}: expected one of {', '.join(options)}, got {raw[key]!r}")
        return raw[key]

    task = as_choice("task", _TASKS)
    link = as_choice("link", _LINKS)
    duplex = as_choice("duplex", _DUPLEXES)
    method = as_choice("method", _METHODS)
    units = PowerUnitConvention(
        p_0=PowerUnit(as_choice("p_0_unit", _UNIT_NAMES)),
        p_d=PowerUnit(as_choice("p_d_unit", _UNIT_NAMES)))

    r_c = as_float("r_c_m") if raw["r_c_m"] else 0.5 * as_float("inter_bs_m")
    if not r_c > 0.0:
        key = "r_c_m" if raw["r_c_m"] else "inter_bs_m"
        raise ConfigError(f"{where(key)}: cell radius must be positive, got {r_c}")
    lam = as_float("lambda_bs") if raw["lambda_bs"] else 1.0 / (math.pi * r_c**2)

    try:
        scenario = ScenarioParams(
            lambda_bs=lam,
            r_c=r_c,
            p_d=dbm_to_linear(as_float("p_d_dbm"), units.p_d),
            p_0=dbm_to_linear(as_float("p_0_dbm"), units.p_0),
            # the cap combines with p_0 inside min(), so it shares p_0's unit
            p_max_u=dbm_to_linear(as_float("p_max_u_dbm"), units.p_0),
            epsilon=as_float("epsilon"),
            alpha=as_float("alpha"),
            sigma2=as_float("sigma2"),
            window_len=as_float("window_m"),
            units=units)
    except ValueError as exc:
        for fld, key in _FIELD_TO_KEY.items():
            if fld in str(exc):
                if key == "r_c_m" and not raw["r_c_m"]:
                    key = "inter_bs_m"
                raise ConfigError(f"{where(key)}: {exc}") from None
        raise ConfigError(str(exc)) from None

    try:
        quad = QuadratureSpec(
            rel_tol=as_float("quad_rel_tol"),
            abs_tol=as_float("quad_abs_tol"),
            max_depth=as_int("quad_max_depth", 1))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    return RunConfig(
        scenario=scenario,
        task=task,
        link=link,
        duplex=duplex,
        method=method,
        thresholds_db=tuple(parse_grid(raw["thresholds_db"], "thresholds_db")),
        rates_bps_hz=tuple(parse_grid(raw["rates_bps_hz"], "rates_bps_hz")),
        n_drops=as_int("n_drops", 1),
        seed=as_int("seed", 0),
        workers=as_int("workers", 1),
        quad=quad,
        out=raw["out"] or None)


def read_config(path):
    """parse_config on a file, with the path prefixed to any error."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        return parse_config(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# curve CSV and manifest round-trip

def _fmt(value):
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return ""
    return format(value, ".9g")


def curve_rows(x, analytic=None, sim=None, sim_ci=None):
    """Header plus data rows for a curve, formatted to 9 significant digits.

    Missing columns (None) and NaN entries become blank cells, which the
    reader maps back to NaN.
    """
    x = np.asarray(x, dtype=float)
    columns = []
    for name, col in (("analytic", analytic), ("sim", sim), ("sim_ci", sim_ci)):
        if col is None:
            columns.append([None] * x.size)
        else:
            col = np.asarray(col, dtype=float)
            if col.shape != x.shape:
                raise ValueError(
                    f"column {name} has {col.size} entries for {x.size} x values")
            columns.append(col.tolist())
    rows = [list(_CSV_HEADER)]
    for i in range(x.size):
        rows.append([_fmt(x[i])] + [_fmt(col[i]) for col in columns])
    return rows


def write_curve_csv(path, x, analytic=None, sim=None, sim_ci=None):
    """Write a curve as x,analytic,sim,sim_ci rows at 9 significant digits."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        csv.writer(fh).writerows(curve_rows(x, analytic, sim, sim_ci))
    return path


def read_curve_csv(path):
    """Read a curve CSV back into {'x','analytic','sim','sim_ci'} arrays."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    if not rows or rows[0] != _CSV_HEADER:
        raise ConfigError(
            f"{path}: expected header {','.join(_CSV_HEADER)}, "
            f"got {','.join(rows[0]) if rows else 'an empty file'}")
    data = {name: [] for name in _CSV_HEADER}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(_CSV_HEADER):
            raise ConfigError(
                f"{path} line {lineno}: expected {len(_CSV_HEADER)} fields, got {len(row)}")
        for name, cell in zip(_CSV_HEADER, row):
            if cell == "":
                data[name].append(math.nan)
                continue
            try:
                data[name].append(float(cell))
            except ValueError:
                raise ConfigError(
                    f"{path} line {lineno}: bad number {cell!r} in column {name}") from None
    if not data["x"]:
        raise ConfigError(f"{path}: no data rows")
    if any(math.isnan(v) for v in data["x"]):
        raise ConfigError(f"{path}: x column has blank entries")
    return {name: np.array(values) for name, values in data.items()}


def write_manifest(path, entries):
    """Write a flat JSON manifest (scalars and strings only, sorted keys)."""
    flat = {}
    for key, value in entries.items():
        if isinstance(value, (np.floating, np.integer, np.bool_)):
            value = value.item()
        if value is not None and not isinstance(value, (str, bool, int, float)):
            raise ValueError(
                f"manifest value for {key!r} must be a scalar, got {type(value).__name__}")
        flat[key] = value
    path = Path(path)
    path.write_text(json.dumps(flat, indent=2, sort_keys=True) + "\n")
    return path


def read_manifest(path):
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: manifest must be a JSON object")
    return data


def manifest_path_for(csv_path):
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.stem + ".manifest.json")


def _scenario_entries(scenario):
    return {
        "lambda_bs": scenario.lambda_bs,
        "r_c_m": scenario.r_c,
        "p_d": scenario.p_d,
        "p_0": scenario.p_0,
        "p_max_u": scenario.p_max_u,
        "p_d_unit": scenario.units.p_d.value,
        "p_0_unit": scenario.units.p_0.value,
        "epsilon": scenario.epsilon,
        "alpha": scenario.alpha,
        "sigma2": scenario.sigma2,
        "window_m": scenario.window_len,
    }


def _scenario_from_entries(entries):
    try:
        units = PowerUnitConvention(
            p_0=PowerUnit(entries["p_0_unit"]),
            p_d=PowerUnit(entries["p_d_unit"]))
        return ScenarioParams(
            lambda_bs=entries["lambda_bs"],
            r_c=entries["r_c_m"],
            p_d=entries["p_d"],
            p_0=entries["p_0"],
            p_max_u=entries["p_max_u"],
            epsilon=entries["epsilon"],
            alpha=entries["alpha"],
            sigma2=entries["sigma2"],
            window_len=entries["window_m"],
            units=units)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"manifest scenario fields missing or invalid: {exc}") from None


def write_curve_manifest(csv_path, *, task, x_kind, x, scenario, link, duplex,
                         method, n_drops, seed, workers, quad,
                         figure=None, curve=None, quantity=None):
    """Write the sibling manifest that makes csv_path re-runnable."""
    entries = {
        "artifact_version": ARTIFACT_VERSION,
        "task": task,
        "x_kind": x_kind,
        "x_values": ",".join(_fmt(v) for v in np.asarray(x, dtype=float)),
        "link": link,
        "duplex": duplex,
        "method": method,
        "n_drops": int(n_drops),
        "seed": int(seed),
        "workers": int(workers),
        "quad_rel_tol": quad.rel_tol,
        "quad_abs_tol": quad.abs_tol,
        "quad_max_depth": quad.max_depth,
    }
    if figure is not None:
        entries["figure"] = figure
    if curve is not None:
        entries["curve"] = curve
    if quantity is not None:
        entries["quantity"] = quantity
    entries.update(_scenario_entries(scenario))
    return write_manifest(manifest_path_for(csv_path), entries)


# ---------------------------------------------------------------------------
# column computation for the three curve tasks

def analytic_coverage_fn(scenario, link, duplex, quad=None):
    """Coverage probability callable T -> P for the requested link/duplex."""
    if link == "dl":
        if duplex == "hd":
            return lambda t: hd_dl_coverage(t, scenario, quad)
        return lambda t: fd_dl_coverage(t, scenario, quad)
    if duplex == "fd":
        return lambda t: fd_ul_coverage(t, scenario, quad)
    raise ConfigError(
        "no analytic half-duplex uplink curve is available; use method=sim")


def coverage_columns(scenario, link, duplex, method, thresholds_db, quad,
                     n_drops, seed, workers):
    """Coverage probability columns over a threshold grid in dB."""
    x = np.asarray(thresholds_db, dtype=float)
    analytic = sim = sim_ci = None
    if method in ("analytic", "both"):
        fn = analytic_coverage_fn(scenario, link, duplex, quad)
        analytic = np.array([fn(10.0 ** (t / 10.0)) for t in x])
    if method in ("sim", "both"):
        curve = estimate_coverage(scenario, link=link, duplex=duplex,
                                  thresholds=x, n_drops=n_drops, seed=seed,
                                  n_workers=workers)
        sim, sim_ci = curve.probability, curve.ci_half_width
    return x, analytic, sim, sim_ci


def rate_cdf_columns(scenario, link, duplex, method, rates, quad,
                     n_drops, seed, workers):
    """Rate CDF columns over a grid of rates in bps/Hz."""
    x = np.asarray(rates, dtype=float)
    analytic = sim = sim_ci = None
    if method in ("analytic", "both"):
        fn = analytic_coverage_fn(scenario, link, duplex, quad)
        analytic = np.array([rate_cdf(fn, c, duplex) for c in x])
    if method in ("sim", "both"):
        profile = estimate_rate_stats(scenario, link=link, duplex=duplex,
                                      n_drops=n_drops, seed=seed,
                                      n_workers=workers)
        counts = np.searchsorted(profile.cdf_rate, x, side="right")
        sim = counts / profile.n_drops
        sim_ci = _CI_FACTOR * np.sqrt(sim * (1.0 - sim) / profile.n_drops)
    return x, analytic, sim, sim_ci


def inverse_sinr_columns(scenario, link, method, p_d_dbm, n_drops, seed,
                         workers, quantity="mean_inv_sinr_db"):
    """Mean inverse SINR (dB) columns over a downlink power sweep in dBm.

    quantity 'mean_sinr_db' instead reports the simulated mean SINR, the
    overlay the published curves use; it has no analytic column.
    """
    if quantity not in ("mean_inv_sinr_db", "mean_sinr_db"):
        raise ConfigError(f"unknown inverse-SINR quantity {quantity!r}")
    x = np.asarray(p_d_dbm, dtype=float)
    bound = mean_inverse_sinr_dl if link == "dl" else mean_inverse_sinr_ul
    sweeps = [dataclasses.replace(scenario,
                                  p_d=dbm_to_linear(v, scenario.units.p_d))
              for v in x]
    analytic = sim = sim_ci = None
    if method in ("analytic", "both") and quantity == "mean_inv_sinr_db":
        analytic = np.array([db10(bound(s)) for s in sweeps])
    if method in ("sim", "both"):
        values, errors = [], []
        for s in sweeps:
            report = estimate_inverse_sinr(s, link=link, n_drops=n_drops,
                                           seed=seed, n_workers=workers)
            if quantity == "mean_inv_sinr_db":
                values.append(report.mean_inv_sinr_db)
                errors.append(report.std_error)
            else:
                values.append(report.mean_sinr_db)
                errors.append(math.nan)
        sim, sim_ci = np.array(values), np.array(errors)
    if analytic is None and sim is None:
        raise ConfigError(
            "mean_sinr_db is a simulation overlay; use method=sim or both")
    return x, analytic, sim, sim_ci


X_KINDS = {"coverage": "threshold_db",
           "rate-cdf": "rate_bps_hz",
           "inverse-sinr": "p_d_dbm"}


def _run_curve_task(task, scenario, link, duplex, method, x, quad,
                    n_drops, seed, workers, quantity=None):
    if task == "coverage":
        return coverage_columns(scenario, link, duplex, method, x, quad,
                                n_drops, seed, workers)
    if task == "rate-cdf":
        return rate_cdf_columns(scenario, link, duplex, method, x, quad,
                                n_drops, seed, workers)
    if task == "inverse-sinr":
        return inverse_sinr_columns(scenario, link, method, x, n_drops, seed,
                                    workers, quantity or "mean_inv_sinr_db")
    raise ConfigError(f"unknown curve task {task!r}")


def run_from_manifest(manifest_path, out_csv=None):
    """Recompute a curve CSV from its manifest alone.

    The manifest pins every resolved parameter, grid, tolerance, seed and
    worker count, so the rewritten CSV is bit-identical to the original
    artifact.  out_csv defaults to the manifest's name with .manifest.json
    replaced by .csv.
    """
    manifest_path = Path(manifest_path)
    entries = read_manifest(manifest_path)
    version = entries.get("artifact_version")
    if version != ARTIFACT_VERSION:
        raise ConfigError(
            f"{manifest_path}: artifact version {version!r} does not match "
            f"this package ({ARTIFACT_VERSION})")
    if out_csv is None:
        name = manifest_path.name
        suffix = ".manifest.json"
        if not name.endswith(suffix):
            raise ConfigError(
                f"cannot derive an output name from {name!r}; pass out_csv")
        out_csv = manifest_path.with_name(name[: -len(suffix)] + ".csv")
    try:
        task = entries["task"]
        link = entries["link"]
        duplex = entries["duplex"]
        method = entries["method"]
        n_drops = int(entries["n_drops"])
        seed = int(entries["seed"])
        workers = int(entries["workers"])
        raw_x = entries["x_values"]
        quad = QuadratureSpec(rel_tol=entries["quad_rel_tol"],
                              abs_tol=entries["quad_abs_tol"],
                              max_depth=int(entries["quad_max_depth"]))
    except KeyError as exc:
        raise ConfigError(f"{manifest_path}: manifest is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{manifest_path}: {exc}") from None
    try:
        x = np.array([float(v) for v in raw_x.split(",")])
    except (AttributeError, ValueError):
        raise ConfigError(f"{manifest_path}: x_values are not numeric") from None
    scenario = _scenario_from_entries(entries)
    columns = _run_curve_task(task, scenario, link, duplex, method, x, quad,
                              n_drops, seed, workers,
                              quantity=entries.get("quantity"))
    return write_curve_csv(out_csv, *columns)


# ---------------------------------------------------------------------------
# packaged reference curves

def load_reference(figure):
    """Published reference curves for a figure as {name: (x, y)} arrays."""
    if figure not in ("fig2", "fig3", "fig4", "fig5"):
        raise ConfigError(
            f"unknown reference figure {figure!r}; expected fig2..fig5")
    text = resources.files("fdcell.refdata").joinpath(f"{figure}.csv").read_text()
    curves = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("curve,"):
            continue
        name, x_text, y_text = line.split(",")
        curves.setdefault(name, []).append((float(x_text), float(y_text)))
    return {name: (np.array([p[0] for p in points]),
                   np.array([p[1] for p in points]))
            for name, points in curves.items()}


def load_reference_table():
    """Published rate table as {row: {column: value}} with NaN for blanks."""
    text = resources.files("fdcell.refdata").joinpath("table1.csv").read_text()
    rows = [r for r in csv.reader(text.splitlines())
            if r and not r[0].startswith("#")]
    header = rows[0]
    table = {}
    for row in rows[1:]:
        table[row[0]] = {name: (float(cell) if cell else math.nan)
                         for name, cell in zip(header[1:], row[1:])}
    return table


# ---------------------------------------------------------------------------
# figure reproduction

def _with(base, **kwargs):
    return dataclasses.replace(base, **kwargs)


def _figure_jobs(figure):
    """Per-curve job descriptions with the conventions each figure uses.

    The published curves are not all in one parameterization: the coverage
    and rate figures quote powers in dBm referenced to milliwatts with the
    cluster radius equal to half the inter-site distance, while the
    inverse-SINR sweeps label the cluster radius directly and reference the
    uplink power target to watts.  The x grids come from the packaged
    reference curves so compare_files lines up point for point.
    """
    reference = load_reference(figure)
    base = from_inter_bs_distance(400.0, p_d=dbm_to_linear(40.0),
                                  p_0=dbm_to_linear(-64.0))
    jobs = []
    if figure == "fig2":
        for curve, duplex, eps in (("hd", "hd", base.epsilon),
                                   ("fd_eps02", "fd", 0.2),
                                   ("fd_eps08", "fd", 0.8)):
            jobs.append(dict(task="coverage", curve=curve, link="dl",
                             duplex=duplex,
                             scenario=_with(base, epsilon=eps),
                             x=reference[curve][0]))
    elif figure == "fig3":
        for curve, eps, p_d_dbm in (("eps08_pd40", 0.8, 40.0),
                                    ("eps02_pd40", 0.2, 40.0),
                                    ("eps08_pd23", 0.8, 23.0),
                                    ("eps02_pd23", 0.2, 23.0)):
            scenario = _with(base, epsilon=eps, p_d=dbm_to_linear(p_d_dbm))
            jobs.append(dict(task="coverage", curve=curve, link="ul",
                             duplex="fd", scenario=scenario,
                             x=reference[curve][0]))
    elif figure == "fig4":
        units = PowerUnitConvention(p_0=PowerUnit.WATT, p_d=PowerUnit.MILLIWATT)
        for link in ("dl", "ul"):
            for r_c in (400.0, 200.0):
                for eps, tag in ((0.2, "eps02"), (0.8, "eps08")):
                    curve = f"{link}_r{r_c:.0f}_{tag}"
                    scenario = ScenarioParams(
                        lambda_bs=1.0 / (math.pi * r_c**2),
                        r_c=r_c,
                        p_d=dbm_to_linear(23.0),
                        p_0=dbm_to_linear(-64.0, PowerUnit.WATT),
                        p_max_u=dbm_to_linear(23.0, PowerUnit.WATT),
                        epsilon=eps,
                        units=units)
                    jobs.append(dict(task="inverse-sinr", curve=curve,
                                     link=link, duplex="fd",
                                     scenario=scenario,
                                     x=reference[curve][0],
                                     quantity="mean_inv_sinr_db"))
    elif figure == "fig5":
        for curve, link, duplex, eps, p_d_dbm in (
                ("ul_pd23_eps08", "ul", "fd", 0.8, 23.0),
                ("dl_pd40_eps08", "dl", "fd", 0.8, 40.0),
                ("dl_pd23_eps08", "dl", "fd", 0.8, 23.0),
                ("dl_hd", "dl", "hd", base.epsilon, 40.0)):
            scenario = _with(base, epsilon=eps, p_d=dbm_to_linear(p_d_dbm))
            jobs.append(dict(task="rate-cdf", curve=curve, link=link,
                             duplex=duplex, scenario=scenario,
                             x=reference[curve][0]))
    else:
        raise ConfigError(f"unknown figure {figure!r}; expected one of {FIGURES}")
    return jobs


_REPRODUCE_QUAD = QuadratureSpec(rel_tol=1e-6, abs_tol=1e-9)

_TABLE_CONFIGS = (("eps02_pd40", 0.2, 40.0),
                  ("eps08_pd40", 0.8, 40.0),
                  ("eps02_pd23", 0.2, 23.0),
                  ("eps08_pd23", 0.8, 23.0))
_TABLE_HEADER = ["config", "ul_edge_rate", "ul_mean_rate",
                 "dl_edge_rate", "dl_mean_rate"]


def _reproduce_table(out_dir, quad, n_drops, seed, workers):
    base = from_inter_bs_distance(400.0, p_d=dbm_to_linear(40.0),
                                  p_0=dbm_to_linear(-64.0))
    rows = []
    for name, eps, p_d_dbm in _TABLE_CONFIGS:
        scenario = _with(base, epsilon=eps, p_d=dbm_to_linear(p_d_dbm))
        ul = analytic_coverage_fn(scenario, "ul", "fd", quad)
        dl = analytic_coverage_fn(scenario, "dl", "fd", quad)
        rows.append([name,
                     cell_edge_rate(ul, "fd", quad=quad),
                     mean_rate(ul, "fd", quad),
                     cell_edge_rate(dl, "fd", quad=quad),
                     mean_rate(dl, "fd", quad)])
    hd = analytic_coverage_fn(base, "dl", "hd", quad)
    rows.append(["hd", math.nan, math.nan,
                 cell_edge_rate(hd, "hd", quad=quad),
                 mean_rate(hd, "hd", quad)])

    csv_path = Path(out_dir) / "table1.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_TABLE_HEADER)
        for row in rows:
            writer.writerow([row[0]] + [_fmt(v) for v in row[1:]])
    manifest = write_manifest(manifest_path_for(csv_path), {
        "artifact_version": ARTIFACT_VERSION,
        "task": "rate-table",
        "rows": ",".join(r[0] for r in rows),
        "method": "analytic",
        "n_drops": int(n_drops),
        "seed": int(seed),
        "workers": int(workers),
        "quad_rel_tol": quad.rel_tol,
        "quad_abs_tol": quad.abs_tol,
        "quad_max_depth": quad.max_depth,
        **_scenario_entries(base),
    })
    return [csv_path, manifest]


def reproduce(figure, out_dir, method="analytic", n_drops=10000, seed=1,
              workers=1, quad=None):
    """Regenerate a published figure's curves (or the rate table).

    Writes one CSV plus one manifest per curve into out_dir and returns the
    written paths.  On any failure every partial output is removed before
    the error propagates.  The rate table is analytic-only; its four
    configurations share the 400 m inter-site preset.
    """
    if figure not in FIGURES:
        raise ConfigError(f"unknown figure {figure!r}; expected one of {FIGURES}")
    quad = quad or _REPRODUCE_QUAD
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        if figure == "table1":
            written.extend(_reproduce_table(out_dir, quad, n_drops, seed, workers))
        else:
            for job in _figure_jobs(figure):
                columns = _run_curve_task(
                    job["task"], job["scenario"], job["link"], job["duplex"],
                    method, job["x"], quad, n_drops, seed, workers,
                    quantity=job.get("quantity"))
                csv_path = out_dir / f"{figure}_{job['curve']}.csv"
                written.append(write_curve_csv(csv_path, *columns))
                written.append(write_curve_manifest(
                    csv_path, task=job["task"], x_kind=X_KINDS[job["task"]],
                    x=job["x"], scenario=job["scenario"], link=job["link"],
                    duplex=job["duplex"], method=method, n_drops=n_drops,
                    seed=seed, workers=workers, quad=quad, figure=figure,
                    curve=job["curve"], quantity=job.get("quantity")))
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return written


# ---------------------------------------------------------------------------
# comparison

@dataclass(frozen=True)
class ComparisonReport:
    """Point-by-point comparison of two curve files sharing an x grid."""

    file_a: str
    file_b: str
    tol: float
    n_points: int
    columns: tuple           # column names actually compared
    abs_dev: dict            # column -> tuple of per-point |a - b|
    rel_dev: dict            # column -> tuple of per-point relative deviation
    ci_overlap: dict         # column -> tuple of bools (sim columns only)
    max_abs_dev: float
    max_rel_dev: float
    passed: bool

    def to_dict(self):
        return {
            "file_a": self.file_a,
            "file_b": self.file_b,
            "tol": self.tol,
            "n_points": self.n_points,
            "columns": list(self.columns),
            "abs_dev": {k: list(v) for k, v in self.abs_dev.items()},
            "rel_dev": {k: list(v) for k, v in self.rel_dev.items()},
            "ci_overlap": {k: list(v) for k, v in self.ci_overlap.items()},
            "max_abs_dev": self.max_abs_dev,
            "max_rel_dev": self.max_rel_dev,
            "passed": self.passed,
        }


def _curve_for_compare(spec):
    """Load a compare operand: a CSV path or a ref:<figure>:<curve> spec."""
    spec = str(spec)
    if spec.startswith("ref:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(
                f"reference operands look like ref:fig2:hd, got {spec!r}")
        _, figure, curve = parts
        curves = load_reference(figure)
        if curve not in curves:
            raise ConfigError(
                f"{figure} has no curve {curve!r}; "
                f"available: {', '.join(sorted(curves))}")
        x, y = curves[curve]
        blank = np.full(x.size, math.nan)
        data = {"x": x, "analytic": blank.copy(), "sim": blank.copy(),
                "sim_ci": blank.copy()}
        data["sim" if "sim" in curve else "analytic"] = y
        return data
    return read_curve_csv(spec)


def compare_files(file_a, file_b, tol):
    """Compare two curve files point by point against a tolerance.

    Both operands may be curve CSVs or ref:<figure>:<curve> specs.  The x
    grids must match exactly; resampling is an error, not a courtesy.  A
    point passes when |a - b| <= tol, or for sim columns alternatively when
    the joint 95% intervals overlap (deviation within ci_a + ci_b).
    """
    if not tol > 0.0:
        raise ConfigError(f"tolerance must be positive, got {tol}")
    a = _curve_for_compare(file_a)
    b = _curve_for_compare(file_b)
    if a["x"].size != b["x"].size or not np.allclose(a["x"], b["x"],
                                                     rtol=0.0, atol=1e-9):
        raise ConfigError(
            f"x grids differ ({a['x'].size} vs {b['x'].size} points); "
            "rerun on a matching grid, compare does not interpolate")

    columns, abs_dev, rel_dev, ci_overlap = [], {}, {}, {}
    passed = True
    worst_abs = worst_rel = 0.0
    for name in ("analytic", "sim"):
        col_a, col_b = a[name], b[name]
        have = np.isfinite(col_a) & np.isfinite(col_b)
        if not have.any():
            continue
        if not have.all():
            raise ConfigError(
                f"column {name} is only partially filled in one file; "
                "cannot compare point by point")
        dev = np.abs(col_a - col_b)
        scale = np.maximum(np.abs(col_a), np.abs(col_b))
        rel = np.divide(dev, scale, out=np.zeros_like(dev), where=scale > 0.0)
        ok = dev <= tol
        if name == "sim":
            ci = (np.nan_to_num(a["sim_ci"], nan=0.0)
                  + np.nan_to_num(b["sim_ci"], nan=0.0))
            joint = dev <= ci
            ci_overlap[name] = tuple(bool(v) for v in joint)
            ok = ok | joint
        columns.append(name)
        abs_dev[name] = tuple(float(v) for v in dev)
        rel_dev[name] = tuple(float(v) for v in rel)
        worst_abs = max(worst_abs, float(dev.max()))
        worst_rel = max(worst_rel, float(rel.max()))
        passed = passed and bool(ok.all())
    if not columns:
        raise ConfigError("the files share no filled data columns to compare")
    return ComparisonReport(
        file_a=str(file_a), file_b=str(file_b), tol=float(tol),
        n_points=int(a["x"].size), columns=tuple(columns),
        abs_dev=abs_dev, rel_dev=rel_dev, ci_overlap=ci_overlap,
        max_abs_dev=worst_abs, max_rel_dev=worst_rel, passed=passed)


def default_p_d_dbm(scenario):
    """The scenario's downlink power back in dBm, for single-point sweeps."""
    return linear_to_dbm(scenario.p_d, scenario.units.p_d)
