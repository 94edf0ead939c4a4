"""Coverage, SINR moments, and rate statistics for full-duplex cellular
networks with fractional uplink power control.

Base stations form a Poisson process; each cell serves one downlink and one
uplink user placed uniformly in a disk around the base station.  The package
pairs closed-form/quadrature results (analytic) with a Monte Carlo engine
(montecarlo) whose drops are reproducible bit for bit, and a harness that
turns either into CSV/JSON artifacts and regenerates the published
reference curves.
"""

from .analytic import (
    DegenerateCdfError,
    QuadratureError,
    QuadratureSpec,
    adaptive_simpson,
    cell_edge_rate,
    fd_dl_coverage,
    fd_ul_coverage,
    hd_dl_coverage,
    mean_inverse_sinr_dl,
    mean_inverse_sinr_ul,
    mean_rate,
    rate_cdf,
    same_cell_factor_closed,
    same_cell_factor_oracle,
    zeta_term,
)
from .geometry import EmptyWindowError, NetworkRealization, sample_network
from .harness import (
    ComparisonReport,
    ConfigError,
    RunConfig,
    compare_files,
    load_reference,
    load_reference_table,
    parse_config,
    read_curve_csv,
    read_manifest,
    reproduce,
    run_from_manifest,
    write_curve_csv,
)
from .montecarlo import (
    CoverageCurve,
    MomentReport,
    RateProfile,
    estimate_coverage,
    estimate_inverse_sinr,
    estimate_rate_stats,
    sample_sinr,
)
from .radio import (
    DegenerateGeometryError,
    downlink_sinr,
    uplink_power,
    uplink_sinr,
)
from .scenario import (
    PowerUnit,
    PowerUnitConvention,
    ScenarioParams,
    dbm_to_linear,
    from_inter_bs_distance,
    linear_to_dbm,
)

__version__ = "0.1.0"

__all__ = [
    "ComparisonReport",
    "ConfigError",
    "CoverageCurve",
    "DegenerateCdfError",
    "DegenerateGeometryError",
    "EmptyWindowError",
    "MomentReport",
    "NetworkRealization",
    "PowerUnit",
    "PowerUnitConvention",
    "QuadratureError",
    "QuadratureSpec",
    "RateProfile",
    "RunConfig",
    "ScenarioParams",
    "adaptive_simpson",
    "cell_edge_rate",
    "compare_files",
    "dbm_to_linear",
    "downlink_sinr",
    "estimate_coverage",
    "estimate_inverse_sinr",
    "estimate_rate_stats",
    "fd_dl_coverage",
    "fd_ul_coverage",
    "from_inter_bs_distance",
    "hd_dl_coverage",
    "linear_to_dbm",
    "load_reference",
    "load_reference_table",
    "mean_inverse_sinr_dl",
    "mean_inverse_sinr_ul",
    "mean_rate",
    "parse_config",
    "rate_cdf",
    "read_curve_csv",
    "read_manifest",
    "reproduce",
    "run_from_manifest",
    "same_cell_factor_closed",
    "same_cell_factor_oracle",
    "sample_network",
    "sample_sinr",
    "uplink_power",
    "uplink_sinr",
    "write_curve_csv",
    "zeta_term",
]
