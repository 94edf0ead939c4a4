"""Scenario parameters and power unit handling.

All downstream math works on plain linear power values.  The unit
convention only matters when converting dBm inputs: published curves for
the mean inverse SINR are only reproduced when the power control target
P_0 is converted to watts while the downlink power P_d stays in
milliwatts, so the convention is recorded per parameter and carried in
output manifests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class PowerUnit(str, Enum):
    """Carrier unit for a power given in dBm."""

    MILLIWATT = "milliwatt"
    WATT = "watt"


def dbm_to_linear(value_dbm, unit=PowerUnit.MILLIWATT):
    """Convert a dBm value to a linear power in the requested unit.

    dBm is referenced to 1 mW, so the milliwatt convention gives
    10**(x/10) and the watt convention divides by a further 1000.
    """
    lin = 10.0 ** (value_dbm / 10.0)
    if unit == PowerUnit.WATT:
        lin *= 1e-3
    return lin


def linear_to_dbm(value, unit=PowerUnit.MILLIWATT):
    """Inverse of dbm_to_linear; value must be positive."""
    if value <= 0.0:
        raise ValueError(f"power must be positive to express in dBm, got {value}")
    if unit == PowerUnit.WATT:
        value = value * 1e3
    return 10.0 * math.log10(value)


def db10(ratio):
    """Express a positive linear ratio in dB."""
    if ratio <= 0.0:
        raise ValueError(f"ratio must be positive to express in dB, got {ratio}")
    return 10.0 * math.log10(ratio)


@dataclass(frozen=True)
class PowerUnitConvention:
    """Units used when the scenario powers were converted from dBm."""

    p_0: PowerUnit = PowerUnit.MILLIWATT
    p_d: PowerUnit = PowerUnit.MILLIWATT


@dataclass(frozen=True)
class ScenarioParams:
    """Network and radio parameters, powers in linear units.

    Cells are modelled as disks of radius r_c around each base station;
    each cell holds one downlink user and one uplink user, both uniform
    in the disk.  The uplink user transmits min(p_max_u, p_0 * r**(alpha
    * epsilon)) at distance r from its base station.
    """

    lambda_bs: float                     # base station density, 1/m^2
    r_c: float                           # cell radius, m
    p_d: float                           # downlink transmit power, linear
    p_0: float                           # uplink power control target, linear
    p_max_u: float = dbm_to_linear(23.0)  # uplink power cap, linear
    epsilon: float = 0.2                 # fractional power control exponent
    alpha: float = 4.0                   # path loss exponent, must exceed 2
    sigma2: float = 0.0                  # noise power, linear
    window_len: float = 10000.0          # side of the square simulation window, m
    units: PowerUnitConvention = field(default_factory=PowerUnitConvention)

    def __post_init__(self):
        if not self.lambda_bs > 0.0:
            raise ValueError(f"lambda_bs must be positive, got {self.lambda_bs}")
        if not self.r_c > 0.0:
            raise ValueError(f"r_c must be positive, got {self.r_c}")
        if not self.p_d > 0.0:
            raise ValueError(f"p_d must be positive, got {self.p_d}")
        if self.p_0 < 0.0:
            raise ValueError(f"p_0 must be non-negative, got {self.p_0}")
        if not self.p_max_u > 0.0:
            raise ValueError(f"p_max_u must be positive, got {self.p_max_u}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not self.alpha > 2.0:
            raise ValueError(f"alpha must exceed 2, got {self.alpha}")
        if self.sigma2 < 0.0:
            raise ValueError(f"sigma2 must be non-negative, got {self.sigma2}")
        if not self.window_len > 0.0:
            raise ValueError(f"window_len must be positive, got {self.window_len}")


def from_inter_bs_distance(d_bs, p_d, p_0, **kwargs):
    """Build ScenarioParams from an average inter site distance.

    The cell radius is half the inter site distance and the density is
    matched so that the mean number of points per disk is one:
    lambda_bs = 1 / (pi * r_c**2).
    """
    if not d_bs > 0.0:
        raise ValueError(f"d_bs must be positive, got {d_bs}")
    r_c = 0.5 * d_bs
    lambda_bs = 1.0 / (math.pi * r_c**2)
    return ScenarioParams(lambda_bs=lambda_bs, r_c=r_c, p_d=p_d, p_0=p_0, **kwargs)
