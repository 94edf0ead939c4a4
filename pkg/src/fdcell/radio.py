"""Link level pieces: path loss, fading, uplink power control, SINR.

Budgets are assembled for the tagged cell of a sampled realization.
Downlink reception sees, besides the serving signal, the co-cell uplink
user (the full duplex cross link), every other cell's downlink and every
other cell's uplink.  Uplink reception at the tagged base station sees
other cells' uplink users in both duplex modes and, in full duplex,
other base stations' downlink as well; residual self interference from
the own downlink chain is assumed perfectly cancelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DegenerateGeometryError(ValueError):
    """Raised when a link distance falls below the allowed minimum."""


def path_loss(x, alpha, regularized=False):
    """Power attenuation over distance x.

    The plain law x**(-alpha) diverges at zero and raises there; the
    regularized variant (1 + x)**(-alpha) stays bounded and is used by
    the inverse SINR estimators on interference paths.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("distance must be non-negative")
    if regularized:
        out = (1.0 + x) ** (-alpha)
    else:
        if np.any(x == 0.0):
            raise ValueError("plain path loss is undefined at zero distance")
        out = x ** (-alpha)
    if out.ndim == 0:
        return float(out)
    return out


def draw_fading(rng, size=None):
    """Rayleigh power fading: unit mean exponential draws."""
    out = rng.exponential(1.0, size=size)
    if size is None:
        return float(out)
    return out


def uplink_power(r, params):
    """Transmit power of an uplink user at serving distance r.

    Fractional power control min(p_max_u, p_0 * r**(alpha * epsilon)),
    vectorized over r.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise ValueError("serving distance must be non-negative")
    out = np.minimum(params.p_max_u, params.p_0 * r ** (params.alpha * params.epsilon))
    if out.ndim == 0:
        return float(out)
    return out


def saturation_distance(params):
    """Serving distance beyond which the uplink power cap binds.

    Returns inf when the cap never binds (epsilon == 0 with p_0 below
    the cap, or p_0 == 0).
    """
    if params.p_0 == 0.0:
        return math.inf
    if params.epsilon == 0.0:
        return math.inf if params.p_0 <= params.p_max_u else 0.0
    return (params.p_max_u / params.p_0) ** (1.0 / (params.alpha * params.epsilon))


@dataclass(frozen=True)
class FadingDraws:
    """Per-drop fading for the tagged link, one entry per cell.

    Draws happen in a fixed order (desired, other_dl, same_cell,
    other_ul) so half and full duplex evaluations of one drop share the
    exact same channel; entries for the tagged cell inside the other_*
    arrays are unused.
    """

    desired: float          # serving link
    other_dl: np.ndarray    # (n,) base station -> receiver links
    same_cell: float        # co-cell uplink user -> downlink user link
    other_ul: np.ndarray    # (n,) uplink user -> receiver links


def draw_link_fading(n_cells, rng):
    """Draw a full FadingDraws block for a realization with n_cells cells."""
    desired = draw_fading(rng)
    other_dl = draw_fading(rng, size=n_cells)
    same_cell = draw_fading(rng)
    other_ul = draw_fading(rng, size=n_cells)
    return FadingDraws(desired=desired, other_dl=other_dl,
                       same_cell=same_cell, other_ul=other_ul)


@dataclass(frozen=True)
class LinkBudget:
    """Received power bookkeeping for one drop of one link."""

    signal: float
    same_cell_cross_interference: float
    other_cell_dl: float
    other_cell_ul: float
    noise: float

    @property
    def total_interference(self):
        return (self.same_cell_cross_interference
                + self.other_cell_dl + self.other_cell_ul)

    @property
    def sinr(self):
        denom = self.noise + self.total_interference
        if denom == 0.0:
            # noise free drop with no interferer in the window
            return math.inf
        return self.signal / denom


def _distances(points, rx):
    delta = points - rx
    return np.hypot(delta[:, 0], delta[:, 1])


def _check_min(dists, min_distance):
    if np.any(dists <= 0.0) or np.any(dists < min_distance):
        raise DegenerateGeometryError(
            f"link distance below minimum {min_distance}")


def downlink_budget(realization, fading, params, duplex="fd", min_distance=0.0):
    """Assemble the tagged downlink user's budget for one drop."""
    if duplex not in ("fd", "hd"):
        raise ValueError(f"duplex must be 'fd' or 'hd', got {duplex!r}")
    t = realization.tagged_cell
    rx = realization.dl_user[t]
    d_bs = _distances(realization.bs_positions, rx)
    others = np.arange(realization.n_cells) != t
    _check_min(d_bs, min_distance)
    signal = params.p_d * fading.desired * d_bs[t] ** (-params.alpha)
    other_dl = params.p_d * float(
        np.sum(fading.other_dl[others] * d_bs[others] ** (-params.alpha)))
    same_cell = 0.0
    other_ul = 0.0
    if duplex == "fd":
        # serving distances of every uplink user to its own base station
        serving = np.hypot(*(realization.ul_user - realization.bs_positions).T)
        p_u = uplink_power(serving, params)
        d_ul = _distances(realization.ul_user, rx)
        _check_min(d_ul, min_distance)
        same_cell = p_u[t] * fading.same_cell * d_ul[t] ** (-params.alpha)
        other_ul = float(
            np.sum(p_u[others] * fading.other_ul[others]
                   * d_ul[others] ** (-params.alpha)))
    return LinkBudget(signal=signal,
                      same_cell_cross_interference=same_cell,
                      other_cell_dl=other_dl,
                      other_cell_ul=other_ul,
                      noise=params.sigma2)


def uplink_budget(realization, fading, params, duplex="fd", min_distance=0.0):
    """Assemble the tagged base station's uplink budget for one drop."""
    if duplex not in ("fd", "hd"):
        raise ValueError(f"duplex must be 'fd' or 'hd', got {duplex!r}")
    t = realization.tagged_cell
    rx = realization.bs_positions[t]
    others = np.arange(realization.n_cells) != t
    serving = np.hypot(*(realization.ul_user - realization.bs_positions).T)
    p_u = uplink_power(serving, params)
    d_ul = _distances(realization.ul_user, rx)
    _check_min(d_ul, min_distance)
    signal = p_u[t] * fading.desired * d_ul[t] ** (-params.alpha)
    other_ul = float(
        np.sum(p_u[others] * fading.other_ul[others]
               * d_ul[others] ** (-params.alpha)))
    other_dl = 0.0
    if duplex == "fd":
        d_bs = _distances(realization.bs_positions[others], rx)
        _check_min(d_bs, min_distance)
        other_dl = params.p_d * float(
            np.sum(fading.other_dl[others] * d_bs ** (-params.alpha)))
    return LinkBudget(signal=signal,
                      same_cell_cross_interference=0.0,
                      other_cell_dl=other_dl,
                      other_cell_ul=other_ul,
                      noise=params.sigma2)


def downlink_sinr(realization, fading, params, duplex="fd", min_distance=0.0):
    """SINR of the tagged downlink user for one drop."""
    return downlink_budget(realization, fading, params, duplex, min_distance).sinr


def uplink_sinr(realization, fading, params, duplex="fd", min_distance=0.0):
    """SINR of the tagged uplink at its base station for one drop."""
    return uplink_budget(realization, fading, params, duplex, min_distance).sinr
