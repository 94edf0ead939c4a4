"""Spatial sampling: base station process, per-cell users, tagged cell.

Base stations form a Poisson point process in a square window centered
at the origin.  Every base station gets one downlink and one uplink user
drawn uniformly in a disk of radius r_c around it (cluster disks may
overlap; users are attached to their own base station regardless).  The
tagged cell is the one closest to the window center.

All draws follow a fixed order (count, base station coordinates,
downlink radii/angles, uplink radii/angles) so a given generator state
always yields the same realization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class EmptyWindowError(RuntimeError):
    """Raised when a sampled window contains no base station."""


def as_generator(seed):
    """Return a numpy Generator from a seed, sequence of seeds or Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class NetworkRealization:
    """One sampled network: n cells, one DL and one UL user each."""

    bs_positions: np.ndarray   # (n, 2) base station coordinates, m
    dl_user: np.ndarray        # (n, 2) downlink user per cell
    ul_user: np.ndarray        # (n, 2) uplink user per cell
    tagged_cell: int           # index of the cell under study

    @property
    def n_cells(self):
        return self.bs_positions.shape[0]


def sample_ppp(lambda_bs, window_len, rng):
    """Sample a homogeneous PPP in a centered square window.

    Returns an (n, 2) array; n is Poisson with mean lambda_bs *
    window_len**2 and may be zero.
    """
    if not lambda_bs > 0.0:
        raise ValueError(f"lambda_bs must be positive, got {lambda_bs}")
    if not window_len > 0.0:
        raise ValueError(f"window_len must be positive, got {window_len}")
    n = rng.poisson(lambda_bs * window_len**2)
    half = 0.5 * window_len
    return rng.uniform(-half, half, size=(int(n), 2))


def sample_users_in_disk(centers, r_c, rng):
    """Draw one uniform point in the disk of radius r_c around each center.

    Radii use the inverse CDF r = r_c * sqrt(u) so the points are
    uniform in area, then an independent uniform angle.
    """
    centers = np.asarray(centers, dtype=float)
    if not r_c > 0.0:
        raise ValueError(f"r_c must be positive, got {r_c}")
    n = centers.shape[0]
    radii = r_c * np.sqrt(rng.uniform(size=n))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    offsets = np.stack([radii * np.cos(theta), radii * np.sin(theta)], axis=1)
    return centers + offsets


def serving_distance_pdf(r, r_c):
    """Density of the serving distance for a user uniform in a disk.

    f(r) = 2 r / r_c**2 on [0, r_c] and zero outside.
    """
    if not r_c > 0.0:
        raise ValueError(f"r_c must be positive, got {r_c}")
    r = np.asarray(r, dtype=float)
    pdf = np.where((r >= 0.0) & (r <= r_c), 2.0 * r / r_c**2, 0.0)
    if pdf.ndim == 0:
        return float(pdf)
    return pdf


def pair_distance(r_d, r_u, gamma):
    """Distance between two points at radii r_d, r_u with angle gamma between them."""
    r_d = np.asarray(r_d, dtype=float)
    r_u = np.asarray(r_u, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    d2 = r_d**2 + r_u**2 - 2.0 * r_d * r_u * np.cos(gamma)
    # clip tiny negative round-off when r_d == r_u and gamma == 0
    d = np.sqrt(np.maximum(d2, 0.0))
    if d.ndim == 0:
        return float(d)
    return d


def sample_network(params, rng):
    """Sample one full network realization for the given scenario.

    Raises EmptyWindowError if the Poisson draw leaves the window empty
    (callers treat that as a degenerate drop and resample).
    """
    rng = as_generator(rng)
    bs = sample_ppp(params.lambda_bs, params.window_len, rng)
    if bs.shape[0] == 0:
        raise EmptyWindowError("sampled window contains no base station")
    dl = sample_users_in_disk(bs, params.r_c, rng)
    ul = sample_users_in_disk(bs, params.r_c, rng)
    tagged = int(np.argmin(np.einsum("ij,ij->i", bs, bs)))
    return NetworkRealization(bs_positions=bs, dl_user=dl, ul_user=ul, tagged_cell=tagged)
