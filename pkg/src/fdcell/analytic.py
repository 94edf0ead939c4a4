"""Analytic coverage, SINR moments and rate statistics.

Coverage expressions average a Rayleigh-fading Laplace functional over
the serving distance density 2r/r_c**2.  The full duplex downlink
carries an extra same-cell factor: the average over the uniform angle
gamma between the downlink user and the co-cell uplink user of

    T0 = 1 / (1 + P_u(r_u) * T * r_d**alpha / (P_d * d**alpha)),

with d the distance between the two users.  A closed form for that
average exists via a second order series in zeta; it is only accurate
while artanh's argument pi*sqrt(|zeta|/2) stays small, so routing
between the closed form and the direct gamma quadrature is controlled
by ZETA_TRUST_CUTOFF (calibrated so the two routes agree within 2%).

The uplink coverage and the mean inverse SINR bounds ignore the uplink
power cap; they apply when the cap does not bind inside a cell, i.e.
saturation_distance(params) >= r_c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class QuadratureError(RuntimeError):
    """Raised when an integral fails to reach the requested tolerance."""


class DegenerateCdfError(RuntimeError):
    """Raised when a rate CDF cannot be inverted at the requested quantile."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and depth limit for the numerical integrals."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_depth: int = 40

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.abs_tol > 0.0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be at least 1, got {self.max_depth}")


_DEFAULT_QUAD = QuadratureSpec()

# Largest artanh argument at which the closed same-cell factor is still
# trusted; beyond it the gamma quadrature takes over.  Calibrated against
# the quadrature on random parameter tuples (relative error grows like
# 0.35 * arg**2, so 0.2 keeps the routes within 2%).
ZETA_TRUST_CUTOFF = 0.2


# ---------------------------------------------------------------------------
# quadrature

def _simpson_step(f, a, m, b, fa, fm, fb, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol or depth <= 0:
        # Richardson extrapolation; report the unresolved remainder when
        # the depth budget ran out
        resid = 0.0 if abs(delta) <= 15.0 * tol else abs(delta) / 15.0
        return left + right + delta / 15.0, resid
    lv, lr = _simpson_step(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
    rv, rr = _simpson_step(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    return lv + rv, lr + rr


def adaptive_simpson(f, a, b, quad=None):
    """Adaptive Simpson integral of f over [a, b].

    Subdivides until the local Richardson error estimate meets the
    tolerance; raises QuadratureError if unresolved error above the
    requested tolerance remains at max_depth.
    """
    quad = quad or _DEFAULT_QUAD
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    if b < a:
        raise ValueError("integration bounds must satisfy a <= b")
    fa = f(a)
    fb = f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    tol = max(quad.abs_tol, quad.rel_tol * abs(whole))
    value, resid = _simpson_step(f, a, m, b, fa, fm, fb, whole, tol, quad.max_depth)
    allowed = max(quad.abs_tol, quad.rel_tol * abs(value))
    if not resid <= allowed:
        raise QuadratureError(
            f"integral did not converge: residual {resid:.3e} exceeds "
            f"tolerance {allowed:.3e} at depth {quad.max_depth}")
    return value


def _composite_simpson(y, h):
    # y holds values on a uniform grid with an even interval count
    return h / 3.0 * (y[..., 0] + y[..., -1]
                      + 4.0 * np.sum(y[..., 1:-1:2], axis=-1)
                      + 2.0 * np.sum(y[..., 2:-1:2], axis=-1))


def _interleave(y_old, y_mid):
    shape = y_old.shape[:-1] + (y_old.shape[-1] + y_mid.shape[-1],)
    out = np.empty(shape)
    out[..., 0::2] = y_old
    out[..., 1::2] = y_mid
    return out


def _doubling_budget(quad):
    return min(quad.max_depth, 12)


def _simpson_doubling(fvec, a, b, tol, max_doublings, n0=8):
    """Composite Simpson with grid doubling for a vectorized integrand.

    fvec maps a node array of shape (n,) to values of shape (..., n);
    returns the integral(s) once successive refinements change by at
    most tol, reusing all previously evaluated nodes.
    """
    x = np.linspace(a, b, n0 + 1)
    y = fvec(x)
    h = (b - a) / n0
    best = _composite_simpson(y, h)
    for _ in range(max_doublings):
        xm = 0.5 * (x[:-1] + x[1:])
        ym = fvec(xm)
        y = _interleave(y, ym)
        x = _interleave(x, xm)
        h *= 0.5
        new = _composite_simpson(y, h)
        err = float(np.max(np.abs(new - best)))
        best = new
        if err <= tol:
            return best
    raise QuadratureError(
        f"grid doubling did not converge to tolerance {tol:.3e}")


# ---------------------------------------------------------------------------
# same-cell factor (full duplex downlink)

@dataclass(frozen=True)
class ZetaTerm:
    """Series coefficient of the closed same-cell factor at one point."""

    zeta: float        # dimensionless, <= 0 for positive inputs
    artanh_arg: float  # pi * sqrt(|zeta| / 2)
    valid: bool        # closed form is real-evaluable (artanh_arg < 1)

    @property
    def trusted(self):
        """True where the closed form is accurate, not merely evaluable."""
        return self.valid and self.artanh_arg <= ZETA_TRUST_CUTOFF


def _closed_pair(T, r_d, r_u, params):
    """Vectorized closed factor and its artanh argument.

    No guards: callers mask r_u == 0, r_d == 0 and r_d == r_u (where the
    outputs are inf/nan by construction).  The factor approximates an
    average of values in (0, 1], so the series value is capped at 1;
    uncapped it overshoots sharply near the edge of its validity region.
    """
    a = params.alpha
    e = params.epsilon
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        w = (r_d - r_u) ** 2 * r_u ** (-2.0 * e) / r_d**2
        denom = (r_d - r_u) ** 2 * (params.p_d * w ** (0.5 * a) + params.p_0 * T)
        zeta = -a * params.p_0 * T * r_d * r_u / denom
        arg = np.pi * np.sqrt(0.5 * np.abs(zeta))
        at = np.arctanh(np.where(arg < 1.0, arg, np.nan))
        vals = (np.sqrt(2.0 * np.abs(zeta)) * at * params.p_d * r_d
                * r_u ** (2.0 * e - 1.0) * w ** (0.5 * (a + 2.0))
                / (np.pi * a * params.p_0 * T))
    return np.minimum(vals, 1.0), zeta, arg


def zeta_term(T, r_d, r_u, params):
    """Series coefficient and validity of the closed same-cell factor."""
    if not T > 0.0:
        raise ValueError(f"T must be positive, got {T}")
    if not r_d > 0.0:
        raise ValueError(f"r_d must be positive, got {r_d}")
    if r_u < 0.0:
        raise ValueError(f"r_u must be non-negative, got {r_u}")
    if params.p_0 == 0.0 or r_u == 0.0:
        return ZetaTerm(zeta=0.0, artanh_arg=0.0, valid=True)
    if r_u == r_d:
        return ZetaTerm(zeta=-math.inf, artanh_arg=math.inf, valid=False)
    _, zeta, arg = _closed_pair(T, np.float64(r_d), np.float64(r_u), params)
    return ZetaTerm(zeta=float(zeta), artanh_arg=float(arg), valid=bool(arg < 1.0))


def same_cell_factor_closed(T, r_d, r_u, params):
    """Closed form of the same-cell average; NaN marks the invalid region.

    Exact limits (no cross interference) return 1.0; the r_d == r_u
    singularity and the region where the artanh argument reaches 1
    return NaN so callers fall back to the quadrature oracle.
    """
    z = zeta_term(T, r_d, r_u, params)
    if z.zeta == 0.0:
        return 1.0
    if not z.valid:
        return math.nan
    vals, _, _ = _closed_pair(T, np.float64(r_d), np.float64(r_u), params)
    return float(vals)


def same_cell_factor_oracle(T, r_d, r_u, params, quad=None):
    """Direct angular average of T0, the pre-series reference.

    Integrates 1/(1 + B/d(gamma)**alpha) over gamma in [0, pi] (the
    integrand is even), splitting at the angle where d**alpha crosses B
    to help the adaptive rule.
    """
    quad = quad or _DEFAULT_QUAD
    if not T > 0.0:
        raise ValueError(f"T must be positive, got {T}")
    if r_d < 0.0 or r_u < 0.0:
        raise ValueError("radii must be non-negative")
    if params.p_0 == 0.0 or r_u == 0.0 or r_d == 0.0:
        return 1.0
    a = params.alpha
    b_coef = params.p_0 * r_u ** (a * params.epsilon) * T * r_d**a / params.p_d
    if b_coef == 0.0:
        return 1.0

    def f(gamma):
        d2 = r_d**2 + r_u**2 - 2.0 * r_d * r_u * math.cos(gamma)
        if d2 <= 0.0:
            return 0.0
        return 1.0 / (1.0 + b_coef * d2 ** (-0.5 * a))

    panels = [0.0, math.pi]
    d2_cross = b_coef ** (2.0 / a)
    lo = (r_d - r_u) ** 2
    hi = (r_d + r_u) ** 2
    if lo < d2_cross < hi:
        cos_g = (r_d**2 + r_u**2 - d2_cross) / (2.0 * r_d * r_u)
        panels.insert(1, math.acos(min(1.0, max(-1.0, cos_g))))
    total = 0.0
    for lo_g, hi_g in zip(panels[:-1], panels[1:]):
        total += adaptive_simpson(f, lo_g, hi_g, quad)
    return total / math.pi


_GAMMA_LADDER = (0.0, 1e-4, 1e-2, 1e-1, 1.0, math.pi)


def _oracle_vec(T, r_d, r_u, params, tol, max_doublings):
    """Gamma average of T0 for flat arrays r_d, r_u (no zero guards).

    The integrand turns over at an angle that varies per entry and can sit
    many decades below pi, so the range is pre-split on a logarithmic
    ladder; panel resolution then scales with the knee position and the
    batch shares every node.
    """
    a = params.alpha
    b_coef = (params.p_0 * r_u ** (a * params.epsilon) * T * r_d**a
              / params.p_d)[:, None]
    rd = r_d[:, None]
    ru = r_u[:, None]

    def fvec(gamma):
        d2 = rd**2 + ru**2 - 2.0 * rd * ru * np.cos(gamma[None, :])
        with np.errstate(divide="ignore", over="ignore"):
            out = 1.0 / (1.0 + b_coef * np.maximum(d2, 0.0) ** (-0.5 * a))
        return np.nan_to_num(out, nan=0.0)

    panel_tol = tol / 4.0
    total = 0.0
    for lo, hi in zip(_GAMMA_LADDER[:-1], _GAMMA_LADDER[1:]):
        total += _simpson_doubling(fvec, lo, hi, panel_tol, max_doublings)
    return total / math.pi


def _factor_vec(T, r_d, r_u, params, quad, route):
    """Same-cell factor on an r_u array for fixed r_d via one route.

    route is "closed" or "oracle" and applies to every entry: callers pick
    it per smooth panel, because mixing routes point by point would leave
    small jumps that grid doubling then chases without converging.  Closed
    entries that come back non-finite (panel edges sitting exactly on a
    validity boundary) fall back to the oracle individually.
    """
    r_u = np.asarray(r_u, dtype=float)
    out = np.ones_like(r_u)
    if params.p_0 == 0.0 or r_d == 0.0:
        return out
    rest = r_u > 0.0
    if not np.any(rest):
        return out
    ru = r_u[rest]
    need_oracle = np.ones(ru.shape, dtype=bool)
    vals = np.empty(ru.shape)
    if route == "closed":
        cvals, _, arg = _closed_pair(T, r_d, ru, params)
        closed_ok = np.isfinite(cvals) & (arg < 1.0)
        vals[closed_ok] = cvals[closed_ok]
        need_oracle = ~closed_ok
    if np.any(need_oracle):
        tol = max(quad.abs_tol, 0.1 * quad.rel_tol)
        vals[need_oracle] = _oracle_vec(
            T, np.full(int(np.sum(need_oracle)), r_d), ru[need_oracle],
            params, tol, _doubling_budget(quad))
    out[rest] = vals
    return out


# ---------------------------------------------------------------------------
# coverage

def _other_cell_coef(T, params):
    # exponent per squared serving distance from the other-cell Laplace
    # functional; for alpha=4 this is (pi^2/2) * lambda * sqrt(T)
    a = params.alpha
    return (2.0 * math.pi**2 * params.lambda_bs / a
            / math.sin(2.0 * math.pi / a) * T ** (2.0 / a))


def hd_dl_coverage(T, params, quad=None):
    """Downlink coverage with the uplink silent (half duplex baseline).

    Averages the noise and other-cell factors over the serving distance;
    the noise factor vanishes in the interference limited case sigma2=0.
    """
    quad = quad or _DEFAULT_QUAD
    if not T > 0.0:
        raise ValueError(f"T must be positive, got {T}")
    coef = _other_cell_coef(T, params)
    a_noise = T * params.sigma2 / params.p_d
    rc = params.r_c
    alpha = params.alpha

    def f(u):
        # substitution r = r_c * sqrt(u) absorbs the 2r/r_c**2 density
        r2 = rc * rc * u
        return math.exp(-a_noise * r2 ** (0.5 * alpha) - coef * r2)

    return adaptive_simpson(f, 0.0, 1.0, quad)


def fd_ul_coverage(T, params, quad=None):
    """Uplink coverage under full duplex with fractional power control.

    The exponent combines the noise term and the other-cell downlink
    field scaled by the power control; the uplink power cap is ignored
    (valid while saturation_distance >= r_c).
    """
    quad = quad or _DEFAULT_QUAD
    if not T > 0.0:
        raise ValueError(f"T must be positive, got {T}")
    if not params.p_0 > 0.0:
        raise ValueError("uplink coverage needs a positive power control target")
    a = params.alpha
    e = params.epsilon
    rc = params.r_c
    a_noise = T * params.sigma2 / params.p_0
    coef = (2.0 * math.pi**2 * params.lambda_bs / a / math.sin(2.0 * math.pi / a)
            * (T * params.p_d / params.p_0) ** (2.0 / a))

    def f(u):
        r = rc * math.sqrt(u)
        return math.exp(-a_noise * r ** (a * (1.0 - e))
                        - coef * r ** (2.0 * (1.0 - e)))

    return adaptive_simpson(f, 0.0, 1.0, quad)


def _arg_vec(T, r_d, u, params):
    """Trust argument on an array of inner-axis positions u = (r_u/r_c)**2."""
    u = np.asarray(u, dtype=float)
    ru = params.r_c * np.sqrt(u)
    arg = np.zeros_like(u)
    eq = ru == r_d
    arg[eq] = np.inf
    rest = (ru > 0.0) & ~eq
    if np.any(rest):
        _, _, a = _closed_pair(T, np.float64(r_d), ru[rest], params)
        arg[rest] = a
    return arg


def _trust_crossings(T, r_d, params):
    """Inner-axis points (in u = (r_u/r_c)**2) where the factor route flips.

    Two sources: a coarse scan for large-scale crossings, and a targeted
    predicate bisection for the flanks of the sliver around r_u = r_d,
    where the closed form always loses validity.  The sliver can be orders
    of magnitude narrower than the scan spacing, so it is hunted directly.
    Both bisections advance all intervals in one vectorized call per step.
    """
    def args_of(u):
        return _arg_vec(T, r_d, u, params)

    grid = np.linspace(0.0, 1.0, 65)
    sign = args_of(grid) - ZETA_TRUST_CUTOFF
    roots = list(grid[:-1][sign[:-1] == 0.0])
    change = sign[:-1] * sign[1:] < 0.0
    lo = grid[:-1][change].copy()
    hi = grid[1:][change].copy()
    slo = sign[:-1][change].copy()
    if lo.size:
        for _ in range(45):
            mid = 0.5 * (lo + hi)
            smid = args_of(mid) - ZETA_TRUST_CUTOFF
            down = slo * smid <= 0.0
            hi[down] = mid[down]
            lo[~down] = mid[~down]
            slo[~down] = smid[~down]
        roots.extend(0.5 * (lo + hi))

    # flanks of the distrusted sliver around r_u = r_d, bisected between
    # the nearest trusted scan point and u_rd itself
    u_rd = (r_d / params.r_c) ** 2
    trusted_grid = sign <= 0.0
    lo_list, hi_list, lo_trusted = [], [], []
    below = grid[(grid < u_rd) & trusted_grid]
    if below.size and u_rd > 0.0:
        lo_list.append(float(below.max()))
        hi_list.append(min(u_rd, 1.0))
        lo_trusted.append(True)
    above = grid[(grid > u_rd) & trusted_grid]
    if above.size and u_rd < 1.0:
        lo_list.append(max(u_rd, 0.0))
        hi_list.append(float(above.min()))
        lo_trusted.append(False)
    if lo_list:
        lo = np.array(lo_list)
        hi = np.array(hi_list)
        t_lo = np.array(lo_trusted)
        for _ in range(45):
            mid = 0.5 * (lo + hi)
            same = (args_of(mid) <= ZETA_TRUST_CUTOFF) == t_lo
            lo[same] = mid[same]
            hi[~same] = mid[~same]
        roots.extend(0.5 * (lo + hi))
    return [float(r) for r in roots]


def _panel_trusted(T, r_d, lo, hi, params):
    # probe the quarter points: the panel edges sit on route crossings, so
    # a uniformly trusted interior shows up on all three probes
    probes = lo + np.array([0.25, 0.5, 0.75]) * (hi - lo)
    args = _arg_vec(T, r_d, probes, params)
    return bool(np.all(args <= ZETA_TRUST_CUTOFF))


def _inner_same_cell(T, r_d, params, quad, use_closed):
    """Average of the same-cell factor over the uplink serving distance.

    The u axis splits at r_u = r_d and where the closed form stops being
    trusted, plus a pair of guard rings inside each gap flanking r_u = r_d
    (the factor dips sharply there on a width that varies by orders of
    magnitude).  Each panel then commits to a single evaluation route,
    keeping the integrand smooth for the doubling rule.
    """
    rc = params.r_c
    breaks = {0.0, 1.0}
    u_rd = (r_d / rc) ** 2
    if u_rd > 0.0:
        breaks.add(min(u_rd, 1.0))
        # crossings serve as segmentation hints for both routes: they track
        # where the factor changes character, not only where the closed
        # form takes over
        breaks.update(_trust_crossings(T, r_d, params))
        # guard rings at the scale on which the factor climbs back out of
        # its dip at r_u = r_d; the half width in u follows from the
        # distance at which B / d**alpha drops to order one
        q = params.p_0 * r_d ** (params.alpha * params.epsilon) * T / params.p_d
        du = 2.0 * u_rd * q ** (1.0 / params.alpha)
        for ring in (du, 4.0 * du, 16.0 * du):
            breaks.add(u_rd - ring)
            breaks.add(u_rd + ring)
    edges = sorted(b for b in breaks if 0.0 <= b <= 1.0)
    tol_in = max(quad.abs_tol, 0.5 * quad.rel_tol)
    budget = _doubling_budget(quad)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        width = hi - lo
        if width <= 1e-14:
            continue
        if use_closed and _panel_trusted(T, r_d, lo, hi, params):
            route = "closed"
        else:
            route = "oracle"

        def fvec(u_nodes):
            return _factor_vec(T, r_d, rc * np.sqrt(u_nodes), params, quad,
                               route)

        total += _simpson_doubling(fvec, lo, hi, tol_in * max(width, 0.05),
                                   budget)
    return total


def fd_dl_coverage(T, params, quad=None, factor="auto"):
    """Downlink coverage under full duplex.

    Double average over the serving distances of the downlink user and
    the co-cell uplink user of noise, other-cell and same-cell factors.
    factor="auto" evaluates the same-cell average by the closed form
    wherever it is trusted and silently falls back to the gamma
    quadrature elsewhere; factor="oracle" forces the quadrature
    everywhere (the reference route).
    """
    if factor not in ("auto", "oracle"):
        raise ValueError(f"factor must be 'auto' or 'oracle', got {factor!r}")
    quad = quad or _DEFAULT_QUAD
    if not T > 0.0:
        raise ValueError(f"T must be positive, got {T}")
    if params.p_0 == 0.0:
        # no uplink transmission: exact half duplex limit
        return hd_dl_coverage(T, params, quad)
    use_closed = factor == "auto"
    coef = _other_cell_coef(T, params)
    a_noise = T * params.sigma2 / params.p_d
    rc = params.r_c
    alpha = params.alpha
    tol = max(quad.abs_tol, quad.rel_tol)
    budget = _doubling_budget(quad)

    def outer(u_nodes):
        out = np.empty(u_nodes.shape)
        for i, u in enumerate(u_nodes):
            r_d = rc * math.sqrt(u)
            env = math.exp(-a_noise * r_d**alpha - coef * r_d * r_d)
            if env <= 0.01 * tol:
                # same-cell average is in (0, 1]; bounding it by 1 keeps
                # the error below env, already negligible here
                out[i] = env
            else:
                out[i] = env * _inner_same_cell(T, r_d, params, quad, use_closed)
        return out

    # at very large thresholds the envelope collapses onto u = 0; clip the
    # range so the grid sees the spike instead of straddling it (the cut
    # tail is bounded by exp(-40), far below any tolerance in use)
    c_env = coef * rc * rc
    u_hi = min(1.0, 40.0 / c_env) if c_env > 40.0 else 1.0
    return float(_simpson_doubling(outer, 0.0, u_hi, tol, budget, n0=16))


# ---------------------------------------------------------------------------
# mean inverse SINR bounds

def mean_inverse_sinr_ul(params):
    """Mean inverse uplink SINR, closed form (linear; use db10 for dB).

    Needs alpha * (1 - epsilon) + 2 > 0 and a positive power control
    target; alpha > 2 is enforced by the scenario.
    """
    a = params.alpha
    e = params.epsilon
    if not params.p_0 > 0.0:
        raise ValueError("mean inverse uplink SINR needs p_0 > 0")
    if not a * (1.0 - e) + 2.0 > 0.0:
        raise ValueError("epsilon too large: alpha*(1-epsilon)+2 must be positive")
    moment = 2.0 * params.r_c ** (a * (1.0 - e)) / (a * (1.0 - e) + 2.0)
    field = params.sigma2 + (2.0 * math.pi * params.lambda_bs * params.p_d
                             / ((a - 1.0) * (a - 2.0)))
    return moment * field / params.p_0


def mean_inverse_sinr_dl(params):
    """Mean inverse downlink SINR, closed form (linear; use db10 for dB)."""
    a = params.alpha
    e = params.epsilon
    rc = params.r_c
    base = (2.0 * rc**a / (a + 2.0)) * (
        params.sigma2 / params.p_d
        + 2.0 * math.pi * params.lambda_bs / ((a - 1.0) * (a - 2.0)))
    same = (params.p_0 * rc ** (a * e + 2.0) * (2.0 * a - 1.0)
            / (params.p_d * (a - 1.0) * (a * e + 2.0)))
    return base + same


# ---------------------------------------------------------------------------
# rate statistics

def _bandwidth_split(duplex):
    if duplex == "fd":
        return 2.0
    if duplex == "hd":
        return 1.0
    raise ValueError(f"duplex must be 'fd' or 'hd', got {duplex!r}")


def rate_cdf(coverage_fn, c, duplex="fd"):
    """CDF of the rate in bps/Hz implied by a coverage function."""
    k = _bandwidth_split(duplex)
    if c < 0.0:
        raise ValueError(f"rate must be non-negative, got {c}")
    if c == 0.0:
        return 0.0
    # clamp both ends of the exponent: past ~2^1000 any coverage function
    # is at its limit and the bare power would overflow
    t_lin = 2.0 ** min(c / k, 1000.0) - 1.0
    if t_lin <= 0.0:
        # c so small that the threshold underflows; CDF limit at 0+ is 0
        return 0.0
    return 1.0 - coverage_fn(t_lin)


def mean_rate(coverage_fn, duplex="fd", quad=None):
    """Mean rate in bps/Hz from a coverage function.

    Integrates the rate CCDF via the substitution T = exp(v): analytic
    strips handle both ends (coverage -> 1 at small thresholds, a fitted
    geometric tail once coverage drops below 1e-7) and adaptive Simpson
    panels cover the body.
    """
    quad = quad or _DEFAULT_QUAD
    k = _bandwidth_split(duplex)

    def pv(v):
        return coverage_fn(math.exp(v))

    # upper end: step out until the tail is negligible or clearly absent
    v_hi = 0.0
    p_hi = pv(v_hi)
    steps = 0
    while p_hi > 1e-7:
        v_hi += 5.0
        steps += 1
        if steps > 80:
            raise QuadratureError(
                "coverage tail does not decay; mean rate integral diverges")
        p_hi = pv(v_hi)
    if p_hi > 0.0:
        p_ref = pv(v_hi - 2.0)
        decay = max(math.log(max(p_ref, p_hi) / p_hi) / 2.0, 0.05)
        tail = p_hi / decay
    else:
        tail = 0.0

    # lower end: analytic strip where coverage is indistinguishable from 1
    v_lo = 0.0
    p_lo = pv(v_lo)
    steps = 0
    while ((1.0 - p_lo) > 0.5 * quad.rel_tol
           and (1.0 - p_lo) * math.log1p(math.exp(v_lo)) > 0.5 * quad.abs_tol):
        v_lo -= 4.0
        steps += 1
        if steps > 200:
            raise QuadratureError("coverage does not approach 1 at small thresholds")
        p_lo = pv(v_lo)
    head = math.log1p(math.exp(v_lo)) * 0.5 * (1.0 + p_lo)

    def integrand(v):
        ev = math.exp(v)
        return pv(v) * ev / (1.0 + ev)

    edges = [v_lo]
    while edges[-1] < v_hi:
        edges.append(min(edges[-1] + 4.0, v_hi))
    f_edges = [integrand(v) for v in edges]
    rough = sum(0.5 * (f_edges[i] + f_edges[i + 1]) * (edges[i + 1] - edges[i])
                for i in range(len(edges) - 1))
    scale = head + rough + tail
    n_panels = max(len(edges) - 1, 1)
    panel_quad = QuadratureSpec(
        rel_tol=quad.rel_tol,
        abs_tol=max(quad.abs_tol, quad.rel_tol * scale) / n_panels,
        max_depth=quad.max_depth)
    body = sum(adaptive_simpson(integrand, lo, hi, panel_quad)
               for lo, hi in zip(edges[:-1], edges[1:]))

    total = head + body + tail
    # extend the range while the fitted tail still matters
    while tail > 0.0 and tail > 0.5 * max(quad.abs_tol, quad.rel_tol * total):
        lo = v_hi
        v_hi += 5.0
        if v_hi > 600.0:
            raise QuadratureError("mean rate tail fails to converge")
        p_prev, p_hi = p_hi, pv(v_hi)
        body += adaptive_simpson(integrand, lo, v_hi, panel_quad)
        if p_hi > 0.0:
            decay = max(math.log(max(p_prev, p_hi) / p_hi) / 5.0, 0.05)
            tail = p_hi / decay
        else:
            tail = 0.0
        total = head + body + tail
    return k / math.log(2.0) * total


def cell_edge_rate(coverage_fn, duplex="fd", quantile=0.05, quad=None):
    """Rate at the given CDF quantile (default the 5% cell edge point).

    Brackets then bisects the rate CDF to 1e-6 relative; raises
    DegenerateCdfError when the CDF starts above the quantile or jumps
    across it.
    """
    if not 0.0 < quantile < 1.0:
        raise ValueError(f"quantile must lie in (0, 1), got {quantile}")

    def cdf(c):
        return rate_cdf(coverage_fn, c, duplex)

    probe = 1e-15
    if cdf(probe) > quantile:
        raise DegenerateCdfError(
            f"rate CDF already exceeds {quantile} at rate {probe}; "
            "cell edge rate is zero")
    c_lo = 0.0
    c_hi = 0.125
    steps = 0
    while cdf(c_hi) < quantile:
        c_lo = c_hi
        c_hi *= 2.0
        steps += 1
        if steps > 80:
            raise DegenerateCdfError(
                f"rate CDF never reaches {quantile}; no finite edge rate")
    while (c_hi - c_lo) > 1e-6 * c_hi:
        mid = 0.5 * (c_lo + c_hi)
        if cdf(mid) < quantile:
            c_lo = mid
        else:
            c_hi = mid
    c_star = 0.5 * (c_lo + c_hi)
    if abs(cdf(c_star) - quantile) > 0.02:
        raise DegenerateCdfError(
            f"rate CDF jumps across the {quantile} point near rate {c_star:.6g}")
    return c_star
