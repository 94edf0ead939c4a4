"""Analytic coverage, bounds and rate statistics against independent oracles.

Closed forms are checked three ways: special cases with pencil-and-paper
values, independent numerical routes through scipy (a dependency of the
test suite only), and internal consistency between the series route and
the quadrature route of the same quantity.
"""

import math

import numpy as np
import pytest
from scipy import integrate, special

from fdcell.analytic import (
    DegenerateCdfError,
    QuadratureError,
    QuadratureSpec,
    ZETA_TRUST_CUTOFF,
    _other_cell_coef,
    _simpson_doubling,
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
from fdcell.scenario import ScenarioParams, dbm_to_linear, from_inter_bs_distance

LOOSE = QuadratureSpec(rel_tol=1e-5, abs_tol=1e-8, max_depth=40)


def make_params(**overrides):
    kwargs = dict(lambda_bs=1.0 / (math.pi * 200.0**2), r_c=200.0,
                  p_d=dbm_to_linear(40.0), p_0=dbm_to_linear(-64.0),
                  epsilon=0.2)
    kwargs.update(overrides)
    return ScenarioParams(**kwargs)


# ---------------------------------------------------------------------------
# quadrature scaffolding

def test_adaptive_simpson_exact_on_cubics():
    # Simpson's rule integrates cubics exactly; no refinement error at all
    val = adaptive_simpson(lambda x: x**3 - 2.0 * x + 1.0, -1.0, 2.0)
    assert val == pytest.approx(15.0 / 4.0 - 3.0 + 3.0, rel=1e-14)


def test_adaptive_simpson_known_integrals():
    assert adaptive_simpson(math.sin, 0.0, math.pi) == pytest.approx(2.0)
    assert adaptive_simpson(math.exp, 0.0, 1.0) == pytest.approx(math.e - 1.0)
    assert adaptive_simpson(math.sin, 1.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        adaptive_simpson(math.sin, 1.0, 0.0)


def test_adaptive_simpson_raises_when_depth_exhausted():
    spiky = lambda x: 1.0 / math.sqrt(abs(x - 0.5) + 1e-14)
    with pytest.raises(QuadratureError):
        adaptive_simpson(spiky, 0.0, 1.0, QuadratureSpec(
            rel_tol=1e-12, abs_tol=1e-15, max_depth=4))


def test_simpson_doubling_matches_adaptive():
    fvec = lambda x: np.exp(-x) * np.cos(3.0 * x)
    want = adaptive_simpson(lambda x: math.exp(-x) * math.cos(3.0 * x),
                            0.0, 2.0)
    got = _simpson_doubling(fvec, 0.0, 2.0, 1e-10, 12)
    assert got == pytest.approx(want, abs=1e-9)


def test_simpson_doubling_raises_without_convergence():
    fvec = lambda x: np.sin(1.0 / (x + 1e-9))
    with pytest.raises(QuadratureError):
        _simpson_doubling(fvec, 0.0, 1.0, 1e-12, 3)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=-1.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_depth=0)


# ---------------------------------------------------------------------------
# half duplex downlink

def test_other_cell_coef_alpha4_identity():
    """For alpha = 4 the csc form collapses to (pi^2 / 2) lambda sqrt(T)."""
    for T in (0.01, 0.3, 1.0, 42.0, 1e4):
        for r_c in (100.0, 200.0, 350.0):
            p = make_params(r_c=r_c, lambda_bs=1.0 / (math.pi * r_c**2))
            want = 0.5 * math.pi**2 * p.lambda_bs * math.sqrt(T)
            assert _other_cell_coef(T, p) == pytest.approx(want, rel=1e-12)


def test_hd_dl_closed_form_alpha4():
    """sigma2 = 0, alpha = 4: the serving average is (1 - e^-c) / c."""
    for T in (1e-4, 0.05, 1.0, 20.0, 1e4):
        for r_c, lam in ((200.0, 1.0 / (math.pi * 200.0**2)),
                         (350.0, 2e-6)):
            p = make_params(r_c=r_c, lambda_bs=lam)
            c = _other_cell_coef(T, p) * r_c**2
            want = -math.expm1(-c) / c
            assert hd_dl_coverage(T, p) == pytest.approx(want, rel=1e-7)


def test_hd_dl_with_noise_against_scipy():
    p = make_params(sigma2=1e-9, alpha=3.5)
    for T in (0.1, 1.0, 10.0):
        coef = _other_cell_coef(T, p)
        a_noise = T * p.sigma2 / p.p_d

        def integrand(r):
            return (2.0 * r / p.r_c**2
                    * math.exp(-a_noise * r**p.alpha - coef * r * r))

        want, err = integrate.quad(integrand, 0.0, p.r_c, limit=200)
        assert err < 1e-10
        assert hd_dl_coverage(T, p) == pytest.approx(want, abs=1e-8)


def test_hd_dl_basic_shape():
    p = make_params()
    grid = [10.0 ** (t / 10.0) for t in range(-40, 41, 5)]
    vals = [hd_dl_coverage(T, p) for T in grid]
    assert all(0.0 < v <= 1.0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        hd_dl_coverage(0.0, p)


# ---------------------------------------------------------------------------
# full duplex uplink

def test_fd_ul_against_scipy_serving_average():
    for eps, p_d_dbm in ((0.2, 40.0), (0.8, 23.0)):
        p = make_params(epsilon=eps, p_d=dbm_to_linear(p_d_dbm),
                        sigma2=1e-12)
        a = p.alpha
        for T in (0.01, 1.0, 100.0):
            coef = (2.0 * math.pi**2 * p.lambda_bs / a
                    / math.sin(2.0 * math.pi / a)
                    * (T * p.p_d / p.p_0) ** (2.0 / a))

            def integrand(r):
                return (2.0 * r / p.r_c**2 * math.exp(
                    -T * p.sigma2 / p.p_0 * r ** (a * (1.0 - eps))
                    - coef * r ** (2.0 * (1.0 - eps))))

            want, err = integrate.quad(integrand, 0.0, p.r_c, limit=200,
                                       epsabs=1e-12, epsrel=1e-10)
            assert err < 1e-9
            assert fd_ul_coverage(T, p) == pytest.approx(want, abs=1e-7)


def test_fd_ul_requires_power_control():
    with pytest.raises(ValueError):
        fd_ul_coverage(1.0, make_params(p_0=0.0))
    with pytest.raises(ValueError):
        fd_ul_coverage(-1.0, make_params())


def test_fd_ul_monotone_in_threshold():
    p = make_params(epsilon=0.8)
    vals = [fd_ul_coverage(10.0 ** (t / 10.0), p) for t in range(-40, 41, 5)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert all(0.0 < v <= 1.0 for v in vals)


# ---------------------------------------------------------------------------
# same-cell factor routes

def test_oracle_factor_limits():
    p = make_params()
    assert same_cell_factor_oracle(1.0, 50.0, 0.0, p) == 1.0
    assert same_cell_factor_oracle(1.0, 0.0, 50.0, p) == 1.0
    assert same_cell_factor_oracle(1.0, 50.0, 60.0, make_params(p_0=0.0)) == 1.0


def test_oracle_factor_against_scipy():
    p = make_params(epsilon=0.5)
    rng = np.random.default_rng(23)
    for _ in range(25):
        T = 10.0 ** rng.uniform(-1.5, 1.5)
        r_d = rng.uniform(5.0, p.r_c)
        r_u = rng.uniform(5.0, p.r_c)
        b = p.p_0 * r_u ** (p.alpha * p.epsilon) * T * r_d**p.alpha / p.p_d

        def integrand(g):
            d2 = r_d**2 + r_u**2 - 2.0 * r_d * r_u * math.cos(g)
            return 1.0 / (1.0 + b * d2 ** (-0.5 * p.alpha))

        want, err = integrate.quad(integrand, 0.0, math.pi, limit=400)
        assert err < 1e-7
        got = same_cell_factor_oracle(T, r_d, r_u, p)
        assert got == pytest.approx(want / math.pi, abs=1e-6)


def test_closed_factor_matches_oracle_where_trusted():
    rng = np.random.default_rng(61)
    p = make_params(epsilon=0.5)
    checked = 0
    while checked < 150:
        T = 10.0 ** rng.uniform(-2.0, 2.0)
        r_d = rng.uniform(1.0, p.r_c)
        r_u = rng.uniform(1.0, p.r_c)
        if not zeta_term(T, r_d, r_u, p).trusted:
            continue
        c = same_cell_factor_closed(T, r_d, r_u, p)
        o = same_cell_factor_oracle(T, r_d, r_u, p)
        assert abs(c - o) / o < 0.02, (T, r_d, r_u)
        checked += 1


def test_closed_factor_capped_at_one():
    # near the validity edge the raw series overshoots; the exported
    # value must stay inside the factor's true range (0, 1]
    p = make_params(epsilon=0.2)
    rng = np.random.default_rng(3)
    for _ in range(300):
        T = 10.0 ** rng.uniform(-2.0, 3.0)
        r_d = rng.uniform(1.0, p.r_c)
        r_u = rng.uniform(1.0, p.r_c)
        c = same_cell_factor_closed(T, r_d, r_u, p)
        if math.isfinite(c):
            assert 0.0 < c <= 1.0


def test_zeta_term_markers():
    p = make_params()
    z0 = zeta_term(1.0, 50.0, 0.0, p)
    assert z0.valid and z0.zeta == 0.0 and z0.trusted
    zs = zeta_term(1.0, 50.0, 50.0, p)
    assert not zs.valid and zs.artanh_arg == math.inf
    assert math.isnan(same_cell_factor_closed(1.0, 50.0, 50.0, p))
    z = zeta_term(1.0, 120.0, 119.9, p)
    assert z.valid == (z.artanh_arg < 1.0)
    assert z.trusted == (z.valid and z.artanh_arg <= ZETA_TRUST_CUTOFF)
    with pytest.raises(ValueError):
        zeta_term(0.0, 50.0, 10.0, p)
    with pytest.raises(ValueError):
        zeta_term(1.0, 0.0, 10.0, p)


# ---------------------------------------------------------------------------
# full duplex downlink

def test_fd_dl_silent_uplink_is_half_duplex():
    p = make_params(p_0=0.0)
    for T in (0.1, 1.0, 10.0):
        assert fd_dl_coverage(T, p) == hd_dl_coverage(T, p)


def test_fd_dl_routes_agree():
    p2 = make_params(epsilon=0.2)
    p8 = make_params(epsilon=0.8)
    for p in (p2, p8):
        for t_db in (-20.0, 0.0, 20.0):
            T = 10.0 ** (t_db / 10.0)
            auto = fd_dl_coverage(T, p, quad=LOOSE, factor="auto")
            oracle = fd_dl_coverage(T, p, quad=LOOSE, factor="oracle")
            assert auto == pytest.approx(oracle, abs=2e-4)


def test_fd_dl_below_half_duplex():
    # the cross link only adds interference, so coverage cannot exceed
    # the half duplex value (allowing for quadrature tolerance)
    p = make_params(epsilon=0.8)
    for t_db in range(-30, 31, 10):
        T = 10.0 ** (t_db / 10.0)
        assert fd_dl_coverage(T, p, quad=LOOSE) <= hd_dl_coverage(T, p) + 1e-5


def test_fd_dl_monotone_and_bounded():
    p = make_params(epsilon=0.8)
    vals = [fd_dl_coverage(10.0 ** (t / 10.0), p, quad=LOOSE)
            for t in range(-40, 41, 10)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert all(0.0 < v <= 1.0 for v in vals)


def test_fd_dl_argument_validation():
    p = make_params()
    with pytest.raises(ValueError):
        fd_dl_coverage(0.0, p)
    with pytest.raises(ValueError):
        fd_dl_coverage(1.0, p, factor="closed")


def test_coverage_scale_invariance():
    """Rescaling lengths with matched density and power target is exact.

    r_c -> s r_c, lambda -> lambda / s^2 and p_0 -> p_0 s^(-alpha eps)
    leave every interference-limited coverage expression unchanged.
    """
    p = make_params(epsilon=0.8)
    s = 2.5
    scaled = ScenarioParams(
        lambda_bs=p.lambda_bs / s**2, r_c=p.r_c * s, p_d=p.p_d,
        p_0=p.p_0 * s ** (-p.alpha * p.epsilon), p_max_u=p.p_max_u,
        epsilon=p.epsilon, alpha=p.alpha, sigma2=0.0,
        window_len=p.window_len)
    for T in (0.1, 1.0, 10.0):
        assert hd_dl_coverage(T, scaled) == pytest.approx(
            hd_dl_coverage(T, p), abs=1e-9)
        assert fd_ul_coverage(T, scaled) == pytest.approx(
            fd_ul_coverage(T, p), abs=1e-9)
        assert fd_dl_coverage(T, scaled, quad=LOOSE) == pytest.approx(
            fd_dl_coverage(T, p, quad=LOOSE), abs=3e-5)


# ---------------------------------------------------------------------------
# mean inverse SINR bounds

def test_ul_bound_composes_scipy_pieces():
    """Moment of the serving distance times the regularized field integral."""
    for eps in (0.2, 0.8):
        p = make_params(epsilon=eps, sigma2=2e-7)
        a = p.alpha
        k = a * (1.0 - eps)
        moment, m_err = integrate.quad(
            lambda r: r**k * 2.0 * r / p.r_c**2, 0.0, p.r_c,
            epsabs=1e-12, epsrel=1e-11)
        field, f_err = integrate.quad(
            lambda x: x * (1.0 + x) ** (-a), 0.0, np.inf)
        assert m_err < 1e-9 * max(1.0, abs(moment)) and f_err < 1e-10
        want = moment * (p.sigma2
                         + 2.0 * math.pi * p.lambda_bs * p.p_d * field) / p.p_0
        assert mean_inverse_sinr_ul(p) == pytest.approx(want, rel=1e-9)


def test_dl_bound_composes_scipy_pieces():
    p = make_params(epsilon=0.8, sigma2=3e-5)
    a = p.alpha
    moment, _ = integrate.quad(
        lambda r: r**a * 2.0 * r / p.r_c**2, 0.0, p.r_c)
    field, _ = integrate.quad(
        lambda x: x * (1.0 + x) ** (-a), 0.0, np.inf)
    base = moment * (p.sigma2 / p.p_d
                     + 2.0 * math.pi * p.lambda_bs * field)
    baseline = mean_inverse_sinr_dl(ScenarioParams(
        lambda_bs=p.lambda_bs, r_c=p.r_c, p_d=p.p_d, p_0=0.0,
        epsilon=p.epsilon, alpha=p.alpha, sigma2=p.sigma2))
    assert baseline == pytest.approx(base, rel=1e-9)


def test_bounds_scale_linearly_in_powers():
    p = make_params(epsilon=0.2, sigma2=1e-6)
    double_p0 = make_params(epsilon=0.2, sigma2=1e-6,
                            p_0=2.0 * p.p_0)
    # uplink: signal scales with p_0, interference does not
    assert mean_inverse_sinr_ul(double_p0) == pytest.approx(
        0.5 * mean_inverse_sinr_ul(p), rel=1e-12)
    # downlink: the cross term is linear in p_0 on top of a fixed base
    base = mean_inverse_sinr_dl(make_params(epsilon=0.2, sigma2=1e-6, p_0=0.0))
    assert mean_inverse_sinr_dl(double_p0) - base == pytest.approx(
        2.0 * (mean_inverse_sinr_dl(p) - base), rel=1e-12)


def test_ul_bound_requires_power_control():
    with pytest.raises(ValueError):
        mean_inverse_sinr_ul(make_params(p_0=0.0))


# ---------------------------------------------------------------------------
# rate statistics

def test_rate_cdf_duality():
    p = make_params()
    fn = lambda T: hd_dl_coverage(T, p)
    for c in (0.25, 1.0, 3.0):
        assert rate_cdf(fn, c, "hd") == pytest.approx(
            1.0 - fn(2.0**c - 1.0), rel=1e-12)
        assert rate_cdf(fn, c, "fd") == pytest.approx(
            1.0 - fn(2.0 ** (c / 2.0) - 1.0), rel=1e-12)
    assert rate_cdf(fn, 0.0) == 0.0
    assert rate_cdf(fn, 1e-300) == 0.0  # threshold underflows to the limit
    with pytest.raises(ValueError):
        rate_cdf(fn, -1.0)
    with pytest.raises(ValueError):
        rate_cdf(fn, 1.0, duplex="tdd")


def test_mean_rate_of_threshold_step():
    # coverage = 1 below T = 1 and 0 above gives a deterministic rate of
    # exactly k bps/Hz, so the mean is the bandwidth split factor itself
    step = lambda T: 1.0 if T < 1.0 else 0.0
    assert mean_rate(step, duplex="hd") == pytest.approx(1.0, abs=1e-5)
    assert mean_rate(step, duplex="fd") == pytest.approx(2.0, abs=1e-5)


def test_mean_rate_exponential_coverage():
    """P(T) = e^-T integrates to e * E1(1) / ln 2 per bandwidth unit."""
    fn = lambda T: math.exp(-T)
    want = math.e * float(special.exp1(1.0)) / math.log(2.0)
    assert mean_rate(fn, duplex="hd") == pytest.approx(want, rel=1e-7)
    assert mean_rate(fn, duplex="fd") == pytest.approx(2.0 * want, rel=1e-7)


def test_cell_edge_exponential_coverage():
    # 1 - exp(-(2^(c/k) - 1)) = q inverts in closed form
    fn = lambda T: math.exp(-T)
    for duplex, k in (("hd", 1.0), ("fd", 2.0)):
        want = k * math.log2(1.0 - math.log(0.95))
        got = cell_edge_rate(fn, duplex=duplex)
        assert got == pytest.approx(want, rel=1e-4)
        assert rate_cdf(fn, got, duplex) == pytest.approx(0.05, abs=1e-4)


def test_mean_rate_divergence_guard_and_plateau():
    with pytest.raises(QuadratureError):
        mean_rate(lambda T: 0.9, duplex="hd")  # tail never decays
    # a coverage plateau below 1 at small thresholds is a point mass of
    # zero-rate drops, not a divergence; the mean just scales with it
    want = 0.5 * math.e * float(special.exp1(1.0)) / math.log(2.0)
    got = mean_rate(lambda T: 0.5 * math.exp(-T), duplex="hd")
    assert got == pytest.approx(want, rel=1e-6)


def test_cell_edge_degenerate_cdfs():
    with pytest.raises(DegenerateCdfError):
        cell_edge_rate(lambda T: 0.5, duplex="hd")   # starts above 5%
    with pytest.raises(DegenerateCdfError):
        cell_edge_rate(lambda T: 0.97, duplex="hd")  # never reaches 5%
    step = lambda T: 1.0 if T < 1.0 else 0.0
    with pytest.raises(DegenerateCdfError):
        cell_edge_rate(step, duplex="hd")            # jumps across 5%
    with pytest.raises(ValueError):
        cell_edge_rate(lambda T: math.exp(-T), quantile=0.0)


def test_analytic_rates_reproduce_hd_reference_values():
    """Half duplex mean and edge rate match the published reference table."""
    p = from_inter_bs_distance(400.0, p_d=dbm_to_linear(40.0),
                               p_0=dbm_to_linear(-64.0))
    fn = lambda T: hd_dl_coverage(T, p)
    assert mean_rate(fn, duplex="hd") == pytest.approx(2.02, abs=0.05)
    assert cell_edge_rate(fn, duplex="hd") == pytest.approx(0.0062, abs=0.001)
