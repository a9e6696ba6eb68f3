import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from ehrelay import analytic
from ehrelay.analytic import (
    FitError,
    coop_outage_closed_form,
    coop_outage_exact,
    direct_outage_approx,
    direct_outage_exact,
    diversity_fit,
    diversity_predicted,
    multiplicative_gain,
    relay_cdf,
    relay_outage_approx,
    relay_outage_exact,
    relay_snr,
)
from ehrelay.model import EnergyModel, SystemParams, validate
from ehrelay.special import DomainError

from conftest import (
    CLOSED_RHO100_PEX0,
    CLOSED_RHO100_PEX01,
    COOP_EXACT_RHO100_PEX01,
    DIRECT_EXACT_RHO100,
    G1,
    G2,
    RELAY_EXACT_RHO100,
    brute_force_relay_cdf,
    mp_relay_cdf,
)


def at_db(db, rate_min=2e5):
    return SystemParams.from_snr_db(db, rate_min=rate_min)


snr_db = st.floats(min_value=-10.0, max_value=80.0)
prob = st.floats(min_value=0.0, max_value=1.0)


# --- direct link --------------------------------------------------------------


def test_direct_exact_value(base_params):
    assert direct_outage_exact(base_params) == pytest.approx(DIRECT_EXACT_RHO100, rel=1e-12)


def test_direct_exact_against_sampled_exponential(base_params):
    # 10^8 Bernoulli trials on an exponential gain, in chunks
    rng = np.random.default_rng(11)
    n_chunks, size = 10, 10**7
    hits = sum(int(np.count_nonzero(rng.exponential(size=size) * 100.0 < G1)) for _ in range(n_chunks))
    p = DIRECT_EXACT_RHO100
    n = n_chunks * size
    assert abs(hits / n - p) <= 4 * math.sqrt(p * (1 - p) / n)


def test_direct_limits():
    assert direct_outage_exact(at_db(300)) == pytest.approx(0.0, abs=1e-25)
    assert direct_outage_exact(at_db(0, rate_min=2e8)) == 1.0


def test_direct_approx(base_params):
    assert direct_outage_approx(base_params) == pytest.approx(G1 / 100, rel=1e-14)
    assert direct_outage_approx(SystemParams(0.01, 0.01, 1.0, 2e6, 2e5)) == 1.0
    ratios = [direct_outage_exact(at_db(d)) / direct_outage_approx(at_db(d)) for d in (10, 30, 50, 70)]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] == pytest.approx(1.0, abs=1e-8)


# --- relay SNR and its distribution ---------------------------------------------


def test_relay_snr_examples(base_params):
    assert relay_snr(0.03, 0.06, base_params) == pytest.approx(1.8)
    assert relay_snr(0.0, 5.0, base_params) == 0.0
    t = 1e9
    assert relay_snr(t, t, SystemParams(1, 1, 1, 2e6, 2e5)) / t == pytest.approx(0.5, rel=1e-6)


def test_relay_snr_vectorised(base_params):
    out = relay_snr(np.array([0.03, 0.0]), np.array([0.06, 1.0]), base_params)
    assert out == pytest.approx([1.8, 0.0])


@given(st.floats(0, 1e12), st.floats(0, 1e12))
def test_relay_snr_bounded_by_hops(x, y):
    params = SystemParams(1.0, 1.0, 1.0, 2e6, 2e5)
    f = relay_snr(x, y, params)
    assert 0.0 <= f <= min(x, y)


def test_relay_cdf_value(base_params):
    assert relay_cdf(G2, base_params) == pytest.approx(RELAY_EXACT_RHO100, rel=1e-12)
    assert f"{relay_cdf(G2, base_params):.4g}" == "0.003154"


def test_relay_cdf_limits(base_params):
    assert relay_cdf(0.0, base_params) == 0.0
    assert relay_cdf(math.inf, base_params) == 1.0
    assert relay_cdf(1e6, base_params) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        relay_cdf(-1e-3, base_params)


@pytest.mark.parametrize("rho_s_db, rho_r_db", [(10, 10), (20, 20), (30, 30), (10, 30), (25, 5)])
@pytest.mark.parametrize("z", [1e-3, 0.14869835499703502, 1.0, 10.0])
def test_relay_cdf_against_extended_precision(rho_s_db, rho_r_db, z):
    params = SystemParams(10 ** (rho_s_db / 10), 10 ** (rho_r_db / 10), 1.0, 2e6, 2e5)
    ref = mp_relay_cdf(z, params.rho_s, params.rho_r)
    assert relay_cdf(z, params) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("rho_db", [0, 10, 20])
@pytest.mark.parametrize("z", [0.14869835499703502, 1.0, 5.0])
def test_relay_cdf_against_brute_force(rho_db, z):
    params = at_db(rho_db)
    n = 10**7
    emp = brute_force_relay_cdf(z, params.rho_s, params.rho_r, n, seed=rho_db * 10 + int(z * 7))
    p = relay_cdf(z, params)
    assert abs(emp - p) <= 4 * math.sqrt(p * (1 - p) / n)


def test_relay_cdf_high_snr_guard():
    # naive 1 - e^-a * b*K1(b) is pure rounding noise this deep
    params = at_db(60)
    values = [relay_cdf(z, params) for z in np.geomspace(1e-4, 10, 40)]
    assert all(v > 0 for v in values)
    assert all(a < b for a, b in zip(values, values[1:]))
    ref = mp_relay_cdf(G2, params.rho_s, params.rho_r)
    assert relay_cdf(G2, params) == pytest.approx(ref, rel=1e-12)


@given(snr_db, snr_db, st.floats(0, 1e4), st.floats(0, 1e4))
def test_relay_cdf_monotone_and_bounded(a_db, b_db, z1, z2):
    params = SystemParams(10 ** (a_db / 10), 10 ** (b_db / 10), 1.0, 2e6, 2e5)
    lo, hi = sorted((z1, z2))
    p_lo, p_hi = relay_cdf(lo, params), relay_cdf(hi, params)
    assert 0.0 <= p_lo <= p_hi <= 1.0


def test_relay_outage(base_params):
    assert relay_outage_exact(base_params) == pytest.approx(RELAY_EXACT_RHO100, rel=1e-12)
    assert relay_outage_approx(base_params) == pytest.approx(2 * G2 / 100, rel=1e-14)
    tiny = at_db(0, rate_min=1e-3)
    assert relay_outage_exact(tiny) == pytest.approx(mp_relay_cdf(tiny.g2, 1.0, 1.0), rel=1e-12)
    assert relay_outage_exact(tiny) < 1e-7
    assert relay_outage_exact(at_db(150)) < 1e-14
    assert relay_outage_approx(at_db(-30)) == 1.0
    ratios = [relay_outage_approx(at_db(d)) / relay_outage_exact(at_db(d)) for d in (20, 40, 60, 80)]
    assert all(abs(r - 1) > abs(s - 1) for r, s in zip(ratios, ratios[1:]))
    assert ratios[-1] == pytest.approx(1.0, abs=1e-5)


# --- cooperative protocol --------------------------------------------------------


def test_coop_exact_values(base_params):
    assert coop_outage_exact(base_params, EnergyModel(0.1)) == pytest.approx(
        COOP_EXACT_RHO100_PEX01, rel=1e-12
    )
    assert coop_outage_exact(base_params, EnergyModel(1.0)) == direct_outage_exact(base_params)
    assert coop_outage_exact(base_params, EnergyModel(0.0)) == (
        direct_outage_exact(base_params) * relay_outage_exact(base_params)
    )


def test_closed_form_values(base_params):
    assert coop_outage_closed_form(base_params, EnergyModel(0.1)) == pytest.approx(
        CLOSED_RHO100_PEX01, rel=1e-12
    )
    assert coop_outage_closed_form(base_params, EnergyModel(0.0)) == pytest.approx(
        CLOSED_RHO100_PEX0, rel=1e-12
    )
    assert coop_outage_closed_form(base_params, EnergyModel(1.0)) == direct_outage_approx(base_params)


def test_closed_form_equal_power_reduction():
    for db in (10, 20, 37.5):
        for p_ex in (0.0, 0.2, 1.0):
            p = at_db(db)
            two_term = analytic.coop_outage_closed_form_equal_power(p.rho_s, p.g1, p.g2, p_ex)
            assert coop_outage_closed_form(p, p_ex) == pytest.approx(two_term, rel=1e-14)


def test_closed_form_clamps_at_low_snr(caplog):
    with caplog.at_level("INFO", logger="ehrelay.analytic"):
        assert coop_outage_closed_form(at_db(-30), 1.0) == 1.0
    assert "clamped" in caplog.text


@given(snr_db, snr_db, prob, prob)
def test_coop_exact_monotone_in_p_ex(a_db, b_db, p1, p2):
    params = SystemParams(10 ** (a_db / 10), 10 ** (b_db / 10), 1.0, 2e6, 2e5)
    lo, hi = sorted((p1, p2))
    assert coop_outage_exact(params, lo) <= coop_outage_exact(params, hi)


@given(snr_db, snr_db, snr_db, prob)
def test_coop_exact_nonincreasing_in_powers(a_db, b_db, c_db, p_ex):
    lo, hi = sorted((a_db, b_db))
    other = 10 ** (c_db / 10)
    at_source = [coop_outage_exact(SystemParams(10 ** (d / 10), other, 1, 2e6, 2e5), p_ex) for d in (lo, hi)]
    at_relay = [coop_outage_exact(SystemParams(other, 10 ** (d / 10), 1, 2e6, 2e5), p_ex) for d in (lo, hi)]
    assert at_source[1] <= at_source[0]
    assert at_relay[1] <= at_relay[0]


@settings(max_examples=200)
@given(st.floats(1.0, 1e12), st.floats(1.0, 1e12), st.floats(1e3, 1e8))
def test_coop_exact_reduces_to_direct(rho_s, rho_r, rate_min):
    params = SystemParams(rho_s, rho_r, 1.0, 2e6, rate_min)
    a, b = coop_outage_exact(params, 1.0), direct_outage_exact(params)
    assert abs(a - b) <= 4 * math.ulp(b)


@pytest.mark.parametrize("p_ex", [0.0, 0.01, 0.1, 0.5, 1.0])
def test_closed_form_converges_to_exact(p_ex):
    errors = []
    for db in np.arange(25, 71, 5):
        p = at_db(db)
        exact = coop_outage_exact(p, p_ex)
        errors.append(abs(coop_outage_closed_form(p, p_ex) - exact) / exact)
    assert max(errors) <= 0.10
    assert errors[-1] < 1e-4


# --- diversity and gain ------------------------------------------------------------


@pytest.mark.parametrize("p_ex, d", [(0.0, 2), (0.1, 1), (1.0, 1), (1e-12, 1)])
def test_diversity_predicted(p_ex, d):
    assert diversity_predicted(EnergyModel(p_ex)) == d
    assert diversity_predicted(p_ex) == d


def _closed_points(p_ex, dbs=(30, 35, 40, 45, 50)):
    return [(10 ** (d / 10), coop_outage_closed_form(at_db(d), p_ex)) for d in dbs]


def test_diversity_fit_pure_power_laws():
    assert 1.99 <= diversity_fit(_closed_points(0.0)).slope <= 2.01
    assert 0.999 <= diversity_fit(_closed_points(1.0)).slope <= 1.001


def test_diversity_fit_exact_line():
    pts = [(r, 3.0 * r**-1.5) for r in (10.0, 100.0, 1000.0)]
    fit = diversity_fit(pts)
    assert fit.slope == pytest.approx(1.5)
    assert fit.intercept == pytest.approx(math.log10(3.0))
    assert fit.points_used == 3
    assert fit.residual_rms == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize(
    "points",
    [
        [(100.0, 1e-3)],
        [(100.0, 1e-3), (100.0, 2e-3)],
        [(10.0, 1e-3), (100.0, 0.0)],
        [(10.0, 1.0), (100.0, 1e-3)],
        [(-1.0, 1e-3), (100.0, 1e-4)],
    ],
)
def test_diversity_fit_errors(points):
    with pytest.raises(FitError):
        diversity_fit(points)


def test_multiplicative_gain_value(base_params):
    g = multiplicative_gain(base_params, EnergyModel(0.1))
    assert g == pytest.approx(0.1 + 0.9 * 2 * G2 / 100, rel=1e-14)
    assert g == pytest.approx(0.10268, abs=1e-5)
    assert multiplicative_gain(base_params, EnergyModel(1.0)) == 1.0
    assert multiplicative_gain(at_db(200), 0.3) == pytest.approx(0.3, rel=1e-15)


@given(snr_db, snr_db, prob)
def test_multiplicative_gain_identity(a_db, b_db, p_ex):
    params = SystemParams(10 ** (a_db / 10), 10 ** (b_db / 10), 1.0, 2e6, 2e5)
    sc = validate(params, p_ex)
    expected = p_ex + (1 - p_ex) * (1 / sc.rho_s + 1 / sc.rho_r) * sc.g2
    assert multiplicative_gain(sc) == expected
    closed = analytic._closed_form_unclamped(sc)
    assert closed / (sc.g1 / sc.rho_s) == pytest.approx(expected, rel=4e-16)
