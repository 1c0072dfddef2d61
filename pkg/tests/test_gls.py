import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharpnorm.extended import Atoms, INF, Power, lebesgue, lp_norm
from sharpnorm.gls import (
    ConvexFunctionTable, EmptySupportError, PsiFunction, constant_psi, degenerate_psi,
    fundamental_function, gls_norm, linear_substitution_gls_bound, log_orlicz_function,
    lp_support, natural_psi, nu_table, orlicz_function, power_psi, sigma_lambda_bound,
    sigma_transform, tabulated_psi, tau_transform, tau_upper_bound, theta_transform,
    weak_delta2_check, young_fenchel,
)
from sharpnorm.operators import composition_norm, composition_norm_power_map
from sharpnorm.pushforward import PowerMap, radon_nikodym

L = lebesgue()


def test_psi_is_infinite_outside_support():
    psi = power_psi(2.0, 1.0, 4.0)
    assert psi(0.5) == INF and psi(5.0) == INF
    assert psi(4.0) == 2.0
    d = degenerate_psi(2.0)
    assert d(2.0) == 1.0 and d(2.0001) == INF
    with pytest.raises(ValueError):
        PsiFunction(0.5, 2.0, lambda p: 1.0)


def test_gls_norm_examples():
    assert gls_norm(Power(1.0, 0.0), degenerate_psi(2.0), L) == 1.0
    f = Power(1.0, -0.5)
    scaled = PsiFunction(1.0, 2.0, lambda p: 2 * (2 / (2 - p)) ** (1 / p))
    assert gls_norm(f, scaled, L) == pytest.approx(0.5, rel=1e-12)
    with pytest.raises(ValueError):
        gls_norm(f, scaled, L, p_grid_size=8)


@pytest.mark.parametrize("s", [-0.5, -0.3, 0.0, 0.4, 2.0])
def test_natural_psi_normalizes(s):
    f = Power(1.7, s)
    B = 2.0 if s == -0.5 else 6.0
    if s * B <= -1:
        B = -1.0 / s
    assert gls_norm(f, natural_psi(f, L, 1.0, B), L) == pytest.approx(1.0, abs=1e-9)


def test_natural_psi_matches_closed_form_and_rejects_divergence():
    f = Power(1.0, -0.5)
    psi = natural_psi(f, L, 1.0, 2.0)
    for p in (1.0, 1.5, 1.9):
        assert psi(p) == pytest.approx((2 / (2 - p)) ** (1 / p), rel=1e-13)
    with pytest.raises(ValueError, match="diverges at p="):
        natural_psi(f, L, 1.0, 3.0)
    assert natural_psi(Power(1.0, 0.0), L, 1.0, 5.0)(3.3) == pytest.approx(1.0)


def test_example_density_natural_psi():
    z = radon_nikodym(PowerMap(3.0), L, L)
    psi = natural_psi(z, L, 1.0, 1.5)
    for q in (1.1, 1.25, 1.4):
        assert psi(q) == pytest.approx((1 / 3) * (3 / (3 - 2 * q)) ** (1 / q), rel=1e-12)
    assert psi(1.25) == pytest.approx(1.39765423754315849047, rel=1e-13)


def test_tabulated_psi_interpolates_monotone_data():
    g = np.linspace(1.0, 5.0, 9)
    psi = tabulated_psi(g, g ** 0.5)
    assert psi(2.0) == pytest.approx(math.sqrt(2.0), rel=1e-12)
    assert psi(2.3) == pytest.approx(math.sqrt(2.3), rel=1e-3)
    vals = psi(np.linspace(1.0, 5.0, 200))
    assert np.all(np.diff(vals) >= 0)
    with pytest.raises(ValueError):
        tabulated_psi(g, -g)


def test_tau_golden_values():
    # inf_{q > 2} (1 - q/(2(q-1)))^((1-q)/q) is the limit q -> inf, equal to 2
    tau = tau_transform(constant_psi(), 0.5)
    assert tau(1.0) == pytest.approx(2.0, rel=1e-9)
    assert tau.B <= 2.0


@pytest.mark.parametrize("t", [0.2, 0.5])
def test_tau_upper_bounds(t):
    psi = power_psi(2.0)
    tau = tau_transform(psi, t)
    for p in np.linspace(1.0, 1 / t - 0.1, 6):
        v = tau(float(p))
        assert v <= tau_upper_bound(psi, t, float(p), sharp=True) * (1 + 1e-12)
        assert tau_upper_bound(psi, t, float(p), sharp=True) <= tau_upper_bound(psi, t, float(p))


def test_tau_support_is_bounded():
    tau = tau_transform(power_psi(2.0), 0.5)
    assert 1.0 <= tau.A and tau.B <= 2.0
    assert tau(2.0 + 1e-9) == INF


@pytest.mark.parametrize("m", [1.0, 2.0])
def test_tau_growth_exponent(m):
    # tau(p) grows like (1/t - p)^-(t + 1/m) near the end of its support
    t = 0.5
    tau = tau_transform(power_psi(m), t)
    eps = np.array([2.0 ** -k for k in range(6, 12)])
    vals = np.array([tau(1 / t - e) for e in eps])
    slope = -np.polyfit(np.log(eps), np.log(vals), 1)[0]
    assert slope == pytest.approx(t + 1 / m, rel=0.05)


def test_sigma_identity_for_r_one():
    psi = power_psi(2.0)
    sigma = sigma_transform(psi, 1.0)
    for p in (1.0, 2.0, 7.5):
        assert sigma(p) == pytest.approx(psi(p), rel=1e-8)


def test_sigma_golden_value():
    # 30-digit minimisation of S_(1/2)(2, q) sqrt(q) over q > 2
    sigma = sigma_transform(power_psi(2.0), 0.5)
    assert sigma(2.0) == pytest.approx(1.86197406419637536750, rel=1e-10)


def test_sigma_matches_theta_through_quadrature():
    psi = power_psi(2.0)
    r = 0.5
    z = radon_nikodym(PowerMap(r), L, L)
    sigma = sigma_transform(psi, r)
    theta = theta_transform(psi, lambda p, q: composition_norm(z, p, q, L), (1.0, 6.0))
    for p in (1.0, 1.7, 3.0):
        assert theta(p) == pytest.approx(sigma(p), rel=1e-8)


@pytest.mark.parametrize("lam", [2.5, 3.0, 8.0])
def test_sigma_lambda_bound(lam):
    psi = power_psi(2.0)
    sigma = sigma_transform(psi, 2.0)
    for p in (1.0, 3.0):
        assert sigma(p) <= sigma_lambda_bound(psi, 2.0, p, lam) * (1 + 1e-12)
    with pytest.raises(ValueError):
        sigma_lambda_bound(psi, 2.0, 1.0, 1.5)


def test_sigma_empty_support_for_bounded_psi():
    psi = natural_psi(Power(1.0, -0.5), L, 1.0, 2.0)
    with pytest.raises(EmptySupportError, match="q > 3 p"):
        sigma_transform(psi, 3.0)


def test_theta_with_degenerate_psi():
    d = degenerate_psi(4.0)
    theta = theta_transform(d, lambda p, q: composition_norm_power_map(0.5, p, q))
    assert theta(2.0) == pytest.approx(composition_norm_power_map(0.5, 2.0, 4.0))
    assert theta(4.5) == INF


def test_theta_identity_operator_is_right_limit():
    psi = power_psi(2.0)
    theta = theta_transform(psi, lambda p, q: 1.0, (1.0, 50.0))
    for p in (1.0, 3.0, 10.0):
        assert theta(p) == pytest.approx(psi(p), rel=1e-8)


def test_weak_delta2():
    assert weak_delta2_check(power_psi(2.0), 2.0).holds
    res = weak_delta2_check(constant_psi(), 1.0)
    assert res.holds and res.C == pytest.approx(1.0)
    bad = weak_delta2_check(natural_psi(Power(1.0, -0.5), L, 1.0, 2.0), 3.0)
    assert not bad.holds


def _convex_tables():
    u = np.linspace(0.0, 10.0, 101)
    return [ConvexFunctionTable.from_function(f, u) for f in
            (lambda x: x ** 2 / 2, np.exp, lambda x: (x - 2.5) ** 2 + x, lambda x: x ** 3 / 30)]


def test_young_fenchel_self_conjugate():
    u = np.linspace(0.0, 10.0, 2001)
    t = ConvexFunctionTable.from_function(lambda x: x ** 2 / 2, u)
    v = np.linspace(0.1, 4.9, 25)
    c = young_fenchel(t, v, func=lambda x: x * x / 2)
    assert np.allclose(c.values, v ** 2 / 2, atol=1e-12)
    assert all(flag == "" for flag in c.boundary)


def test_young_fenchel_linear_case_flags():
    u = np.linspace(0.0, 10.0, 11)
    c = young_fenchel(ConvexFunctionTable.from_function(lambda x: x, u), [0.5, 1.0, 2.0])
    assert c.values[0] == 0.0 and c.values[1] == 0.0
    assert c.boundary[0] == "lower" and c.boundary[2] == "upper"


@pytest.mark.parametrize("table", _convex_tables())
def test_biconjugate(table):
    back = young_fenchel(young_fenchel(table), table.grid)
    assert np.max(np.abs(np.asarray(back.values) - np.asarray(table.values))) < 1e-9


def test_convexity_is_enforced():
    with pytest.raises(ValueError):
        ConvexFunctionTable.from_function(np.sin, np.linspace(0, 6, 50))


def test_nu_table_of_power_psi():
    t = nu_table(power_psi(1.0), 64)
    g = np.asarray(t.grid)
    assert np.allclose(t.values, g * np.log(g))


@pytest.mark.parametrize("m", [1.0, 2.0, 3.0])
def test_orlicz_function_closed_form(m):
    # for psi = p^(1/m): ln N(u) = u^m / (m e) for |u| >= e
    psi = power_psi(m)
    for u in (3.0, 10.0, 50.0):
        assert log_orlicz_function(psi, u) == pytest.approx(u ** m / (m * math.e), rel=1e-9)
    e = math.e
    lo, hi = orlicz_function(psi, e * (1 - 1e-9)), orlicz_function(psi, e * (1 + 1e-9))
    assert abs(hi - lo) <= 1e-6 * hi
    C = orlicz_function(psi, 1.0)
    assert orlicz_function(psi, 2.0) == pytest.approx(4 * C, rel=1e-12)
    assert orlicz_function(psi, -2.0) == orlicz_function(psi, 2.0)


def test_orlicz_refuses_non_convex_nu():
    psi = PsiFunction(1.0, 10.0, lambda p: math.exp(-0.5 * math.log(p) ** 2) + 5)
    with pytest.raises(ValueError, match="not convex"):
        orlicz_function(psi, 5.0)


def test_orlicz_overflow_is_infinite():
    assert orlicz_function(power_psi(2.0), 1e3) == INF
    assert math.isfinite(log_orlicz_function(power_psi(2.0), 1e3))


def test_fundamental_function():
    tau = PsiFunction(1.0, INF, lambda p: p)
    assert fundamental_function(tau, math.exp(-4)) == pytest.approx(math.exp(-1) / 4, rel=1e-12)
    assert fundamental_function(degenerate_psi(2.0), 0.25) == 0.5
    assert fundamental_function(constant_psi(), 1.0) == pytest.approx(1.0)
    assert fundamental_function(tau, 0.0) == 0.0


@given(st.floats(1e-6, 1.0), st.floats(1.0, 4.0))
@settings(max_examples=30, deadline=None)
def test_fundamental_function_of_degenerate(delta, r):
    assert fundamental_function(degenerate_psi(r), delta) == pytest.approx(delta ** (1 / r))


def test_linear_substitution_gls_bound():
    d = degenerate_psi(3.0)
    assert linear_substitution_gls_bound(2.0, 8.0, d, d) == pytest.approx(2.0 * 8.0 ** (-1 / 3))
    assert linear_substitution_gls_bound(0.0, 8.0, d, d) == 0.0
    with pytest.raises(ValueError):
        linear_substitution_gls_bound(1.0, 2.0, d, degenerate_psi(2.0))


def test_lp_support():
    A, B = lp_support(Power(1.0, -0.5), L)
    assert A == 1.0 and B == pytest.approx(2.0, abs=1e-5)


def test_gls_norm_on_atoms():
    at = Atoms((0.5, 0.5))
    f = Power(1.0, 0.0)
    assert gls_norm(f, power_psi(1.0), at) == pytest.approx(1.0, rel=1e-5)
    assert lp_norm(f, 3.0, at) == pytest.approx(1.0)
