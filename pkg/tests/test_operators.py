import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sharpnorm.extended import Atoms, INF, Power, Table, lebesgue
from sharpnorm.operators import (
    LinearSubstitution, Product, composition_norm,
    composition_norm_power_map, hard_case_asymptotic, independent_product_norm,
    linear_substitution_norm, min_identity, multiplicative_norm, multiplicative_norm_power_weight,
    product_norm_bound, product_particular_bound, transfer_candidate_l0, transfer_envelope,
    transfer_function, transfer_interval,
)
from sharpnorm.pushforward import (
    MeasurePreserving, PowerMap, constant_map, radon_nikodym,
)

L = lebesgue()

# int z^(q/(q-p)) with z = y^(1/r-1)/r evaluated in 30-40 digit arithmetic
# (tanh-sinh quadrature, or the antiderivative where the exponent is near -1)
K_GOLDEN = [
    (0.5, 2.0, 4.0, 1.07456993182354191955),
    (2.0 / 3.0, 1.5, 3.0, 1.04004191152595205727),
    (3.0, 1.0, 3.5, 2.30644939486574820191),
    (3.0, 1.0, 3.001, 110.207373687216364304),
    (2.0, 1.0, 8.0, 1.04942085704106391047),
]


@pytest.mark.parametrize("r p q expected".split(), K_GOLDEN)
def test_power_map_constant_golden(r, p, q, expected):
    assert composition_norm_power_map(r, p, q) == pytest.approx(expected, rel=1e-13)
    z = radon_nikodym(PowerMap(r), L, L)
    assert composition_norm(z, p, q, L) == pytest.approx(expected, rel=1e-12)


@given(st.floats(0.1, 6.0), st.floats(1.0, 4.0), st.floats(1.01, 5.0))
@settings(max_examples=80, deadline=None)
def test_quadrature_agrees_with_closed_form(r, p, ratio):
    q = p * ratio
    # at q = pr the critical exponent -1 is only reached up to rounding
    assume(abs(q - p * r) > 1e-9 * q)
    z = radon_nikodym(PowerMap(r), L, L)
    a, b = composition_norm(z, p, q, L), composition_norm_power_map(r, p, q)
    if math.isinf(b):
        assert math.isinf(a)
        assert q <= p * r * (1 + 1e-12)
    else:
        assert a == pytest.approx(b, rel=1e-9)


def test_endpoints_of_composition_norm():
    z = radon_nikodym(PowerMap(0.5), L, L)
    for p in (1.0, 2.0, 4.0):
        assert composition_norm(z, p, p, L) == pytest.approx(0.5 ** (-1 / p), rel=1e-15)
    # q = inf: (int z)^(1/p) = 1 on a probability space
    assert composition_norm(z, 2.0, INF, L) == pytest.approx(1.0, rel=1e-14)
    assert composition_norm(z, INF, INF, L) == 1.0
    with pytest.raises(ValueError):
        composition_norm(z, 3.0, 2.0, L)


def test_non_absolutely_continuous_gives_infinity():
    z = radon_nikodym(constant_map(0.3), L, L)
    rep = composition_norm(z, 1.0, 2.0, L, full_output=True)
    assert math.isinf(rep.value) and "null" in rep.divergence_reason


def test_hard_case_ratio_tends_to_one():
    ratios = [composition_norm_power_map(3.0, 1.0, q) / hard_case_asymptotic(3.0, 1.0, q)
              for q in (3.1, 3.01, 3.001, 3.0001)]
    gaps = [abs(x - 1.0) for x in ratios]
    assert all(g1 < g0 for g0, g1 in zip(gaps, gaps[1:]))
    assert gaps[-1] < 2e-4
    with pytest.raises(ValueError):
        hard_case_asymptotic(3.0, 1.0, 3.0)


def test_multiplicative_norm_examples():
    assert multiplicative_norm(Power(1.0, -0.1), 2.0, 4.0, L) == pytest.approx(0.6 ** -0.25, rel=1e-14)
    g = Table((0.0, 1.0), (1.0, 2.0))
    assert multiplicative_norm(g, 1.0, 2.0, Atoms((1.0, 1.0))) == pytest.approx(math.sqrt(5), rel=1e-15)
    assert multiplicative_norm(g, 2.0, 2.0, Atoms((1.0, 1.0))) == 2.0
    assert math.isinf(multiplicative_norm(g, 2.0, 1.0, Atoms((1.0, 1.0))))


@given(st.floats(0.01, 0.9), st.floats(1.0, 4.0), st.floats(1.05, 6.0))
@settings(max_examples=60, deadline=None)
def test_power_weight_closed_form_and_divergence(t, p, ratio):
    q = p * ratio
    closed = multiplicative_norm_power_weight(t, p, q)
    quad = multiplicative_norm(Power(1.0, -t), p, q, L)
    if t * p * q / (q - p) >= 1:
        assert math.isinf(closed) and math.isinf(quad)
    else:
        assert quad == pytest.approx(closed, rel=1e-10)


def test_product_bound_reductions():
    b = product_norm_bound(Product(Power(1.0, 0.0), PowerMap(2.0)), 1.0, 8.0, L, L)
    assert b == pytest.approx(composition_norm_power_map(2.0, 1.0, 8.0), rel=1e-6)
    b = product_norm_bound(Product(Power(1.0, -0.1), MeasurePreserving()), 2.0, 4.0, L, L)
    assert b == pytest.approx(0.6 ** -0.25, rel=1e-6)


def test_weighted_power_map_golden():
    # independent 30-digit minimisation of Q(1, l) K(l, 8) over l; minimiser l = 4/3
    res = transfer_function(2.0, 0.05, 1.0, 8.0, full_output=True)
    assert res.value == pytest.approx(1.11472441154685722560, rel=1e-11)
    assert res.argmin == pytest.approx(4.0 / 3.0, rel=1e-6)
    quad = product_norm_bound(Product(Power(1.0, -0.05), PowerMap(2.0)), 1.0, 8.0, L, L)
    assert quad == pytest.approx(res.value, rel=1e-9)


def test_weighted_power_map_is_attained_by_a_trial_function():
    # f(y) = y^(-b) with b chosen for the interior optimum: the quotient
    # |x^-t f(x^r)|_1 / |f|_8 reaches the bound, so it is sharp here
    t, r, p, q = 0.05, 2.0, 1.0, 8.0
    best = 0.0
    for b in np.linspace(0.0, 1.0 / q - 1e-9, 4001):
        num = 1.0 / (1.0 - t - r * b)
        den = (1.0 / (1.0 - b * q)) ** (1.0 / q)
        best = max(best, num / den)
    assert best <= transfer_function(r, t, p, q) * (1 + 1e-10)
    assert best == pytest.approx(transfer_function(r, t, p, q), rel=1e-6)


def test_transfer_function_empty_interval_warns():
    with pytest.warns(RuntimeWarning):
        assert math.isinf(transfer_function(4.0, 0.5, 1.5, 2.0))


def test_transfer_function_small_r_bound_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        v = transfer_function(0.5, 0.1, 1.0, 4.0)
    assert v <= 0.5 ** -1.0 * math.exp(-0.25)
    with pytest.warns(RuntimeWarning, match="exceeds"):
        transfer_function(0.8, 0.2, 1.0, 3.0)


def test_transfer_envelope_two_sided_near_collapse():
    # as q/r approaches p/(1-tp) from above, the function grows like the envelope
    r, t, p = 2.0, 0.25, 1.0
    a = p / (1 - t * p)
    ratios = []
    for gap in (1e-1, 1e-2, 1e-3, 1e-4):
        q = r * (a + gap)
        ratios.append(transfer_function(r, t, p, q) / transfer_envelope(r, t, p, q))
    assert max(ratios) / min(ratios) < 3.0
    assert all(0.1 < x < 10 for x in ratios)


def test_candidate_and_interval():
    lo, hi = transfer_interval(2.0, 0.05, 1.0, 8.0)
    assert lo == pytest.approx(1 / 0.95) and hi == 4.0
    assert np.isfinite(transfer_candidate_l0(2.0, 0.05, 1.0, 8.0))


def test_min_identity():
    x, v = min_identity(0.0, 1.0, 2.0, 1.0)
    assert x == pytest.approx(2.0 / 3.0) and v == pytest.approx(6.75, rel=1e-14)
    with pytest.raises(ValueError):
        min_identity(1.0, 0.0, 1.0, 1.0)


def test_independent_product_requires_flag():
    spec = Product(Power(2.0, 0.0), PowerMap(0.5))
    with pytest.raises(ValueError, match="independence"):
        independent_product_norm(spec, 2.0, 4.0, L, L)
    spec = Product(Power(2.0, 0.0), PowerMap(0.5), independent=True)
    assert independent_product_norm(spec, 2.0, 4.0, L, L) == pytest.approx(
        2.0 * composition_norm_power_map(0.5, 2.0, 4.0), rel=1e-14)


def test_particular_bound_dominates_sharp_product():
    # g = h o xi with h(y) = y^-0.025, xi = x^2, so g = x^-0.05
    z = radon_nikodym(PowerMap(2.0), L, L)
    bound = product_particular_bound(Power(1.0, -0.025), z, 1.0, 8.0, L)
    assert bound >= transfer_function(2.0, 0.05, 1.0, 8.0) * (1 - 1e-9)
    assert math.isfinite(bound)


def test_linear_substitution():
    assert linear_substitution_norm(8.0, 3.0) == pytest.approx(0.5)
    assert linear_substitution_norm(8.0, INF) == 1.0
    with pytest.raises(ValueError):
        LinearSubstitution(2, 0.0)
