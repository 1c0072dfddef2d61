import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from sharpnorm.extended import Atoms, Interval, Power, Table, lebesgue, lp_norm
from sharpnorm.operators import (
    Composition, Multiplicative, Product, composition_norm_power_map,
    multiplicative_norm_power_weight, transfer_function,
)
from sharpnorm.oracle import (
    beta_sweep, discrete_exact_norm, indicator_necessity_probe, optimal_beta, random_probe,
    random_step_function, rayleigh_quotient, truncation_sequence,
)
from sharpnorm.pushforward import MeasurePreserving, PowerMap, constant_map

L = lebesgue()


@pytest.mark.parametrize("r p q".split(), [(0.5, 2.0, 4.0), (2.0 / 3.0, 1.0, 4.0), (2.0, 1.0, 8.0)])
def test_beta_sweep_attains_composition_constant(r, p, q):
    closed = composition_norm_power_map(r, p, q)
    b, v = beta_sweep(Composition(PowerMap(r)), p, q, L)
    assert v <= closed * (1 + 1e-8)
    assert v == pytest.approx(closed, rel=1e-6)
    assert b == pytest.approx(optimal_beta(Composition(PowerMap(r)), p, q), rel=0.05)


def test_beta_sweep_multiplicative_example():
    b, v = beta_sweep(Multiplicative(Power(1.0, -0.1)), 2.0, 4.0, L)
    assert v == pytest.approx(multiplicative_norm_power_weight(0.1, 2.0, 4.0), rel=1e-6)
    assert v == pytest.approx(1.13621936646749936850, rel=1e-6)
    assert b == pytest.approx(1.0, rel=0.05)


def test_optimal_beta_rejects_bad_exponents():
    with pytest.raises(ValueError):
        optimal_beta(Composition(PowerMap(2.0)), 2.0, 2.0)
    with pytest.raises(ValueError):
        beta_sweep(Product(Power(), PowerMap(2.0)), 1.0, 2.0, L)


def test_truncation_tracks_infinite_constant():
    # r = 3, p = 1, q = 2 lies outside q > pr; the truncated quotients are
    # sqrt((sqrt(3 n) - 1) / 3) and grow without bound
    ns = (10, 100, 1e4, 1e9, 1e13)
    seq = truncation_sequence(Composition(PowerMap(3.0)), 1.0, 2.0, L, n_list=ns)
    exact = [math.sqrt((math.sqrt(3 * n) - 1) / 3) for n in ns]
    assert seq == pytest.approx(exact, rel=1e-12)
    assert seq[-1] == pytest.approx(1351.2, abs=0.01)
    assert all(b >= a - 1e-9 for a, b in zip(seq, seq[1:]))


def test_truncation_approaches_finite_constant():
    closed = composition_norm_power_map(0.5, 2.0, 4.0)
    seq = truncation_sequence(Composition(PowerMap(0.5)), 2.0, 4.0, L, n_list=(1.2, 1.5, 2.0, 4.0))
    assert all(b >= a - 1e-9 for a, b in zip(seq, seq[1:]))
    assert seq[-1] == pytest.approx(closed, rel=1e-9)
    with pytest.raises(ValueError):
        truncation_sequence(Composition(PowerMap(0.5)), 2.0, 4.0, L, n_list=(4.0, 2.0))


def test_discrete_two_atom_example():
    g = Table((0.0, 1.0), (1.0, 2.0))
    res = discrete_exact_norm(Multiplicative(g), 1.0, 2.0, Atoms((1.0, 1.0)), full_output=True)
    assert res.value == pytest.approx(math.sqrt(5), rel=1e-14)
    assert res.rel_diff < 1e-14


@pytest.mark.parametrize("seed", range(5))
def test_discrete_extremizer_beats_local_search(seed):
    rng = np.random.default_rng(seed)
    n = 6
    w = 10.0 ** rng.uniform(-1, 1, n)
    gv = 10.0 ** rng.uniform(-1, 1, n)
    p, q = 1.5, 3.5
    op = Multiplicative(Table(tuple(float(i) for i in range(n)), tuple(gv)))
    exact = discrete_exact_norm(op, p, q, Atoms(tuple(w)))

    def neg_quotient(x):
        f = np.abs(x)
        return -(np.sum(w * (gv * f) ** p) ** (1 / p)) / np.sum(w * f ** q) ** (1 / q)

    best = 0.0
    for k in range(20):
        x0 = np.random.default_rng([seed, k]).uniform(0.1, 1.0, n)
        best = max(best, -minimize(neg_quotient, x0, method="Nelder-Mead",
                                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000}).fun)
    assert best <= exact * (1 + 1e-10)
    assert best == pytest.approx(exact, rel=1e-5)


def test_discrete_composition_on_atoms():
    from sharpnorm.pushforward import AtomMap
    mu, nu = Atoms((1.0, 2.0, 3.0)), Atoms((2.0, 4.0))
    op = Composition(AtomMap((0, 1, 1)))
    res = discrete_exact_norm(op, 1.0, 2.0, nu, mu=mu, full_output=True)
    z = np.array([0.5, 1.25])
    closed = np.sum(np.array([2.0, 4.0]) * z ** 2) ** 0.5
    assert res.value == pytest.approx(closed, rel=1e-13)
    with pytest.raises(ValueError):
        discrete_exact_norm(op, 2.0, 2.0, nu, mu=mu)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=25, deadline=None)
def test_random_step_function_shape(seed):
    f = random_step_function(np.random.default_rng(seed), 0.0, 1.0)
    assert 2 <= len(f.pieces) <= 64
    assert f.breakpoints[0] == 0.0 and f.breakpoints[-1] == 1.0
    assert all(1e-3 <= piece.c <= 1e3 for piece in f.pieces)


@pytest.mark.parametrize("op p q const".split(), [
    (Composition(PowerMap(0.5)), 2.0, 4.0, composition_norm_power_map(0.5, 2.0, 4.0)),
    (Multiplicative(Power(1.0, -0.1)), 2.0, 4.0, 1.13621936646749936850),
    (Composition(MeasurePreserving()), 2.0, 4.0, 1.0),
    (Product(Power(1.0, -0.05), PowerMap(2.0)), 1.0, 8.0, transfer_function(2.0, 0.05, 1.0, 8.0)),
])
def test_random_probe_respects_bound(op, p, q, const):
    m = random_probe(op, p, q, L, seed=7, count=60)
    assert 0 < m <= const * (1 + 1e-8)


def test_random_probe_is_order_independent():
    op = Composition(PowerMap(0.5))
    a = random_probe(op, 2.0, 4.0, L, seed=3, count=10)
    b = max(random_probe(op, 2.0, 4.0, L, seed=3, count=5),
            max(rayleigh_quotient(random_step_function(np.random.default_rng([3, i]), 0.0, 1.0),
                                  op, 2.0, 4.0, L) for i in range(5, 10)))
    assert a == b
    with pytest.raises(ValueError):
        random_probe(op, 2.0, 4.0, Atoms((1.0,)))


def test_rayleigh_quotient_of_power_law():
    # f = y^-a on the target side: int y^(-pa) z dy with z = 2 y for r = 1/2
    op = Composition(PowerMap(0.5))
    f = Power(1.0, -0.1)
    num = (2.0 / (2.0 - 0.2)) ** 0.5
    den = lp_norm(f, 4.0, L)
    assert rayleigh_quotient(f, op, 2.0, 4.0, L) == pytest.approx(num / den, rel=1e-13)
    with pytest.raises(ValueError, match="diverges"):
        rayleigh_quotient(Power(1.0, -0.5), op, 2.0, 4.0, L)


def test_necessity_probe_constant_map_blows_up():
    sup, qs = indicator_necessity_probe(constant_map(0.5), L, Interval(0.0, 1.0),
                                        (0.5, 0.5), 1.0, 2.0, full_output=True)
    assert sup > 1e5
    assert qs[-1] > qs[0]


def test_necessity_probe_power_map_is_bounded():
    K = composition_norm_power_map(2.0, 1.0, 4.0)
    sup = indicator_necessity_probe(PowerMap(2.0), L, Interval(0.0, 1.0), (0.0, 0.0), 1.0, 4.0)
    assert sup <= K * (1 + 1e-12)


def test_necessity_probe_identity_vanishes():
    _, qs = indicator_necessity_probe(MeasurePreserving(), L, Interval(0.0, 1.0), (0.0, 0.0),
                                      1.0, 2.0, steps=20, full_output=True)
    assert qs[-1] == pytest.approx(2.0 ** (-20 * 0.5), rel=1e-12)
