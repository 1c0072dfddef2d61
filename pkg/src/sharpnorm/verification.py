"""Acceptance checks shared by ``sharpnorm verify`` and the test-suite.

Each check returns a :class:`CriterionResult` whose ``lines`` list the
measured quantities next to their tolerances.  Output contains no timings
so that reports are byte-reproducible.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from ._optimize import grid_extremum
from .extended import Atoms, INF, Power, Table, ess_sup, lebesgue, lp_norm
from .gls import (
    ConvexFunctionTable, EmptySupportError, degenerate_psi, gls_norm, log_orlicz_function,
    lp_support, natural_psi, orlicz_function, power_psi, sigma_transform, weak_delta2_check,
    young_fenchel,
)
from .operators import (
    Composition, Multiplicative, Product, composition_norm, composition_norm_power_map,
    hard_case_asymptotic, min_identity, multiplicative_norm, multiplicative_norm_power_weight,
    product_norm_bound, transfer_function,
)
from .oracle import beta_sweep, discrete_exact_norm, random_probe
from .pushforward import MeasurePreserving, PowerMap, compose, radon_nikodym


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool = True
    lines: List[str] = field(default_factory=list)

    def check(self, ok: bool, text: str):
        self.passed &= bool(ok)
        self.lines.append(("ok   " if ok else "FAIL ") + text)

    def report(self) -> str:
        head = f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.title}"
        return "\n".join([head] + ["    " + ln for ln in self.lines])


def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / abs(b)


LEB = lebesgue()


def criterion_1(seed: int = 0) -> CriterionResult:
    res = CriterionResult(1, "sharp composition constant against closed form and trial oracle")
    worst_q = worst_b = 0.0
    step = math.log(16.0) / 64
    beta_ok = True
    for r in (0.5, 2.0 / 3.0):
        op = Composition(PowerMap(r))
        z = radon_nikodym(PowerMap(r), LEB, LEB)
        for p in (1.0, 1.5, 2.0):
            for q in (p + 0.5, 2 * p, 4 * p):
                closed = composition_norm_power_map(r, p, q)
                worst_q = max(worst_q, _rel(composition_norm(z, p, q, LEB), closed))
                b_star, val = beta_sweep(op, p, q, LEB)
                worst_b = max(worst_b, _rel(val, closed))
                beta_ok &= val <= closed * (1 + 1e-8)
                beta_ok &= abs(math.log(b_star * (q - p))) <= step * (1 + 1e-9)
    res.check(worst_q <= 1e-8, f"quadrature vs closed form: max rel diff {worst_q:.2e} (tol 1e-08)")
    res.check(worst_b <= 1e-6, f"trial oracle vs closed form: max rel diff {worst_b:.2e} (tol 1e-06)")
    res.check(beta_ok, "best trial exponent within one grid step of 1/(q-p), never above the constant")
    return res


def criterion_2(seed: int = 0) -> CriterionResult:
    res = CriterionResult(2, "hard case r = 3, p = 1")
    z = radon_nikodym(PowerMap(3.0), LEB, LEB)
    fin = {q: math.isfinite(composition_norm(z, 1.0, q, LEB)) for q in (2.0, 2.9, 3.0, 3.001, 3.5, 6.0)}
    res.check(all(fin[q] == (q > 3) for q in fin),
              "finite exactly for q > 3 at q in {2, 2.9, 3, 3.001, 3.5, 6}")
    ratios = [composition_norm_power_map(3.0, 1.0, q) / hard_case_asymptotic(3.0, 1.0, q)
              for q in (3.1, 3.01, 3.001)]
    res.check(0.9 <= ratios[-1] <= 1.1, f"ratio at q = 3.001: {ratios[-1]:.6f} (range [0.9, 1.1])")
    gaps = [abs(x - 1) for x in ratios]
    res.check(gaps[0] > gaps[1] > gaps[2],
              "ratios at q = 3.1, 3.01, 3.001: " + ", ".join(f"{x:.6f}" for x in ratios)
              + " (approach 1 monotonically)")
    return res


def criterion_3(seed: int = 0) -> CriterionResult:
    res = CriterionResult(3, "p = q endpoint for r = 1/2")
    z = radon_nikodym(PowerMap(0.5), LEB, LEB)
    worst = 0.0
    for p in (1.0, 2.0, 4.0):
        v = composition_norm(z, p, p, LEB)
        worst = max(worst, _rel(v, ess_sup(z, LEB) ** (1 / p)), _rel(v, 0.5 ** (-1 / p)))
    res.check(worst <= 1e-10, f"max rel diff to r^(-1/p): {worst:.2e} (tol 1e-10)")
    return res


def criterion_4(seed: int = 0) -> CriterionResult:
    res = CriterionResult(4, "multiplicative sharpness")
    worst = 0.0
    for i in range(100):
        rng = np.random.default_rng([seed, 4, i])
        n = int(rng.integers(2, 201))
        w = tuple(10.0 ** rng.uniform(-2, 2, n))
        g = Table(tuple(float(k) for k in range(n)), tuple(10.0 ** rng.uniform(-3, 3, n)))
        p = float(rng.uniform(1.0, 4.0))
        q = p + float(rng.uniform(0.1, 4.0))
        atoms = Atoms(w)
        exact = discrete_exact_norm(Multiplicative(g), p, q, atoms, full_output=True)
        ref = lp_norm(g, p * q / (q - p), atoms)
        worst = max(worst, _rel(exact.value, ref), exact.rel_diff)
    res.check(worst <= 1e-12, f"100 random atom spaces: max rel diff {worst:.2e} (tol 1e-12)")
    op = Multiplicative(Power(1.0, -0.1))
    _, val = beta_sweep(op, 2.0, 4.0, LEB)
    closed = multiplicative_norm_power_weight(0.1, 2.0, 4.0)
    d = _rel(val, closed)
    res.check(d <= 1e-6, f"weight x^-0.1, p = 2, q = 4: trial {val:.12f} vs {closed:.12f}, rel {d:.2e}")
    flagged = True
    for t in (0.1, 0.25, 0.5):
        for p, q in ((1.0, 2.0), (2.0, 4.0), (1.0, 4.0), (2.0, 3.0), (1.5, 6.0)):
            expect_inf = t * p * q / (q - p) >= 1
            got = multiplicative_norm(Power(1.0, -t), p, q, LEB)
            flagged &= math.isinf(got) == expect_inf
            flagged &= math.isinf(multiplicative_norm_power_weight(t, p, q)) == expect_inf
    res.check(flagged, "divergence flagged exactly when tpq/(q-p) >= 1 (15 cases, boundary included)")
    return res


def criterion_5(seed: int = 0) -> CriterionResult:
    res = CriterionResult(5, "product-operator consistency")
    worst = 0.0
    for r, p, q in ((2.0, 1.0, 8.0), (0.5, 2.0, 4.0), (3.0, 1.0, 5.0)):
        b = product_norm_bound(Product(Power(1.0, 0.0), PowerMap(r)), p, q, LEB, LEB)
        worst = max(worst, _rel(b, composition_norm_power_map(r, p, q)))
    res.check(worst <= 1e-6, f"g = 1 reduces to the composition constant: rel {worst:.2e} (tol 1e-06)")
    worst = 0.0
    for t, p, q in ((0.1, 2.0, 4.0), (0.2, 1.0, 3.0)):
        b = product_norm_bound(Product(Power(1.0, -t), MeasurePreserving()), p, q, LEB, LEB)
        worst = max(worst, _rel(b, multiplicative_norm_power_weight(t, p, q)))
    res.check(worst <= 1e-6, f"identity map reduces to the multiplicative constant: rel {worst:.2e} (tol 1e-06)")
    worst = 0.0
    for r, t, p, q in ((2.0, 0.05, 1.0, 8.0), (3.0, 0.1, 1.0, 6.0)):
        a = transfer_function(r, t, p, q)
        b = product_norm_bound(Product(Power(1.0, -t), PowerMap(r)), p, q, LEB, LEB)
        worst = max(worst, _rel(a, b))
    res.check(worst <= 1e-9, f"weighted power map, closed form vs quadrature: rel {worst:.2e} (tol 1e-09)")
    return res


def probe_families():
    """Operator families and their constants used by the random upper-bound probes."""
    return [
        ("composition x^(1/2), p=2, q=4", Composition(PowerMap(0.5)), 2.0, 4.0,
         composition_norm_power_map(0.5, 2.0, 4.0)),
        ("composition x^2, p=1, q=4", Composition(PowerMap(2.0)), 1.0, 4.0,
         composition_norm_power_map(2.0, 1.0, 4.0)),
        ("multiplicative x^-0.1, p=2, q=4", Multiplicative(Power(1.0, -0.1)), 2.0, 4.0,
         multiplicative_norm_power_weight(0.1, 2.0, 4.0)),
        ("identity, p=2, q=4", Composition(MeasurePreserving()), 2.0, 4.0, 1.0),
        ("product x^-0.05 f(x^2), p=1, q=8", Product(Power(1.0, -0.05), PowerMap(2.0)), 1.0, 8.0,
         transfer_function(2.0, 0.05, 1.0, 8.0)),
    ]


def criterion_6(seed: int = 0) -> CriterionResult:
    res = CriterionResult(6, "upper bound never violated by random probes")
    for name, op, p, q, const in probe_families():
        m = random_probe(op, p, q, LEB, seed=seed, count=500)
        res.check(m <= const * (1 + 1e-8),
                  f"{name}: max quotient / constant = {m / const:.6f} over 500 probes")
    return res


def criterion_7(seed: int = 0) -> CriterionResult:
    res = CriterionResult(7, "GLS normalization and degenerate psi")
    f = Power(1.0, -0.5)
    v = gls_norm(f, natural_psi(f, LEB, 1.0, 2.0), LEB)
    res.check(abs(v - 1) <= 1e-9, f"natural psi of x^-1/2 on (1, 2): norm - 1 = {v - 1:.2e} (tol 1e-09)")
    exact = True
    for g in (Power(1.0, -0.5), Power(3.0, 0.7), Power(0.2, -0.25)):
        for r in (1.0, 1.5, 3.0):
            if g.s * r <= -1:
                continue
            exact &= gls_norm(g, degenerate_psi(r), LEB) == lp_norm(g, r, LEB)
    res.check(exact, "degenerate psi reproduces |f|_r exactly")
    return res


def criterion_8(seed: int = 0) -> CriterionResult:
    res = CriterionResult(8, "norm-one bound for the power-map transform")
    psi = power_psi(2.0)
    sigma = sigma_transform(psi, 0.5)
    worst = 0.0
    rng = np.random.default_rng([seed, 8])
    for _ in range(50):
        c = float(10.0 ** rng.uniform(-2, 2))
        a = float(rng.uniform(0.0, 3.0))
        f = Power(c, a)
        lhs = gls_norm(compose(f, PowerMap(0.5)), sigma, LEB)
        rhs = gls_norm(f, psi, LEB)
        worst = max(worst, lhs / rhs)
    res.check(worst <= 1 + 1e-8, f"50 power laws: max ratio {worst:.9f} (bound 1 + 1e-08)")
    for m in (1.0, 2.0):
        for r in (0.5, 2.0):
            d2 = weak_delta2_check(power_psi(m), r)
            res.check(d2.holds, f"weak Delta_2 for p^(1/{m:g}), r = {r:g}: C = {d2.C:.6f}, "
                                f"tail slope {d2.slope:+.4f}")
    return res


def criterion_9(seed: int = 0) -> CriterionResult:
    res = CriterionResult(9, "power map x^3 applied to x^-1/2")
    f = Power(1.0, -0.5)
    A, B = lp_support(f, LEB)
    res.check(A == 1.0 and abs(B - 2.0) <= 1e-5, f"|f|_p finite on ({A:g}, {B:.6f})")
    z = radon_nikodym(PowerMap(3.0), LEB, LEB)
    ok = isinstance(z, Power) and _rel(z.c, 1 / 3) <= 1e-15 and _rel(z.s, -2 / 3) <= 1e-15
    res.check(ok, f"density of the distribution: {z}")
    try:
        sigma_transform(natural_psi(f, LEB, 1.0, 2.0), 3.0)
        res.check(False, "sigma transform unexpectedly has nonempty support")
    except EmptySupportError as exc:
        res.check(True, f"sigma transform support is empty: {exc}")
    g = compose(f, PowerMap(3.0))
    div = all(math.isinf(lp_norm(g, p, LEB)) for p in (1.0, 1.5, 2.0, 4.0, 16.0, INF))
    res.check(div, f"composed function {g} lies in no L_p, p in {{1, 1.5, 2, 4, 16, inf}}")
    return res


def convex_test_tables():
    u = np.linspace(0.0, 10.0, 201)
    up = np.linspace(1.0, 10.0, 201)
    fs = [
        (u, lambda x: x ** 2 / 2),
        (u, np.exp),
        (u, lambda x: x ** 4 / 100),
        (u, lambda x: np.abs(x - 3) + x ** 2 / 10),
        (u, np.cosh),
        (u, lambda x: np.log1p(np.exp(x))),
        (u, lambda x: x ** 1.5),
        (u, lambda x: np.maximum(0.0, x - 5) ** 2 + x),
        (up, lambda x: x * np.log(x)),
        (up, lambda x: x * np.log(x) / 2 + 1 / x),
    ]
    return [ConvexFunctionTable.from_function(f, g) for g, f in fs]


def criterion_10(seed: int = 0) -> CriterionResult:
    res = CriterionResult(10, "analysis utilities")
    worst = 0.0
    for a, b, gam, bet in ((0.0, 1.0, 2.0, 1.0), (1.0, 3.0, 0.05, 0.5), (2.0, 2.5, 1.5, 0.25)):
        _, closed = min_identity(a, b, gam, bet)
        _, num = grid_extremum(lambda x: (x - a) ** -gam * (b - x) ** -bet, a, b, rtol=1e-12)
        worst = max(worst, _rel(num, closed))
    res.check(worst <= 1e-9, f"min identity vs numeric minimum: rel {worst:.2e} (tol 1e-09)")
    worst = 0.0
    for t in convex_test_tables():
        back = young_fenchel(young_fenchel(t), t.grid)
        worst = max(worst, float(np.max(np.abs(np.asarray(back.values) - np.asarray(t.values)))))
    res.check(worst <= 1e-6, f"biconjugate of 10 convex tables: sup error {worst:.2e} (tol 1e-06)")
    for m in (1.0, 2.0):
        psi = power_psi(m)
        lo, hi = orlicz_function(psi, math.e * (1 - 1e-9)), orlicz_function(psi, math.e * (1 + 1e-9))
        jump = abs(hi - lo) / hi
        res.check(jump <= 1e-6, f"Orlicz function of p^(1/{m:g}) at |u| = e: rel jump {jump:.2e}")
        us = np.geomspace(10.0, 1e3, 9)
        ll = [log_orlicz_function(psi, float(u)) for u in us]
        slope = float(np.polyfit(np.log(us), np.log(ll), 1)[0])
        res.check(abs(slope / m - 1) <= 0.05, f"log log N vs log u slope {slope:.6f} (target {m:g})")
    return res


CRITERIA: Dict[int, Callable[[int], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}

SUITES: Dict[str, Tuple[int, ...]] = {
    "sharpness": (1, 2, 3, 4),
    "holder": (5, 6),
    "gls": (7, 8, 10),
    "counterexample": (9,),
    "all": tuple(range(1, 11)),
}


def run_suite(name: str, seed: int = 0) -> List[CriterionResult]:
    if name not in SUITES:
        raise KeyError(name)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return [CRITERIA[k](seed) for k in SUITES[name]]
