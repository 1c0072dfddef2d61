"""Independent lower-bound and falsification checks for the sharp constants.

Extremal trial functions attain the constants, truncated trial functions
approach them when they are infinite, exact discrete extremizers pin them
down on atom spaces, and seeded random step functions probe the upper
bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .extended import (
    DEFAULT_TOL, INF, Atoms, FuncSpec, Interval, MeasureSpace, Piecewise, Power, Truncated,
    abs_power, integrate, lp_norm, multiply,
)
from .operators import Composition, Multiplicative, OperatorSpec, Product
from .pushforward import (
    NotAbsolutelyContinuous, Transform, compose, distribution_mass,
)


def _z_of(op: Composition, mu: MeasureSpace, nu: MeasureSpace):
    z = op.derivative(mu, nu)
    if isinstance(z, NotAbsolutelyContinuous):
        raise ValueError(f"trial functions need an absolutely continuous pushforward: {z.reason}")
    return z


def rayleigh_quotient(f: FuncSpec, op: OperatorSpec, p: float, q: float,
                      mu: MeasureSpace, nu: Optional[MeasureSpace] = None,
                      tol: float = DEFAULT_TOL) -> float:
    """``|op f|_{p, mu} / |f|_{q, nu}``.

    ``f`` lives on ``nu`` (the target of the transform); for multiplicative
    operators ``nu`` defaults to ``mu``.  Composition numerators are
    computed on the target side as ``int |f|^p z dnu``.
    """
    nu = mu if nu is None else nu
    den = lp_norm(f, q, nu, tol, full_output=True)
    if not den.finite:
        raise ValueError(f"|f|_q diverges: {den.divergence_reason}")
    if den.value == 0:
        raise ValueError("|f|_q vanishes")
    if isinstance(op, Composition):
        z = _z_of(op, mu, nu)
        r = integrate(multiply(abs_power(f, p), z), nu, tol)
        num = INF if math.isinf(r.value) else max(r.value, 0.0) ** (1.0 / p)
    elif isinstance(op, Multiplicative):
        num = lp_norm(multiply(op.g, f), p, nu, tol)
    elif isinstance(op, Product):
        num = lp_norm(multiply(op.g, compose(f, op.xi)), p, mu, tol)
    else:
        raise ValueError(f"no quotient for operator type {type(op).__name__}")
    return num / den.value


def _trial_base(op, mu, nu):
    if isinstance(op, Composition):
        return _z_of(op, mu, nu), 1.0
    if isinstance(op, Multiplicative):
        return abs_power(op.g, 1.0), None
    raise ValueError("trial families exist for composition and multiplicative operators")


def optimal_beta(op: OperatorSpec, p: float, q: float) -> float:
    """Exponent of the extremal trial function: ``1/(q-p)`` or ``p/(q-p)``."""
    if not q > p:
        raise ValueError("need q > p")
    if isinstance(op, Composition):
        return 1.0 / (q - p)
    if isinstance(op, Multiplicative):
        return p / (q - p)
    raise ValueError("trial families exist for composition and multiplicative operators")


def beta_sweep(op: OperatorSpec, p: float, q: float, mu: MeasureSpace,
               nu: Optional[MeasureSpace] = None,
               beta_grid: Optional[Sequence[float]] = None,
               tol: float = DEFAULT_TOL) -> Tuple[float, float]:
    """Best trial exponent and quotient over the family ``base**beta``.

    ``base`` is ``z`` for composition and ``|g|`` for multiplication.  The
    default grid has 65 log-spaced points on ``[opt/4, 4 opt]``.
    """
    nu = mu if nu is None else nu
    base, _ = _trial_base(op, mu, nu)
    opt = optimal_beta(op, p, q)
    grid = np.geomspace(opt / 4, opt * 4, 65) if beta_grid is None else np.asarray(beta_grid)
    best_b, best_v = math.nan, -INF
    for b in grid:
        try:
            v = rayleigh_quotient(abs_power(base, float(b)), op, p, q, mu, nu, tol)
        except ValueError:
            continue
        if v > best_v:
            best_b, best_v = float(b), v
    if best_v == -INF:
        raise ValueError("every trial quotient is undefined; the density lacks the "
                         "required integrability")
    return best_b, best_v


def truncation_sequence(op: OperatorSpec, p: float, q: float, mu: MeasureSpace,
                        nu: Optional[MeasureSpace] = None,
                        n_list: Sequence[float] = (10, 100, 1000),
                        tol: float = DEFAULT_TOL) -> list:
    """Quotients of ``base**beta * [base <= n]`` at the optimal ``beta``.

    The sequence is nondecreasing and tends to the sharp constant, also
    when that constant is infinite.
    """
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing")
    nu = mu if nu is None else nu
    base, _ = _trial_base(op, mu, nu)
    beta = optimal_beta(op, p, q)
    out = []
    for n in n_list:
        f = Truncated(abs_power(base, beta), float(n), base)
        try:
            out.append(rayleigh_quotient(f, op, p, q, mu, nu, tol))
        except ValueError:
            out.append(0.0)
    return out


@dataclass(frozen=True)
class DiscreteResult:
    value: float
    closed_form: float
    extremizer: np.ndarray

    @property
    def rel_diff(self) -> float:
        if self.closed_form == 0:
            return abs(self.value)
        return abs(self.value - self.closed_form) / self.closed_form


def discrete_exact_norm(op: OperatorSpec, p: float, q: float, atoms: Atoms,
                        mu: Optional[Atoms] = None, full_output: bool = False):
    """Exact ``L_q -> L_p`` norm on a finite atom space.

    Multiplication: ``f_i = |g_i|^(p/(q-p))`` attains
    ``(sum w_i |g_i|^(pq/(q-p)))^(1/p - 1/q)``.  Composition: the weights
    ``z_i`` of the pushforward take the place of ``|g_i|^p`` and
    ``f_i = z_i^(1/(q-p))``.  The quotient of the extremizer and the closed
    form are computed separately.
    """
    if not (q > p >= 1):
        raise ValueError("need q > p >= 1")
    w = np.asarray(atoms.weights)
    pts = np.asarray(atoms.points)
    gamma = q / (q - p)
    if isinstance(op, Multiplicative):
        a = np.abs(op.g(pts))
        M = float(a.max())
        if M == 0:
            res = DiscreteResult(0.0, 0.0, np.zeros_like(a))
            return res if full_output else res.value
        h = a / M
        f = h ** (p / (q - p))
        num = np.sum(w * (h * f) ** p) ** (1.0 / p)
        closed = np.sum(w * h ** (p * gamma)) ** (1.0 / p - 1.0 / q)
        scale_out = M
    elif isinstance(op, Composition):
        z = np.asarray(op.derivative(mu if mu is not None else atoms, atoms)(pts))
        M = float(z.max())
        if M == 0:
            res = DiscreteResult(0.0, 0.0, np.zeros_like(z))
            return res if full_output else res.value
        h = z / M
        f = h ** (1.0 / (q - p))
        num = np.sum(w * f ** p * h) ** (1.0 / p)
        closed = np.sum(w * h ** gamma) ** (1.0 / p - 1.0 / q)
        scale_out = M ** (1.0 / p)
    else:
        raise ValueError("discrete oracle covers multiplicative and composition operators")
    den = np.sum(w * f ** q) ** (1.0 / q)
    res = DiscreteResult(float(scale_out * num / den), float(scale_out * closed), f)
    return res if full_output else res.value


def random_step_function(rng: np.random.Generator, lo: float, hi: float) -> Piecewise:
    """Step function with 8-64 pieces and values log-uniform in [1e-3, 1e3]."""
    k = int(rng.integers(8, 65))
    inner = np.sort(rng.uniform(lo, hi, k - 1))
    bps = np.concatenate([[lo], inner, [hi]])
    keep = np.concatenate([[True], np.diff(bps) > 0])
    bps = bps[keep]
    vals = 10.0 ** rng.uniform(-3.0, 3.0, len(bps) - 1)
    return Piecewise(tuple(bps), tuple(Power(float(v), 0.0) for v in vals))


def random_probe(op: OperatorSpec, p: float, q: float, mu: MeasureSpace,
                 nu: Optional[MeasureSpace] = None, seed: int = 0, count: int = 100,
                 tol: float = DEFAULT_TOL) -> float:
    """Largest quotient over ``count`` seeded random step functions.

    Probe ``i`` draws from ``numpy.random.default_rng([seed, i])`` so each
    result is independent of evaluation order.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    nu = mu if nu is None else nu
    if not isinstance(nu, Interval):
        raise ValueError("random probes need an interval space")
    best = 0.0
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        f = random_step_function(rng, nu.a, nu.b)
        best = max(best, rayleigh_quotient(f, op, p, q, mu, nu, tol))
    return best


def indicator_necessity_probe(xi: Transform, mu: MeasureSpace, nu: Interval,
                              null_set: Tuple[float, float], p: float, q: float,
                              steps: int = 40, full_output: bool = False):
    """Sup of ``F(B)^(1/p) / nu(B)^(1/q)`` over sets ``B`` shrinking to ``null_set``.

    ``B_k = (lo - 2^-k, hi + 2^-k)`` intersected with ``nu``'s interval.
    Unbounded growth certifies that the distribution of ``xi`` has mass on a
    ``nu``-null set.
    """
    lo, hi = null_set
    quotients = []
    for k in range(1, steps + 1):
        h = 2.0 ** -k
        b_lo, b_hi = max(lo - h, nu.a), min(hi + h, nu.b)
        vb = nu.measure(b_lo, b_hi)
        if vb <= 0:
            continue
        fb = distribution_mass(xi, mu, (b_lo, b_hi))
        quotients.append(fb ** (1.0 / p) / vb ** (1.0 / q))
    sup = max(quotients) if quotients else 0.0
    return (sup, quotients) if full_output else sup
