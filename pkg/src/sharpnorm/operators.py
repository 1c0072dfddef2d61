"""Norms and bounds for composition, multiplicative and product operators.

Conventions: an operator maps ``L_q`` into ``L_p`` with ``p <= q``.  For the
composition operator ``f -> f o xi`` the sharp constant is

    K_z(p, q) = (int z^(q/(q-p)) dnu)^(1/p - 1/q),

``z`` being the density of the distribution of ``xi``.  For multiplication
by ``g`` it is ``|g|_{pq/(q-p)}``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from ._optimize import grid_extremum
from .extended import (
    DEFAULT_TOL, INF, FuncSpec, MeasureSpace, NormReport, check_exponent, ess_sup,
    integrate, lp_norm,
)
from .pushforward import Derivative, NotAbsolutelyContinuous, Transform, radon_nikodym


# ---------------------------------------------------------------------------
# operator descriptors

@dataclass(frozen=True)
class Composition:
    """``f -> f o xi``; ``z`` may be supplied instead of (or besides) ``xi``."""

    xi: Optional[Transform] = None
    z: Optional[Derivative] = None

    def derivative(self, mu: MeasureSpace, nu: MeasureSpace) -> Derivative:
        if self.z is not None:
            return self.z
        if self.xi is None:
            raise ValueError("composition operator needs a transform or a derivative")
        return radon_nikodym(self.xi, mu, nu)


@dataclass(frozen=True)
class Multiplicative:
    """``f -> g * f``."""

    g: FuncSpec


@dataclass(frozen=True)
class Product:
    """``f -> g * (f o xi)``.

    ``factored_h`` declares ``g = h o xi``; ``independent`` declares that
    ``g`` and ``f o xi`` are independent random variables under ``mu``.
    """

    g: FuncSpec
    xi: Transform
    independent: bool = False
    factored_h: Optional[FuncSpec] = None


@dataclass(frozen=True)
class LinearSubstitution:
    """``f -> f(A x)`` on ``R^dim`` with ``|det A| = abs_det``."""

    dim: int
    abs_det: float

    def __post_init__(self):
        if not self.abs_det > 0:
            raise ValueError("a linear substitution needs a nonzero determinant")


OperatorSpec = Union[Composition, Multiplicative, Product, LinearSubstitution]


@dataclass(frozen=True)
class InfimumResult:
    value: float
    argmin: float


def _check_pair(p, q, allow_equal=True):
    p, q = check_exponent(p, "p"), check_exponent(q, "q")
    if q < p or (q == p and not allow_equal):
        raise ValueError(f"need p <= q for an L_q -> L_p norm, got p={p}, q={q}")
    return p, q


# ---------------------------------------------------------------------------
# composition operators

def composition_norm(z: Derivative, p: float, q: float, nu: MeasureSpace,
                     tol: float = DEFAULT_TOL, full_output: bool = False):
    """Sharp ``L_q(nu) -> L_p(mu)`` norm of a composition operator."""
    p, q = _check_pair(p, q)
    if isinstance(z, NotAbsolutelyContinuous):
        rep = NormReport(INF, False, INF, z.reason)
    elif math.isinf(p):
        rep = NormReport(1.0 if ess_sup(z, nu) > 0 else 0.0)
    elif q == p:
        rep = NormReport(ess_sup(z, nu) ** (1.0 / p))
    elif math.isinf(q):
        r = integrate(z, nu, tol)
        rep = _root(r, 1.0 / p)
    else:
        # K = |z|_gamma^(1/p) with gamma = q/(q-p)
        r = lp_norm(z, q / (q - p), nu, tol, full_output=True)
        rep = _root(r, 1.0 / p)
    return rep if full_output else rep.value


def _root(r: NormReport, e: float) -> NormReport:
    if math.isinf(r.value):
        return NormReport(INF, False, INF, r.divergence_reason)
    v = max(r.value, 0.0) ** e
    err = e * v * r.abs_error_estimate / r.value if r.value > 0 else 0.0
    return NormReport(v, r.converged, err, r.divergence_reason)


def composition_norm_power_map(r: float, p: float, q: float) -> float:
    """Closed form of ``K_z(p, q)`` for ``x -> x**r`` on (0, 1) with Lebesgue measure.

    ``r^(-1/p) * (r (q - p) / (q - p r))^(1/p - 1/q)``, finite iff ``q > p r``
    or ``r <= 1``.
    """
    r = float(r)
    if not r > 0:
        raise ValueError("power map exponent must be positive")
    p, q = _check_pair(p, q)
    if r == 1.0:
        return 1.0
    if math.isinf(q):
        return 1.0
    if q == p:
        return r ** (-1.0 / p) if r < 1 else INF
    if q <= p * r:
        return INF
    return r ** (-1.0 / p) * (r * (q - p) / (q - p * r)) ** (1.0 / p - 1.0 / q)


def hard_case_asymptotic(r: float, p: float, q: float) -> float:
    """Leading behaviour of the power-map constant as ``q`` decreases to ``p r``."""
    p, q = _check_pair(p, q)
    if not r > 1:
        raise ValueError("the asymptotic concerns r > 1")
    if not q > p * r:
        raise ValueError(f"need q > p r = {p * r}, got q={q}")
    e = (r - 1.0) / (p * r)
    return r ** (-1.0 / p) * (p * r * (r - 1.0) / (q - p * r)) ** e


# ---------------------------------------------------------------------------
# multiplicative operators

def multiplicative_norm(g: FuncSpec, p: float, q: float, nu: MeasureSpace,
                        tol: float = DEFAULT_TOL, full_output: bool = False):
    """Sharp ``L_q -> L_p`` norm of multiplication by ``g``.

    ``q > p`` gives ``|g|_{pq/(q-p)}``; ``q == p`` gives ``ess sup |g|``;
    ``q < p`` is unbounded.
    """
    p, q = check_exponent(p, "p"), check_exponent(q, "q")
    if q < p:
        rep = NormReport(INF, False, INF, "q < p: multiplication is unbounded from L_q to L_p")
    elif q == p:
        rep = NormReport(ess_sup(g, nu))
    else:
        s = p if math.isinf(q) else p * q / (q - p)
        rep = lp_norm(g, s, nu, tol, full_output=True)
    return rep if full_output else rep.value


def multiplicative_norm_power_weight(t: float, p: float, q: float) -> float:
    """Closed form for the weight ``y**(-t)`` on (0, 1): ``(1 - tpq/(q-p))^(1/q-1/p)``."""
    p, q = _check_pair(p, q)
    if q == p:
        return 1.0 if t <= 0 else INF
    if math.isinf(q):
        return (1.0 - t * p) ** (-1.0 / p) if t * p < 1 else INF
    a = t * p * q / (q - p)
    if a >= 1:
        return INF
    return (1.0 - a) ** (1.0 / q - 1.0 / p)


# ---------------------------------------------------------------------------
# product operators

def product_norm_bound(spec: Product, p: float, q: float, mu: MeasureSpace,
                       nu: MeasureSpace, tol: float = DEFAULT_TOL,
                       full_output: bool = False):
    """Upper bound ``inf_l Q_g(p, l) K_z(l, q)`` over ``l in (p, q)``.

    Multiplication by ``g`` is applied after composition, so ``g`` acts
    ``L_l -> L_p`` on ``mu`` and ``f o xi`` is bounded ``L_q -> L_l``.
    """
    p, q = _check_pair(p, q, allow_equal=False)
    z = radon_nikodym(spec.xi, mu, nu)

    def obj(l):
        k = composition_norm(z, l, q, nu, tol)
        if math.isinf(k):
            return INF
        return multiplicative_norm(spec.g, p, l, mu, tol) * k

    hi = q if math.isfinite(q) else 1e12
    l_star, v = grid_extremum(obj, p, hi)
    res = InfimumResult(float(v), float(l_star))
    return res if full_output else res.value


def product_particular_bound(h: FuncSpec, z: Derivative, p: float, q: float,
                             nu: MeasureSpace, tol: float = DEFAULT_TOL) -> float:
    """Three-factor Hölder bound for ``f -> h(xi) f(xi)``.

    Minimises ``|h|_{p theta} * |z|_tau^(1/p)`` over ``1/theta + 1/tau =
    (q - p)/q`` with ``theta, tau > 1``.  An upper bound, not claimed sharp.
    """
    p, q = _check_pair(p, q, allow_equal=False)
    if isinstance(z, NotAbsolutelyContinuous):
        return INF
    width = (q - p) / q

    def obj(s):
        hz = lp_norm(h, p / s, nu, tol)
        if math.isinf(hz):
            return INF
        tau = 1.0 / (width - s)
        return hz * lp_norm(z, tau, nu, tol) ** (1.0 / p)

    return grid_extremum(obj, 0.0, width)[1]


def independent_product_norm(spec: Product, p: float, q: float, mu: MeasureSpace,
                             nu: MeasureSpace, tol: float = DEFAULT_TOL) -> float:
    """``|g|_p * K_z(p, q)``, valid only when ``g`` and ``f o xi`` are independent."""
    if not spec.independent:
        raise ValueError("the factorised norm needs the independence hypothesis "
                         "(set independent=True)")
    p, q = _check_pair(p, q)
    z = radon_nikodym(spec.xi, mu, nu)
    k = composition_norm(z, p, q, nu, tol)
    gp = lp_norm(spec.g, p, mu, tol)
    if gp == 0 or k == 0:
        return 0.0
    return gp * k


# ---------------------------------------------------------------------------
# closed-form helpers

def min_identity(a: float, b: float, gamma: float, beta: float) -> Tuple[float, float]:
    """Minimiser and minimum of ``(x - a)^(-gamma) (b - x)^(-beta)`` on ``(a, b)``."""
    if not a < b:
        raise ValueError("need a < b")
    if not (gamma > 0 and beta > 0):
        raise ValueError("exponents must be positive")
    s = beta + gamma
    x_star = (gamma * b + beta * a) / s
    value = math.exp(s * math.log(s) - beta * math.log(beta) - gamma * math.log(gamma)
                     - s * math.log(b - a))
    return x_star, value


def transfer_candidate_l0(r: float, t: float, p: float, q: float) -> float:
    """Closed-form starting point for the transfer-function search."""
    return (p * p * r * (1 + q * t) + q * (r - 1)) / ((1 + q * t) * (r - 1 + t * p * r))


def transfer_interval(r: float, t: float, p: float, q: float) -> Tuple[float, float]:
    """Open interval of intermediate exponents ``l`` giving a finite product."""
    lo = p / (1.0 - t * p) if t * p < 1 else INF
    hi = q / r if r > 1 else q
    return max(lo, p), hi


def transfer_function(r: float, t: float, p: float, q: float,
                      full_output: bool = False):
    """Bound for ``f -> x^(-t) f(x^r)`` from ``L_q(0,1)`` into ``L_p(0,1)``.

    ``inf_l Q(p, l) S_r(l, q)`` with ``Q`` the weight constant and ``S_r``
    the power-map constant.  Returns ``inf`` (with a warning) when the
    feasible interval is empty.  For ``r < 1`` a warning is issued if the
    result exceeds ``r^(-1/p) e^(-1/q)``.
    """
    p, q = _check_pair(p, q, allow_equal=False)
    if not 0 < t < 1:
        raise ValueError("weight exponent t must lie in (0, 1)")
    lo, hi = transfer_interval(r, t, p, q)
    if not lo < hi:
        warnings.warn(f"empty feasible interval ({lo:g}, {hi:g}) for the intermediate exponent",
                      RuntimeWarning)
        res = InfimumResult(INF, math.nan)
        return res if full_output else res.value

    def obj(l):
        s = composition_norm_power_map(r, l, q)
        return INF if math.isinf(s) else multiplicative_norm_power_weight(t, p, l) * s

    cands = []
    if r > 1:
        cands.append(transfer_candidate_l0(r, t, p, q))
    l_star, v = grid_extremum(obj, lo, hi, candidates=cands)
    if r < 1 and v > r ** (-1.0 / p) * math.exp(-1.0 / q):
        warnings.warn("transfer function exceeds r^(-1/p) e^(-1/q) for these parameters",
                      RuntimeWarning)
    res = InfimumResult(float(v), float(l_star))
    return res if full_output else res.value


def transfer_envelope(r: float, t: float, p: float, q: float) -> float:
    """Order-of-growth model of the transfer function near interval collapse.

    Near the ends of the feasible interval the weight factor behaves like
    ``(l - lo)^(-t)`` and the power-map factor like ``(hi - l)^(-(r-1)/q)``;
    the minimum of that model product is given by :func:`min_identity`.
    """
    if not r > 1:
        raise ValueError("the envelope concerns r > 1")
    lo, hi = transfer_interval(r, t, p, q)
    if not lo < hi:
        return INF
    return min_identity(lo, hi, t, (r - 1.0) / q)[1]


def linear_substitution_norm(abs_det: float, p: float) -> float:
    """``L_p -> L_p`` norm of ``f -> f(Ax)``: ``|det A|^(-1/p)``."""
    if not abs_det > 0:
        raise ValueError("determinant must be nonzero")
    p = check_exponent(p)
    return 1.0 if math.isinf(p) else abs_det ** (-1.0 / p)
