"""Psi-functions, Grand Lebesgue Space norms and the transforms acting on them.

A Psi-function is a positive continuous ``psi`` on an exponent interval
``(A, B)``, set to ``+inf`` outside ``[A, B]``.  The GLS norm of ``f`` is
``sup_p |f|_p / psi(p)``.  Transformed Psi-functions (theta, tau, sigma) are
evaluated exactly and lazily through their defining infimum; values are
cached, and :meth:`PsiFunction.tabulate` produces tables for output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from ._optimize import golden_section, grid_extremum
from .extended import (
    DEFAULT_TOL, INF, FuncSpec, MeasureSpace, ext_div, check_exponent, lp_norm,
)
from .operators import composition_norm_power_map, multiplicative_norm_power_weight

FINITE_CUTOFF = 1e12
SUPPORT_RTOL = 1e-6
TABLE_NODES = 512


class EmptySupportError(ValueError):
    """A transformed Psi-function is infinite at every exponent."""


# ---------------------------------------------------------------------------
# Psi-functions

@dataclass(frozen=True, eq=False)
class PsiFunction:
    """Psi-function on ``[A, B]``; ``A == B`` marks the degenerate case."""

    A: float
    B: float
    func: Callable[[float], float]
    kind: str = "analytic"
    params: Dict = field(default_factory=dict)
    _cache: Dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not (1.0 <= self.A <= self.B):
            raise ValueError(f"need 1 <= A <= B, got ({self.A}, {self.B})")

    @property
    def degenerate(self) -> bool:
        return self.A == self.B

    @property
    def support(self) -> Tuple[float, float]:
        return self.A, self.B

    def __call__(self, p):
        if np.ndim(p):
            return np.array([self(float(v)) for v in np.ravel(p)]).reshape(np.shape(p))
        p = float(p)
        if math.isnan(p) or p < self.A or p > self.B:
            return INF
        if math.isinf(p):
            v = self.params.get("limit_at_inf", INF)
            return float(v)
        if p not in self._cache:
            self._cache[p] = float(self.func(p))
        return self._cache[p]

    def scaled(self, c: float) -> "PsiFunction":
        if not c > 0:
            raise ValueError("scale factor must be positive")
        lim = self.params.get("limit_at_inf", INF) * c
        return PsiFunction(self.A, self.B, lambda p, f=self: c * f(p), self.kind,
                           {**self.params, "scale": c * self.params.get("scale", 1.0),
                            "limit_at_inf": lim})

    def tabulate(self, n: int = TABLE_NODES, p_max: float = 1e3) -> Tuple[np.ndarray, np.ndarray]:
        """Values on ``n`` log-spaced exponents inside the support."""
        if self.degenerate:
            return np.array([self.A]), np.array([self(self.A)])
        hi = min(self.B, max(p_max, 2.0 * self.A))
        grid = np.exp(np.linspace(math.log(self.A), math.log(hi), n))
        grid[0], grid[-1] = self.A, hi
        return grid, self(grid)


def power_psi(m: float, A: float = 1.0, B: float = INF, c: float = 1.0) -> PsiFunction:
    """``psi(p) = c * p**(1/m)``."""
    if not m > 0:
        raise ValueError("m must be positive")
    return PsiFunction(A, B, lambda p: c * p ** (1.0 / m), "power",
                       {"m": m, "c": c})


def constant_psi(c: float = 1.0, A: float = 1.0, B: float = INF) -> PsiFunction:
    if not c > 0:
        raise ValueError("constant must be positive")
    return PsiFunction(A, B, lambda p: c, "constant", {"c": c, "limit_at_inf": c})


def degenerate_psi(r: float) -> PsiFunction:
    """Equal to 1 at ``p = r`` and ``+inf`` elsewhere; its GLS is ``L_r``."""
    r = check_exponent(r, "r")
    return PsiFunction(r, r, lambda p: 1.0, "degenerate", {"r": r})


def tabulated_psi(grid: Sequence[float], values: Sequence[float]) -> PsiFunction:
    """Monotone-safe cubic interpolation (PCHIP) of ``log psi`` on ``grid``."""
    g = np.asarray(grid, dtype=float)
    v = np.asarray(values, dtype=float)
    if g.ndim != 1 or g.size < 2 or g.shape != v.shape:
        raise ValueError("grid and values must be 1-d of equal length >= 2")
    if np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing")
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise ValueError("tabulated psi values must be positive and finite")
    interp = PchipInterpolator(g, np.log(v), extrapolate=False)
    return PsiFunction(float(g[0]), float(g[-1]), lambda p: float(np.exp(interp(p))),
                       "tabulated", {"grid": tuple(g), "values": tuple(v)})


def natural_psi(f: FuncSpec, space: MeasureSpace, A: float, B: float,
                tol: float = DEFAULT_TOL, probe: int = 16) -> PsiFunction:
    """``psi_f(p) = |f|_p`` on ``(A, B)``; under it ``f`` has GLS norm 1.

    Raises ``ValueError`` naming the first probe exponent where ``|f|_p``
    diverges.
    """
    A, B = check_exponent(A, "A"), check_exponent(B, "B")
    if not A < B:
        raise ValueError("need A < B")
    hi = B if math.isfinite(B) else A + 1e3
    for p in np.linspace(A, hi, probe + 2)[1:-1]:
        v = lp_norm(f, float(p), space, tol)
        if not math.isfinite(v):
            raise ValueError(f"|f|_p diverges at p={p:g} inside ({A:g}, {B:g})")
        if v <= 0:
            raise ValueError("natural psi needs a nonzero function")
    return PsiFunction(A, B, lambda p: lp_norm(f, p, space, tol), "natural",
                       {"A": A, "B": B})


def lp_support(f: FuncSpec, space: MeasureSpace, lo: float = 1.0, hi: float = 1e3,
               tol: float = DEFAULT_TOL) -> Tuple[float, float]:
    """Detected exponent range in ``[lo, hi]`` where ``|f|_p`` is finite."""
    return _detect_support(lambda p: lp_norm(f, p, space, tol), lo, hi)


# ---------------------------------------------------------------------------
# GLS norm

def _ratio(num: float, den: float) -> float:
    if math.isinf(den):
        return 0.0 if math.isfinite(num) else math.nan
    return ext_div(num, den)


def gls_norm(f: FuncSpec, psi: PsiFunction, space: MeasureSpace,
             p_grid_size: int = 64, tol: float = DEFAULT_TOL) -> float:
    """``sup_{p in (A, B)} |f|_p / psi(p)``.

    A clustered exponent grid locates the maximum and golden-section search
    refines it.  A degenerate ``psi`` gives ``|f|_r`` directly.
    """
    if p_grid_size < 16:
        raise ValueError("p_grid_size must be at least 16")
    if psi.degenerate:
        return lp_norm(f, psi.A, space, tol)

    def ratio(p):
        return _ratio(lp_norm(f, p, space, tol), psi(p))

    _, v = grid_extremum(ratio, psi.A, psi.B, n=p_grid_size, maximize=True,
                         edge=SUPPORT_RTOL, rtol=1e-9)
    return float(v)


# ---------------------------------------------------------------------------
# transforms

def _infimum_over_q(p: float, T: Callable[[float, float], float], psi: PsiFunction,
                    q_lo: float) -> float:
    """``inf T(p, q) psi(q)`` over ``q`` in ``(max(q_lo, A), B)``."""
    lo, hi = max(q_lo, psi.A), psi.B
    if not lo < hi:
        return INF

    def obj(q):
        pv = psi(q)
        if math.isinf(pv):
            return INF
        t = T(p, q)
        return INF if math.isinf(t) else t * pv

    v = grid_extremum(obj, lo, hi)[1]
    if math.isinf(hi):
        lim = psi(INF)
        if math.isfinite(lim):
            t_lim = T(p, INF)
            if math.isfinite(t_lim):
                v = min(v, t_lim * lim)
    return float(v)


def _detect_support(func: Callable[[float], float], lo: float, hi: float,
                    n: int = 33) -> Tuple[float, float]:
    """Finite region of ``func`` on ``[lo, hi)``, endpoints bisected to 1e-6."""
    span_hi = hi if math.isfinite(hi) else lo + 1e3
    grid = np.linspace(lo, span_hi, n)
    if math.isfinite(hi):
        grid[-1] = hi - SUPPORT_RTOL * (hi - lo)
    finite = [math.isfinite(func(p)) and func(p) < FINITE_CUTOFF for p in grid]
    if not any(finite):
        raise EmptySupportError("transform is infinite at every exponent")
    i0 = finite.index(True)
    i1 = len(finite) - 1 - finite[::-1].index(True)

    def ok(p):
        v = func(p)
        return math.isfinite(v) and v < FINITE_CUTOFF

    a = grid[i0]
    if i0 > 0:
        bad = grid[i0 - 1]
        while a - bad > SUPPORT_RTOL * max(1.0, a):
            mid = 0.5 * (a + bad)
            a, bad = (mid, bad) if ok(mid) else (a, mid)
    b = grid[i1]
    if i1 < n - 1:
        bad = grid[i1 + 1]
        while bad - b > SUPPORT_RTOL * max(1.0, b):
            mid = 0.5 * (b + bad)
            b, bad = (mid, bad) if ok(mid) else (b, mid)
    else:
        b = hi
    return float(a), float(b)


def _transformed(func, lo, hi, kind, params) -> PsiFunction:
    cache: Dict[float, float] = {}

    def cached(p):
        if p not in cache:
            cache[p] = func(p)
        return cache[p]

    a, b = _detect_support(cached, lo, hi)
    return PsiFunction(a, b, cached, kind, params)


def theta_transform(psi: PsiFunction, T: Callable[[float, float], float],
                    p_range: Optional[Tuple[float, float]] = None) -> PsiFunction:
    """``Theta(p) = inf_{q > p} T(p, q) psi(q)`` with its detected support.

    ``T(p, q)`` bounds an operator from ``L_q`` into ``L_p``.  Every ``f``
    then satisfies ``||W f||_Theta <= ||f||_psi``.  Raises
    :class:`EmptySupportError` when ``Theta`` is infinite everywhere.
    """
    lo, hi = p_range if p_range is not None else (1.0, psi.B)
    if psi.degenerate:
        q0 = psi.A

        def func(p):
            return T(p, q0) if p < q0 else INF
        return _transformed(func, lo, min(hi, q0), "theta", {"degenerate_q": q0})
    return _transformed(lambda p: _infimum_over_q(p, T, psi, p), lo, hi, "theta", {})


def tau_transform(psi: PsiFunction, t: float) -> PsiFunction:
    """Transform for the weight ``x**(-t)``: support inside ``[1, 1/t)``.

    ``tau(p) = inf_{q > p/(1-pt)} (1 - tpq/(q-p))^(1/q - 1/p) psi(q)``.
    """
    if not 0 < t < 1:
        raise ValueError("t must lie in (0, 1)")
    if math.isfinite(psi.B):
        raise ValueError("tau transform needs a psi with support unbounded above")

    def T(p, q):
        return multiplicative_norm_power_weight(t, p, q)

    def func(p):
        if p * t >= 1:
            return INF
        return _infimum_over_q(p, T, psi, p / (1.0 - p * t))

    return _transformed(func, max(1.0, psi.A), 1.0 / t, "tau", {"t": t})


def tau_upper_bound(psi: PsiFunction, t: float, p: float, sharp: bool = False) -> float:
    """Value of the tau integrand at ``q = 2p/(1-pt)``, an upper bound for ``tau(p)``.

    The exact factor is ``((1+pt)/(1-pt))^((1+pt)/(2p))``; the default
    exponent ``2p/(1+pt)`` is larger for ``p >= 1`` and gives a looser bound.
    """
    if not p * t < 1:
        return INF
    base = (1 + p * t) / (1 - p * t)
    e = (1 + p * t) / (2 * p) if sharp else 2 * p / (1 + p * t)
    return base ** e * psi(2 * p / (1 - p * t))


def sigma_transform(psi: PsiFunction, r: float) -> PsiFunction:
    """Transform for the power map ``x -> x**r`` on (0, 1).

    ``sigma(p) = inf_{q > max(p, pr)} S_r(p, q) psi(q)`` with ``S_r`` the
    sharp power-map constant.  Raises :class:`EmptySupportError` when no
    admissible ``q`` exists for any ``p >= 1``, e.g. ``q > 3p`` against a
    support inside ``(1, 2)``.
    """
    if not r > 0:
        raise ValueError("r must be positive")

    def T(p, q):
        return composition_norm_power_map(r, p, q)

    def func(p):
        return _infimum_over_q(p, T, psi, max(p, p * r))

    hi = psi.B / max(1.0, r)
    lo = max(1.0, psi.A / max(1.0, r)) if not psi.degenerate else 1.0
    if psi.degenerate:
        return theta_transform(psi, T, (1.0, psi.A))
    if not lo < hi:
        raise EmptySupportError(
            f"no exponent q > {r:g} p lies in the support ({psi.A:g}, {psi.B:g}) for any p >= 1")
    try:
        return _transformed(func, lo, hi, "sigma", {"r": r})
    except EmptySupportError:
        raise EmptySupportError(
            f"no exponent q > {r:g} p gives a finite bound inside ({psi.A:g}, {psi.B:g})") from None


def sigma_lambda_bound(psi: PsiFunction, r: float, p: float, lam: float) -> float:
    """``S_r(p, lam p) psi(lam p)`` for ``lam > max(1, r)``, an upper bound for ``sigma(p)``."""
    if not lam > max(1.0, r):
        raise ValueError("need lam > max(1, r)")
    return composition_norm_power_map(r, p, lam * p) * psi(lam * p)


@dataclass(frozen=True)
class Delta2Result:
    holds: bool
    C: float
    slope: float


def weak_delta2_check(psi: PsiFunction, r: float,
                      lambda_grid: Sequence[float] = (1.5, 2.0, 3.0, 4.0, 8.0),
                      p_grid: Optional[Sequence[float]] = None) -> Delta2Result:
    """Numeric surrogate for ``sigma_r[psi] <= C psi``.

    ``C`` is the largest ratio ``sigma(p)/psi(p)`` over ``p_grid``; the check
    holds when ``C`` is finite and the log-log slope of the ratio over the
    last decade of ``p_grid`` is below 0.05.  ``lambda_grid`` values above
    ``max(1, r)`` provide the explicit bound ``S_r(p, lam p) psi(lam p)``
    that is used where the exact transform is unavailable.
    """
    if not len(lambda_grid) or (p_grid is not None and not len(p_grid)):
        raise ValueError("grids must be nonempty")
    if p_grid is None:
        hi = psi.B / max(1.0, r) if math.isfinite(psi.B) else 1e3
        lo = max(1.0, psi.A)
        if not hi > lo:
            # no exponent p >= 1 has an admissible q > max(p, pr)
            return Delta2Result(False, INF, math.nan)
        p_grid = np.geomspace(lo, hi, 25)[:-1]
    p_grid = np.asarray(list(p_grid), dtype=float)
    lams = [l for l in lambda_grid if l > max(1.0, r)]
    try:
        sigma = sigma_transform(psi, r)
    except EmptySupportError:
        return Delta2Result(False, INF, math.nan)
    ratios = []
    for p in p_grid:
        s = sigma(p)
        if math.isinf(s) and lams:
            s = min(sigma_lambda_bound(psi, r, p, l) for l in lams)
        ratios.append(_ratio(s, psi(p)))
    ratios = np.asarray(ratios)
    if not np.all(np.isfinite(ratios)):
        return Delta2Result(False, INF, math.nan)
    C = float(ratios.max())
    tail = p_grid >= p_grid[-1] / 10.0
    if tail.sum() >= 2 and p_grid[tail][0] < p_grid[-1]:
        slope = float(np.polyfit(np.log(p_grid[tail]), np.log(ratios[tail]), 1)[0])
    else:
        slope = 0.0
    return Delta2Result(slope < 0.05, C, slope)


# ---------------------------------------------------------------------------
# convex conjugation and the Orlicz bridge

@dataclass(frozen=True)
class ConvexFunctionTable:
    """Values of a function on an increasing grid.

    ``boundary`` holds, for conjugate tables, ``""``, ``"lower"`` or
    ``"upper"`` per node: the sup was attained at that end of the source
    grid and the value is only a lower bound.
    """

    grid: Tuple[float, ...]
    values: Tuple[float, ...]
    convex: bool = True
    boundary: Tuple[str, ...] = ()

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise ValueError("grid and values must be 1-d of equal length >= 2")
        if np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", tuple(g))
        object.__setattr__(self, "values", tuple(v))
        if self.convex:
            fin = np.isfinite(v)
            if fin.sum() >= 3:
                s = np.diff(v[fin]) / np.diff(g[fin])
                scale = max(1.0, float(np.max(np.abs(s))))
                if np.any(np.diff(s) < -1e-12 * scale):
                    raise ValueError("table declared convex has decreasing slopes")

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], grid) -> "ConvexFunctionTable":
        g = np.asarray(grid, dtype=float)
        return cls(tuple(g), tuple(np.asarray(func(g), dtype=float)))

    def slopes(self) -> np.ndarray:
        g, v = np.asarray(self.grid), np.asarray(self.values)
        return np.diff(v) / np.diff(g)

    def __call__(self, x):
        return np.interp(x, self.grid, self.values)


def young_fenchel(nu: ConvexFunctionTable, v_grid: Optional[Sequence[float]] = None,
                  func: Optional[Callable[[float], float]] = None) -> ConvexFunctionTable:
    """``nu*(v) = sup_u (u v - nu(u))`` over the table's ``u``-grid.

    The default ``v``-grid is the set of segment slopes, on which conjugating
    twice returns the original table exactly.  With ``func`` the sup is
    refined by golden-section search between neighbouring ``u`` nodes.
    Nodes where the sup sits at an end of the ``u``-grid are flagged.
    """
    u = np.asarray(nu.grid)
    y = np.asarray(nu.values)
    if v_grid is None:
        s = nu.slopes()
        v = np.unique(np.concatenate([s, [s[0] - 1.0, s[-1] + 1.0]]))
    else:
        v = np.asarray(v_grid, dtype=float)
    vals, flags = [], []
    for vk in v:
        obj = u * vk - y
        i = int(np.argmax(obj))
        best = float(obj[i])
        if func is not None and 0 < i < len(u) - 1:
            _, fx = golden_section(lambda x: x * vk - func(x), u[i - 1], u[i + 1],
                                   maximize=True, rtol=1e-13)
            best = max(best, fx)
        vals.append(best)
        flags.append("lower" if i == 0 else "upper" if i == len(u) - 1 else "")
    return ConvexFunctionTable(tuple(v), tuple(vals), True, tuple(flags))


def nu_table(psi: PsiFunction, n: int = 256, p_max: float = 1e3) -> ConvexFunctionTable:
    """``nu(p) = p ln psi(p)`` tabulated on the support."""
    grid, vals = psi.tabulate(n, p_max)
    return ConvexFunctionTable(tuple(grid), tuple(grid * np.log(vals)))


def _check_nu_convex(psi: PsiFunction):
    try:
        nu_table(psi, 64)
    except ValueError as exc:
        raise ValueError("p ln psi(p) is not convex on the support; "
                         "the exponential Orlicz function is undefined") from exc


def _nu_star(psi: PsiFunction, v: float) -> float:
    def obj(p):
        pv = psi(p)
        return -INF if math.isinf(pv) else p * v - p * math.log(pv)

    if psi.degenerate:
        return obj(psi.A)
    _, val = grid_extremum(obj, psi.A, psi.B, maximize=True, rtol=1e-12)
    val = max(val, obj(psi.A))
    if math.isfinite(psi.B):
        val = max(val, obj(psi.B))
    return float(val)


def log_orlicz_function(psi: PsiFunction, u: float) -> float:
    """``ln N_psi(u)``; useful where ``N_psi`` itself overflows."""
    _check_nu_convex(psi)
    a = abs(float(u))
    c_log = _nu_star(psi, 1.0) - 2.0
    if a < math.e:
        return -INF if a == 0 else c_log + 2.0 * math.log(a)
    return _nu_star(psi, math.log(a))


def orlicz_function(psi: PsiFunction, u: float) -> float:
    """Exponential Orlicz function of ``psi``.

    ``N(u) = exp(nu*(ln|u|))`` for ``|u| >= e`` and ``C u^2`` below, with
    ``C = exp(nu*(1)) / e^2`` so that both pieces meet at ``|u| = e``.
    """
    lg = log_orlicz_function(psi, u)
    if lg > 709.0:
        return INF
    return math.exp(lg)


# ---------------------------------------------------------------------------
# fundamental function and linear substitutions

def fundamental_function(tau: PsiFunction, delta: float) -> float:
    """``sup_p delta^(1/p) / tau(p)``; the GLS norm of an indicator of measure ``delta``."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0:
        return 0.0
    if tau.degenerate:
        return delta ** (1.0 / tau.A) / tau(tau.A)

    def obj(p):
        return _ratio(delta ** (1.0 / p), tau(p))

    _, v = grid_extremum(obj, tau.A, tau.B, maximize=True, rtol=1e-12)
    ends = [obj(tau.A)]
    if math.isfinite(tau.B):
        ends.append(obj(tau.B))
    else:
        ends.append(_ratio(1.0, tau(INF)))
    return float(max([v] + [e for e in ends if not math.isnan(e)]))


def linear_substitution_gls_bound(f_norm: float, abs_det: float, zeta: PsiFunction,
                                  tau: PsiFunction) -> float:
    """``||f(Ax)||_zeta <= f_norm * fundamental_function(tau, 1/|det A|)``.

    Valid for a factorable ``psi = zeta / tau``; ``zeta`` and ``tau`` must
    share their support.
    """
    if not abs_det > 0:
        raise ValueError("determinant must be nonzero")
    if zeta.support != tau.support:
        raise ValueError(f"zeta support {zeta.support} differs from tau support {tau.support}")
    if f_norm == 0:
        return 0.0
    return f_norm * fundamental_function(tau, 1.0 / abs_det)
