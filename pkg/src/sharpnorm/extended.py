"""Extended-real helpers, measure spaces, function descriptors and L_p norms.

Norms and constants live in ``[0, +inf]`` and are plain Python floats with
``math.inf`` standing for divergence.  Power-law pieces are integrated in
closed form; everything else goes through QUADPACK (``scipy.integrate.quad``)
after a substitution that flattens endpoint singularities.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import integrate as _quadpack

from ._optimize import golden_section

INF = math.inf
DEFAULT_TOL = 1e-10
ABS_FLOOR = 1e-12

__all__ = [
    "INF", "DEFAULT_TOL", "IntegrationError", "NormReport",
    "FuncSpec", "Power", "Piecewise", "Truncated", "Table", "Opaque",
    "Interval", "Atoms", "MeasureSpace", "lebesgue",
    "ext_mul", "ext_div", "check_exponent", "conjugate_exponent",
    "multiply", "abs_power", "scale", "indicator",
    "integrate", "lp_norm", "ess_sup",
]


class IntegrationError(ArithmeticError):
    """Raised when an integrand is not finite inside the domain."""


# ---------------------------------------------------------------------------
# extended reals and exponents

def ext_mul(a: float, b: float) -> float:
    """Product on [0, inf] with the measure-theoretic rule 0 * inf = 0."""
    if a == 0 or b == 0:
        return 0.0
    return a * b


def ext_div(c: float, d: float) -> float:
    """Quotient with c / inf = 0 and c / 0 = inf for c > 0."""
    if math.isinf(d):
        return 0.0 if not math.isinf(c) else math.nan
    if d == 0:
        return 0.0 if c == 0 else INF
    return c / d


def check_exponent(p, name: str = "p") -> float:
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"exponent {name}={p!r} must lie in [1, inf]")
    return p


def conjugate_exponent(p: float) -> float:
    p = check_exponent(p)
    if p == 1.0:
        return INF
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class NormReport:
    value: float
    converged: bool = True
    abs_error_estimate: float = 0.0
    divergence_reason: Optional[str] = None

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


# ---------------------------------------------------------------------------
# function descriptors

class FuncSpec:
    """Base class for measurable-function descriptors.

    Subclasses implement ``_eval`` on float arrays.  Calling an instance on a
    scalar returns a float, on an array returns an array.
    """

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = self._eval(np.atleast_1d(arr))
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)


@dataclass(frozen=True)
class Power(FuncSpec):
    """``c * x**s`` for ``x > 0``."""

    c: float = 1.0
    s: float = 0.0

    def _eval(self, x):
        if self.s == 0:
            return np.full_like(x, self.c)
        out = self.c * np.power(np.where(x > 0, x, 0.0), self.s)
        return np.where(x < 0, np.nan, out)


@dataclass(frozen=True)
class Piecewise(FuncSpec):
    """Pieces on consecutive intervals ``[b_i, b_{i+1})``; zero outside."""

    breakpoints: Tuple[float, ...]
    pieces: Tuple[FuncSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if len(self.pieces) != len(self.breakpoints) - 1:
            raise ValueError("need exactly one piece per breakpoint interval")
        if any(b1 <= b0 for b0, b1 in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    def _eval(self, x):
        bps = np.asarray(self.breakpoints)
        idx = np.searchsorted(bps, x, side="right") - 1
        out = np.zeros_like(x)
        for i, piece in enumerate(self.pieces):
            mask = idx == i
            if mask.any():
                out[mask] = piece._eval(x[mask])
        return out


@dataclass(frozen=True)
class Truncated(FuncSpec):
    """``base(x) * [gate(x) <= level]`` with ``gate`` defaulting to ``base``."""

    base: FuncSpec
    level: float
    gate: Optional[FuncSpec] = None

    @property
    def gate_fn(self) -> FuncSpec:
        return self.base if self.gate is None else self.gate

    def _eval(self, x):
        keep = self.gate_fn._eval(x) <= self.level
        return np.where(keep, self.base._eval(x), 0.0)

    def region(self, a: float, b: float):
        """Sub-interval of (a, b) where the gate passes, if it is a power law.

        Returns ``None`` when the gate is not a power law, otherwise a
        (possibly empty) ``(lo, hi)`` pair.
        """
        g = self.gate_fn
        if not isinstance(g, Power):
            return None
        L = self.level
        if g.c <= 0:
            return (a, b) if L >= 0 else (a, a)
        if L <= 0:
            return (a, a)
        if g.s == 0:
            return (a, b) if g.c <= L else (a, a)
        x0 = (L / g.c) ** (1.0 / g.s)
        if g.s > 0:
            return (a, min(b, x0))
        return (max(a, x0), b)


@dataclass(frozen=True)
class Table(FuncSpec):
    """Piecewise-linear interpolation of tabulated values (clamped outside)."""

    grid: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.grid) != len(self.values) or not self.grid:
            raise ValueError("grid and values must be nonempty and of equal length")
        if any(g1 <= g0 for g0, g1 in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")

    def _eval(self, x):
        return np.interp(x, self.grid, self.values)


@dataclass(frozen=True, eq=False)
class Opaque(FuncSpec):
    """Arbitrary deterministic evaluator ``func(x)``."""

    func: Callable
    name: str = "opaque"

    def _eval(self, x):
        try:
            out = np.asarray(self.func(x), dtype=float)
            if out.shape != x.shape:
                raise ValueError
        except Exception:
            out = np.array([float(self.func(float(v))) for v in x])
        return out


def indicator(lo: float, hi: float, domain: Tuple[float, float] = (0.0, 1.0)) -> Piecewise:
    """Indicator of ``[lo, hi)`` as a piecewise-constant descriptor on ``domain``."""
    a, b = domain
    bps = sorted({a, max(a, min(lo, b)), max(a, min(hi, b)), b})
    pieces = []
    for x0, x1 in zip(bps, bps[1:]):
        mid = 0.5 * (x0 + x1)
        pieces.append(Power(1.0 if lo <= mid < hi else 0.0, 0.0))
    return Piecewise(tuple(bps), tuple(pieces))


def _product_eval(f: FuncSpec, g: FuncSpec):
    def h(x):
        u, v = f._eval(x), g._eval(x)
        with np.errstate(invalid="ignore"):
            return np.where((u == 0) | (v == 0), 0.0, u * v)
    return h


def multiply(f: FuncSpec, g: FuncSpec) -> FuncSpec:
    """Pointwise product, kept in closed form where the variants allow it."""
    if isinstance(f, Power) and isinstance(g, Power):
        return Power(f.c * g.c, f.s + g.s)
    if isinstance(f, Piecewise):
        return Piecewise(f.breakpoints, tuple(multiply(pc, g) for pc in f.pieces))
    if isinstance(g, Piecewise):
        return Piecewise(g.breakpoints, tuple(multiply(f, pc) for pc in g.pieces))
    if isinstance(f, Truncated):
        return Truncated(multiply(f.base, g), f.level, f.gate_fn)
    if isinstance(g, Truncated):
        return Truncated(multiply(f, g.base), g.level, g.gate_fn)
    return Opaque(_product_eval(f, g), name="product")


def scale(f: FuncSpec, c: float) -> FuncSpec:
    return multiply(Power(float(c), 0.0), f)


def abs_power(f: FuncSpec, a: float) -> FuncSpec:
    """``|f|**a`` for ``a > 0``."""
    if isinstance(f, Power):
        return Power(abs(f.c) ** a, f.s * a)
    if isinstance(f, Piecewise):
        return Piecewise(f.breakpoints, tuple(abs_power(pc, a) for pc in f.pieces))
    if isinstance(f, Truncated):
        return Truncated(abs_power(f.base, a), f.level, f.gate_fn)
    return Opaque(lambda x: np.abs(f._eval(x)) ** a, name="abs_power")


# ---------------------------------------------------------------------------
# measure spaces

@dataclass(frozen=True)
class Interval:
    """The interval (a, b) with measure ``density(x) dx``."""

    a: float = 0.0
    b: float = 1.0
    density: FuncSpec = field(default_factory=lambda: Power(1.0, 0.0))

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got ({self.a}, {self.b})")

    @property
    def is_lebesgue(self) -> bool:
        return isinstance(self.density, Power) and self.density == Power(1.0, 0.0)

    def total_mass(self, tol: float = DEFAULT_TOL) -> float:
        return integrate(Power(1.0, 0.0), self, tol).value

    def measure(self, lo: float, hi: float, tol: float = DEFAULT_TOL) -> float:
        lo, hi = max(lo, self.a), min(hi, self.b)
        if hi <= lo:
            return 0.0
        return integrate(Power(1.0, 0.0), Interval(lo, hi, self.density), tol).value


@dataclass(frozen=True)
class Atoms:
    """Finitely many atoms at ``points`` (default 0..n-1) with positive weights."""

    weights: Tuple[float, ...]
    points: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        if not w or any(not v > 0 for v in w):
            raise ValueError("atom weights must be positive")
        object.__setattr__(self, "weights", w)
        pts = tuple(float(i) for i in range(len(w))) if self.points is None else tuple(
            float(v) for v in self.points)
        if len(pts) != len(w):
            raise ValueError("points and weights differ in length")
        object.__setattr__(self, "points", pts)

    def total_mass(self, tol: float = DEFAULT_TOL) -> float:
        return float(sum(self.weights))


MeasureSpace = Union[Interval, Atoms]


def lebesgue(a: float = 0.0, b: float = 1.0) -> Interval:
    return Interval(float(a), float(b))


# ---------------------------------------------------------------------------
# integration

def _check_tol(tol):
    tol = float(tol)
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol!r}")
    return tol


@dataclass
class _Acc:
    value: float = 0.0
    error: float = 0.0
    converged: bool = True
    reason: Optional[str] = None

    def add(self, other: "_Acc"):
        self.value += other.value
        self.error += other.error
        self.converged &= other.converged
        self.reason = self.reason or other.reason


def _diverged(reason: str) -> _Acc:
    return _Acc(INF, INF, False, reason)


def _quad(func, a, b, tol, **kw) -> _Acc:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _quadpack.IntegrationWarning)
        out = _quadpack.quad(func, a, b, epsabs=ABS_FLOOR, epsrel=tol, limit=200,
                             full_output=1, **kw)
    val, err = out[0], out[1]
    ier_ok = len(out) == 3
    ok = ier_ok or err <= max(tol * abs(val), ABS_FLOOR)
    return _Acc(val, err, bool(ok and math.isfinite(val)))


def _integrate_power(c: float, s: float, a: float, b: float, tol: float) -> _Acc:
    """Closed-form integral of ``c x**s`` over ``(a, b)``, ``0 <= a < b <= inf``."""
    if c == 0 or b <= a:
        return _Acc()
    if a < 0:
        raise IntegrationError("power-law integrand on an interval reaching x < 0")
    if a == 0 and s <= -1:
        return _diverged(f"local exponent {s:g} <= -1 at x=0")
    if math.isinf(b) and s >= -1:
        return _diverged(f"decay exponent {s:g} >= -1 at infinity")
    e = s + 1.0
    if a == 0:
        return _Acc(c * b ** e / e)
    if math.isinf(b):
        return _Acc(c * a ** e / -e)
    # a^e (exp(e ln(b/a)) - 1) / e stays accurate as e -> 0
    lr = math.log(b / a)
    if e == 0:
        return _Acc(c * lr)
    return _Acc(c * a ** e * math.expm1(e * lr) / e)


def _shell_divergence(func, end: float, width: float, inward: float) -> bool:
    """Heuristic: shell masses near ``end`` fail to shrink across 4 generations.

    The shell ``[10^-(k+1), 10^-k] * width`` away from ``end`` has mass
    roughly ``|f|`` at its geometric centre times its length.
    """
    masses = []
    for k in range(2, 14):
        d = width * 10.0 ** -(k + 0.5)
        try:
            v = abs(float(func(end + inward * d)))
        except IntegrationError:
            return True
        masses.append(v * 0.9 * width * 10.0 ** -k)
    grow = 0
    for m0, m1 in zip(masses, masses[1:]):
        grow = grow + 1 if m1 >= 0.999 * m0 and m1 > 0 else 0
        if grow >= 4:
            return True
    return False


def _integrate_generic(f: FuncSpec, a: float, b: float, tol: float) -> _Acc:
    def g(x):
        v = float(f(x))
        if not math.isfinite(v):
            if x <= a or x >= b:
                return 0.0
            raise IntegrationError(f"integrand is {v} at interior point x={x!r}")
        return v

    if math.isinf(a) or math.isinf(b):
        acc = _quad(g, a, b, tol)
        if not acc.converged:
            acc.reason = "quadrature did not converge on an unbounded interval"
        return acc

    k = 4.0
    m = 0.5 * (a + b)
    h_left, h_right = m - a, b - m

    def left(u):
        return g(a + h_left * u ** k) * k * h_left * u ** (k - 1)

    def right(u):
        return g(b - h_right * u ** k) * k * h_right * u ** (k - 1)

    acc = _Acc()
    for part, end, inward, width in ((left, a, 1.0, h_left), (right, b, -1.0, h_right)):
        if _shell_divergence(g, end, width, inward):
            return _diverged(f"integrand mass does not shrink near x={end:g}")
        acc.add(_quad(part, 0.0, 1.0, tol))
    return acc


def _integrate_on(f: FuncSpec, a: float, b: float, tol: float) -> _Acc:
    if b <= a:
        return _Acc()
    if isinstance(f, Power):
        return _integrate_power(f.c, f.s, a, b, tol)
    if isinstance(f, Piecewise):
        acc = _Acc()
        bps = f.breakpoints
        for (x0, x1), piece in zip(zip(bps, bps[1:]), f.pieces):
            lo, hi = max(a, x0), min(b, x1)
            if hi > lo:
                acc.add(_integrate_on(piece, lo, hi, tol))
        return acc
    if isinstance(f, Truncated):
        region = f.region(a, b)
        if region is not None:
            return _integrate_on(f.base, region[0], region[1], tol)
    return _integrate_generic(f, a, b, tol)


def integrate(f: FuncSpec, space: MeasureSpace, tol: float = DEFAULT_TOL) -> NormReport:
    """Integral of ``f`` against the measure of ``space``.

    Divergence is reported as ``value=inf`` with ``converged=False`` and a
    ``divergence_reason``; slow or failed convergence of a finite integral
    keeps the finite value, ``converged=False`` and no reason.
    """
    tol = _check_tol(tol)
    if isinstance(space, Atoms):
        vals = f(np.asarray(space.points))
        if np.isnan(vals).any():
            raise IntegrationError("integrand is nan at an atom")
        if np.isinf(vals).any():
            return NormReport(INF, False, INF, "infinite value on an atom of positive mass")
        return NormReport(float(np.dot(space.weights, vals)), True, 0.0)
    integrand = f if space.is_lebesgue else multiply(f, space.density)
    acc = _integrate_on(integrand, space.a, space.b, tol)
    if acc.reason is not None and math.isinf(acc.value):
        return NormReport(INF, False, INF, acc.reason)
    return NormReport(acc.value, acc.converged, acc.error, acc.reason)


# ---------------------------------------------------------------------------
# essential supremum and L_p norms

def _power_sup(c: float, s: float, a: float, b: float) -> float:
    if b <= a or c == 0:
        return 0.0
    if s == 0:
        return abs(c)
    x = b if s > 0 else a
    if x == 0:
        return INF
    if math.isinf(x):
        return INF if s > 0 else 0.0
    return abs(c) * x ** s


def _logit_nodes(a: float, b: float, n: int) -> np.ndarray:
    u = np.linspace(-12.0, 12.0, n)
    s = 1.0 / (1.0 + np.exp(-u))
    if math.isinf(b):
        base = max(abs(a), 1.0)
        return a + base * s / (1.0 - s)
    return a + (b - a) * s


def _sampled_sup(f: FuncSpec, a: float, b: float) -> float:
    xs = _logit_nodes(a, b, 4096)
    vals = np.abs(f(xs))
    vals = np.where(np.isnan(vals), -INF, vals)
    i = int(np.argmax(vals))
    best = float(vals[i])
    if math.isinf(best):
        return INF
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    if hi > lo:
        x, v = golden_section(lambda t: abs(float(f(t))), lo, hi, maximize=True)
        best = max(best, v)
    return best


def _sup_on(f: FuncSpec, a: float, b: float) -> float:
    if b <= a:
        return 0.0
    if isinstance(f, Power):
        return _power_sup(f.c, f.s, a, b)
    if isinstance(f, Piecewise):
        bps = f.breakpoints
        return max([_sup_on(pc, max(a, x0), min(b, x1))
                    for (x0, x1), pc in zip(zip(bps, bps[1:]), f.pieces)] + [0.0])
    if isinstance(f, Truncated):
        region = f.region(a, b)
        if region is not None:
            return _sup_on(f.base, *region)
    if isinstance(f, Table):
        g = np.asarray(f.grid)
        inside = np.abs(np.asarray(f.values)[(g > a) & (g < b)])
        ends = np.abs(f(np.array([max(a, g[0]), min(b, g[-1])])))
        return float(max(inside.max(initial=0.0), ends.max()))
    return _sampled_sup(f, a, b)


def ess_sup(f: FuncSpec, space: MeasureSpace) -> float:
    """Essential supremum of ``|f|``.

    Exact for power-law, piecewise and truncated-power descriptors.  For
    opaque evaluators this is a sampled lower bound (4096 points plus a
    golden-section polish around the largest sample).
    """
    if isinstance(space, Atoms):
        return float(np.max(np.abs(f(np.asarray(space.points)))))
    return _sup_on(f, space.a, space.b)


def _magnitude(f: FuncSpec, space: MeasureSpace) -> float:
    # a scale M with |f/M|^p free of overflow and underflow
    m = ess_sup(f, space)
    if math.isfinite(m) and m > 0:
        return m
    if isinstance(f, Power) and f.c != 0:
        return abs(f.c)
    if isinstance(f, Piecewise):
        cs = [abs(pc.c) for pc in f.pieces if isinstance(pc, Power) and pc.c != 0]
        if cs:
            return max(cs)
    return 1.0


def lp_norm(f: FuncSpec, p: float, space: MeasureSpace, tol: float = DEFAULT_TOL,
            full_output: bool = False):
    """``(int |f|^p dmu)^(1/p)``, or the essential supremum for ``p = inf``."""
    p = check_exponent(p)
    if math.isinf(p):
        rep = NormReport(ess_sup(f, space))
    else:
        scale_by = _magnitude(f, space) if p > 64 else 1.0
        g = abs_power(scale(f, 1.0 / scale_by) if scale_by != 1.0 else f, p)
        r = integrate(g, space, tol)
        if math.isinf(r.value):
            rep = NormReport(INF, False, INF, r.divergence_reason)
        else:
            val = max(r.value, 0.0) ** (1.0 / p)
            err = (val * r.abs_error_estimate / (p * r.value)) if r.value > 0 else 0.0
            rep = NormReport(scale_by * val, r.converged, scale_by * err, r.divergence_reason)
    return rep if full_output else rep.value
