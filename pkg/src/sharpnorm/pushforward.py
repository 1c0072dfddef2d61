"""Distribution measures of transformations and their Radon-Nikodym derivatives."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .extended import (
    DEFAULT_TOL, Atoms, FuncSpec, Interval, MeasureSpace, Opaque, Piecewise,
    Power, Table, Truncated, integrate, lebesgue, multiply,
)


class UnsupportedTransformError(ValueError):
    """The transform lacks the structure an operation needs (e.g. inverses)."""


# ---------------------------------------------------------------------------
# transforms

@dataclass(frozen=True)
class PowerMap:
    """``x -> x**r`` on the positive half-line."""

    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("power map exponent must be positive")

    def __call__(self, x):
        return np.power(x, self.r)


@dataclass(frozen=True, eq=False)
class Branch:
    """A strictly monotone piece of a transform on ``domain``."""

    domain: Tuple[float, float]
    forward: Callable
    inverse: Optional[Callable] = None
    inverse_derivative: Optional[Callable] = None


@dataclass(frozen=True, eq=False)
class MonotoneMap:
    branches: Tuple[Branch, ...]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, np.nan)
        for br in self.branches:
            m = (x >= br.domain[0]) & (x < br.domain[1])
            if m.any():
                out[m] = br.forward(x[m])
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class PiecewiseConstantMap:
    """Sends each ``[b_i, b_{i+1})`` to the single value ``values[i]``."""

    breakpoints: Tuple[float, ...]
    values: Tuple[float, ...]

    def __call__(self, x):
        idx = np.clip(np.searchsorted(self.breakpoints, x, side="right") - 1,
                      0, len(self.values) - 1)
        return np.asarray(self.values)[idx]


@dataclass(frozen=True)
class AtomMap:
    """Sends atom ``i`` of the source to atom ``targets[i]`` of the target."""

    targets: Tuple[int, ...]


@dataclass(frozen=True)
class MeasurePreserving:
    """A map declared measure preserving; its derivative is taken on trust."""

    forward: Optional[Callable] = None


@dataclass(frozen=True, eq=False)
class OpaqueMap:
    forward: Callable


Transform = Union[PowerMap, MonotoneMap, PiecewiseConstantMap, AtomMap,
                  MeasurePreserving, OpaqueMap]


def constant_map(c: float, domain: Tuple[float, float] = (0.0, 1.0)) -> PiecewiseConstantMap:
    return PiecewiseConstantMap(tuple(domain), (float(c),))


# ---------------------------------------------------------------------------
# derivatives

@dataclass(frozen=True)
class NotAbsolutelyContinuous:
    """Stands in for the formal value ``z = +inf``."""

    reason: str = "distribution measure is not absolutely continuous"


Derivative = Union[FuncSpec, NotAbsolutelyContinuous]


def is_absolutely_continuous(z: Derivative) -> bool:
    return not isinstance(z, NotAbsolutelyContinuous)


# ---------------------------------------------------------------------------
# operations

def _interval_mass(mu: Interval, lo: float, hi: float, tol: float) -> float:
    lo, hi = max(lo, mu.a), min(hi, mu.b)
    if hi <= lo:
        return 0.0
    if mu.is_lebesgue:
        return hi - lo
    return integrate(Power(1.0, 0.0), Interval(lo, hi, mu.density), tol).value


def _branch_preimage(br: Branch, lo: float, hi: float):
    f0, f1 = float(br.forward(br.domain[0])), float(br.forward(br.domain[1]))
    increasing = f1 >= f0
    rlo, rhi = min(f0, f1), max(f0, f1)
    lo, hi = max(lo, rlo), min(hi, rhi)
    if hi <= lo:
        return None
    x0, x1 = float(br.inverse(lo)), float(br.inverse(hi))
    return (x0, x1) if increasing else (x1, x0)


def distribution_mass(xi: Transform, mu: MeasureSpace, B: Tuple[float, float],
                      tol: float = DEFAULT_TOL) -> float:
    """``mu(xi^{-1}(B))`` for an interval ``B`` (or a set of atom indices)."""
    lo, hi = B
    if isinstance(xi, PowerMap):
        if not isinstance(mu, Interval) or mu.a < 0:
            raise UnsupportedTransformError("power maps act on intervals in [0, inf)")
        lo, hi = max(lo, 0.0), max(hi, 0.0)
        return _interval_mass(mu, lo ** (1.0 / xi.r), hi ** (1.0 / xi.r), tol)
    if isinstance(xi, MonotoneMap):
        total = 0.0
        for br in xi.branches:
            if br.inverse is None:
                raise UnsupportedTransformError("monotone branch without an inverse")
            pre = _branch_preimage(br, lo, hi)
            if pre is not None:
                total += _interval_mass(mu, *pre, tol)
        return total
    if isinstance(xi, PiecewiseConstantMap):
        total = 0.0
        bps = xi.breakpoints
        for (x0, x1), v in zip(zip(bps, bps[1:]), xi.values):
            if lo <= v < hi:
                total += _interval_mass(mu, x0, x1, tol)
        return total
    if isinstance(xi, MeasurePreserving):
        # the distribution is the target measure, taken here to equal mu
        if not isinstance(mu, Interval):
            raise UnsupportedTransformError("measure-preserving maps need an interval measure")
        return _interval_mass(mu, lo, hi, tol)
    if isinstance(xi, AtomMap):
        if not isinstance(mu, Atoms):
            raise UnsupportedTransformError("atom maps need an atomic source measure")
        return float(sum(w for w, t in zip(mu.weights, xi.targets) if lo <= t < hi))
    raise UnsupportedTransformError(f"cannot invert a transform of type {type(xi).__name__}")


def radon_nikodym(xi: Transform, mu: MeasureSpace, nu: MeasureSpace,
                  tol: float = DEFAULT_TOL) -> Derivative:
    """Density ``z = dF_xi / dnu`` of the distribution of ``xi`` under ``mu``.

    Power maps between power-law densities give a closed-form power law.
    Monotone branches use the inverse-derivative formula, falling back to
    central differences of the distribution function when the branch has
    no ``inverse_derivative``.  Constant pieces of positive mass produce
    :class:`NotAbsolutelyContinuous`.
    """
    if isinstance(xi, MeasurePreserving):
        return Power(1.0, 0.0)
    if isinstance(xi, AtomMap):
        if not (isinstance(mu, Atoms) and isinstance(nu, Atoms)):
            raise UnsupportedTransformError("atom maps need atomic measures on both sides")
        mass = np.zeros(len(nu.weights))
        for w, t in zip(mu.weights, xi.targets):
            if not 0 <= t < len(nu.weights):
                return NotAbsolutelyContinuous(f"atom target {t} carries no nu-mass")
            mass[t] += w
        return Table(nu.points, tuple(mass / np.asarray(nu.weights)))
    if not (isinstance(mu, Interval) and isinstance(nu, Interval)):
        raise UnsupportedTransformError("interval transforms need interval measures")
    if isinstance(xi, PiecewiseConstantMap):
        bps = xi.breakpoints
        for (x0, x1), v in zip(zip(bps, bps[1:]), xi.values):
            if _interval_mass(mu, x0, x1, tol) > 0:
                return NotAbsolutelyContinuous(
                    f"a set of positive mu-measure is mapped onto the nu-null point {v:g}")
        return Power(0.0, 0.0)
    if isinstance(xi, PowerMap):
        return _power_map_derivative(xi.r, mu, nu)
    if isinstance(xi, MonotoneMap):
        return _monotone_derivative(xi, mu, nu, tol)
    raise UnsupportedTransformError(f"cannot differentiate a transform of type {type(xi).__name__}")


def _power_map_derivative(r: float, mu: Interval, nu: Interval) -> FuncSpec:
    if mu.a < 0:
        raise UnsupportedTransformError("power maps act on intervals in [0, inf)")
    lo, hi = mu.a ** r, mu.b ** r
    if isinstance(mu.density, Power) and isinstance(nu.density, Power):
        d, k = mu.density.c, mu.density.s
        e, m = nu.density.c, nu.density.s
        if e <= 0 and d > 0:
            return NotAbsolutelyContinuous("nu-density vanishes where the pushforward has mass")
        z = Power(d / (r * e), k / r + 1.0 / r - 1.0 - m)
    else:
        def zf(y, r=r):
            x = np.power(y, 1.0 / r)
            jac = np.power(y, 1.0 / r - 1.0) / r
            return mu.density(x) * jac / nu.density(y)
        z = Opaque(zf, name=f"z[x^{r:g}]")
    if lo <= nu.a and hi >= nu.b:
        return z
    bps = sorted({nu.a, max(nu.a, min(lo, nu.b)), max(nu.a, min(hi, nu.b)), nu.b})
    pieces = tuple(z if lo <= 0.5 * (x0 + x1) < hi else Power(0.0, 0.0)
                   for x0, x1 in zip(bps, bps[1:]))
    return Piecewise(tuple(bps), pieces)


def _monotone_derivative(xi: MonotoneMap, mu: Interval, nu: Interval, tol: float) -> FuncSpec:
    for br in xi.branches:
        if br.inverse is None:
            raise UnsupportedTransformError("monotone branch without an inverse")

    def zf(y):
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.zeros_like(y)
        for br in xi.branches:
            f0, f1 = float(br.forward(br.domain[0])), float(br.forward(br.domain[1]))
            rlo, rhi = min(f0, f1), max(f0, f1)
            m = (y > rlo) & (y < rhi)
            if not m.any():
                continue
            x = np.asarray(br.inverse(y[m]), dtype=float)
            if br.inverse_derivative is not None:
                jac = np.abs(np.asarray(br.inverse_derivative(y[m]), dtype=float))
            else:
                h = 1e-6 * np.maximum(np.abs(y[m]), 1e-300)
                jac = np.abs(np.asarray(br.inverse(y[m] + h)) - np.asarray(br.inverse(y[m] - h))) / (2 * h)
            out[m] += mu.density(x) * jac
        return out / nu.density(y)

    return Opaque(zf, name="z[monotone]")


def compose(f: FuncSpec, xi: Transform) -> FuncSpec:
    """``f o xi`` as a function descriptor on the source space."""
    if isinstance(xi, PowerMap):
        r = xi.r
        if isinstance(f, Power):
            return Power(f.c, f.s * r)
        if isinstance(f, Piecewise) and f.breakpoints[0] >= 0:
            bps = tuple(b ** (1.0 / r) for b in f.breakpoints)
            return Piecewise(bps, tuple(compose(pc, xi) for pc in f.pieces))
        if isinstance(f, Truncated):
            return Truncated(compose(f.base, xi), f.level, compose(f.gate_fn, xi))
    if isinstance(xi, AtomMap):
        return Opaque(lambda i: f(np.asarray(xi.targets)[np.asarray(i, dtype=int)]),
                      name="composed")
    fwd = xi if callable(xi) else getattr(xi, "forward", None)
    if fwd is None:
        raise UnsupportedTransformError("transform cannot be evaluated pointwise")
    return Opaque(lambda x: f(fwd(x)), name="composed")


def verify_change_of_variables(xi: Transform, z: Derivative, h: FuncSpec,
                               mu: Optional[MeasureSpace] = None,
                               nu: Optional[MeasureSpace] = None,
                               tol: float = 1e-8) -> bool:
    """Check ``int h(xi) dmu == int h z dnu`` to relative tolerance ``tol``."""
    if not is_absolutely_continuous(z):
        raise ValueError("change of variables needs an absolutely continuous pushforward")
    mu = lebesgue() if mu is None else mu
    nu = lebesgue() if nu is None else nu
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    qtol = min(tol, DEFAULT_TOL)
    lhs = integrate(compose(h, xi), mu, qtol)
    rhs = integrate(multiply(h, z), nu, qtol)
    l_inf, r_inf = math.isinf(lhs.value), math.isinf(rhs.value)
    if l_inf and r_inf:
        warnings.warn("both sides diverge; identity holds only vacuously", RuntimeWarning)
        return True
    if l_inf or r_inf:
        return False
    return abs(lhs.value - rhs.value) <= tol * (1.0 + abs(rhs.value))
