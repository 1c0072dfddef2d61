"""Grid-plus-golden-section search over open intervals."""
from __future__ import annotations

import math
from typing import Callable, Iterable, Tuple

import numpy as np

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _clean(v: float, maximize: bool) -> float:
    if v is None or math.isnan(v):
        return -math.inf if maximize else math.inf
    return v


def golden_section(f: Callable[[float], float], lo: float, hi: float, *,
                   maximize: bool = False, rtol: float = 1e-10,
                   max_iter: int = 200) -> Tuple[float, float]:
    """Golden-section search for an extremum of ``f`` on ``[lo, hi]``.

    Stops once the bracket width falls below ``rtol`` relative to its centre.
    Non-finite values are allowed and simply lose comparisons.
    """
    sign = -1.0 if maximize else 1.0

    def obj(x):
        return sign * _clean(float(f(x)), maximize)

    x1 = hi - INVPHI * (hi - lo)
    x2 = lo + INVPHI * (hi - lo)
    f1, f2 = obj(x1), obj(x2)
    for _ in range(max_iter):
        if hi - lo <= rtol * max(abs(lo), abs(hi), 1e-300):
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INVPHI * (hi - lo)
            f1 = obj(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INVPHI * (hi - lo)
            f2 = obj(x2)
    x, fx = (x1, f1) if f1 <= f2 else (x2, f2)
    return x, sign * fx


def _to_x(s, lo, hi):
    if math.isinf(hi):
        base = max(abs(lo), 1.0)
        return lo + base * s / (1.0 - s)
    return lo + (hi - lo) * s


def open_grid(lo: float, hi: float, n: int = 64, edge: float = 1e-9) -> np.ndarray:
    """Nodes inside ``(lo, hi)`` clustered logarithmically towards both ends.

    The outermost nodes sit at relative distance ``edge`` from the endpoints;
    an infinite ``hi`` is reached as ``lo + base/edge``.
    """
    return _to_x(_s_nodes(n, edge), lo, hi)


def _s_nodes(n, edge):
    t = math.log(edge / (1.0 - edge))
    u = np.linspace(t, -t, n)
    return 1.0 / (1.0 + np.exp(-u))


def grid_extremum(f: Callable[[float], float], lo: float, hi: float, *,
                  n: int = 64, maximize: bool = False, edge: float = 1e-9,
                  rtol: float = 1e-10, candidates: Iterable[float] = ()) -> Tuple[float, float]:
    """Extremum of ``f`` over the open interval ``(lo, hi)``.

    A clustered grid locates the best node, golden-section search refines it
    inside the neighbouring bracket.  Extra ``candidates`` inside the interval
    are evaluated as well.  Returns ``(argbest, best)``; when every value is
    infinite the argbest is ``nan``.
    """
    sign = -1.0 if maximize else 1.0
    s_nodes = _s_nodes(n, edge)
    vals = np.array([sign * _clean(float(f(_to_x(s, lo, hi))), maximize) for s in s_nodes])
    i = int(np.argmin(vals))
    if math.isinf(vals[i]) and vals[i] > 0:
        return math.nan, sign * math.inf
    s_lo, s_hi = s_nodes[max(i - 1, 0)], s_nodes[min(i + 1, n - 1)]
    best_x, best_v = _to_x(s_nodes[i], lo, hi), vals[i]
    s_star, v_star = golden_section(lambda s: sign * _clean(float(f(_to_x(s, lo, hi))), maximize),
                                    s_lo, s_hi, rtol=rtol)
    if v_star < best_v:
        best_x, best_v = _to_x(s_star, lo, hi), v_star
    for c in candidates:
        if lo < c < hi:
            v = sign * _clean(float(f(c)), maximize)
            if v < best_v:
                best_x, best_v = c, v
    return best_x, sign * best_v
