"""Enclosures of infinite series and a certified bisection root finder."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import RootBracketFailure, TailBoundFailure

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @classmethod
    def infinite(cls) -> "Interval":
        return cls(math.inf, math.inf)

    @property
    def mid(self) -> float:
        if math.isinf(self.hi):
            return math.inf
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        if math.isinf(self.hi):
            return math.inf if math.isfinite(self.lo) else 0.0
        return self.hi - self.lo

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.lo)

    def __add__(self, other):
        other = _coerce(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return _coerce(other) - self

    def scale(self, k: float) -> "Interval":
        a, b = self.lo * k, self.hi * k
        return Interval(min(a, b), max(a, b))

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack


def _coerce(x) -> Interval:
    return x if isinstance(x, Interval) else Interval.point(float(x))


def _convex_decreasing_on(term, x0: float, span: float = 1e4, samples: int = 48) -> bool:
    xs = x0 * np.geomspace(1.0, span, samples)
    h = xs * 1e-3
    left, mid, right = term(xs - h), term(xs), term(xs + h)
    tiny = 1e-300
    ok_dec = np.all(right <= mid * (1 + 1e-12) + tiny) and np.all(np.diff(term(xs)) <= tiny)
    ok_cvx = np.all(left + right - 2 * mid >= -1e-9 * np.abs(mid) - tiny)
    return bool(ok_dec and ok_cvx and np.all(mid >= 0))


def tail_bounded_sum(
    term: Callable[[np.ndarray], np.ndarray],
    tail_integral: Callable[[float], tuple[float, float]],
    tol: float = 1e-10,
    start: int = 1,
    n0: int = 64,
    budget: int = 1 << 22,
    tail_from: int = 1,
) -> Interval:
    """Enclose ``sum_{n >= start} term(n)`` for terms that end up convex and decreasing.

    ``tail_integral(x)`` returns ``(value, abserr)`` for the integral of
    ``term`` over ``[x, inf)``; it only has to be valid for
    ``x >= tail_from``. With the partial sum up to ``N`` and ``term``
    convex and decreasing beyond ``N``, the remainder is squeezed between
    the trapezoid bound ``int_{N+1} + term(N+1)/2`` and the midpoint bound
    ``int_{N+1/2}``. ``N`` grows by factors of 4 until the width is at
    most ``tol``; past ``budget`` terms :class:`TailBoundFailure` carries
    the best enclosure.
    """
    n_cut = max(n0, start, tail_from + 1)
    partial, abs_partial, done = 0.0, 0.0, start - 1
    best = None
    while True:
        if n_cut > done:
            chunk = term(np.arange(done + 1, n_cut + 1, dtype=float))
            partial += float(np.sum(chunk))
            abs_partial += float(np.sum(np.abs(chunk)))
            done = n_cut
        if _convex_decreasing_on(term, n_cut + 0.5):
            up, up_err = tail_integral(n_cut + 0.5)
            low, low_err = tail_integral(n_cut + 1.0)
            t_next = float(term(np.array([n_cut + 1.0]))[0])
            rounding = 4 * EPS * math.log2(max(done, 2)) * abs_partial
            lo = partial + low + 0.5 * t_next - low_err - rounding
            hi = partial + up + up_err + rounding
            best = Interval(min(lo, hi), max(lo, hi))
            if best.width <= tol:
                return best
        if n_cut * 4 > budget:
            raise TailBoundFailure(
                f"width {best.width if best else math.inf:.3e} above {tol:.1e} at {n_cut} terms",
                best,
            )
        n_cut *= 4


def bisect_decreasing(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    target: float = 0.0,
    max_iter: int = 400,
) -> float:
    """Root of ``f(x) = target`` for decreasing ``f`` bracketed by ``[lo, hi]``.

    Halves the bracket until it cannot shrink any further in floating point,
    then returns whichever endpoint has the smaller residual.
    """
    flo, fhi = f(lo) - target, f(hi) - target
    if not (flo >= 0 >= fhi):
        raise RootBracketFailure(
            "root is not bracketed", {"lo": lo, "hi": hi, "f_lo": flo, "f_hi": fhi}
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid) - target
        if fm == 0:
            return mid
        if fm > 0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return lo if abs(flo) <= abs(fhi) else hi
