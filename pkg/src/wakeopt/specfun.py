"""Special functions used by the optimizer: principal-branch Lambert W and
deterministic bracketed root finding."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

__all__ = ["Bracket", "lambert_w0", "find_root"]

_INV_E = math.exp(-1.0)


@dataclass(frozen=True)
class Bracket:
    """An interval [lo, hi] on which the target function changes sign."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("bracket endpoints must be finite")
        if not self.lo < self.hi:
            raise ValueError("bracket requires lo < hi")


def lambert_w0(x: float, tol: float = 1e-12) -> float:
    """Principal branch W0 of the Lambert W function.

    Returns w >= -1 with w * exp(w) = x, refined by Halley's method
    (Corless et al., Adv. Comput. Math. 5, 1996, eq. 5.9).  Initial guess:
    the branch-point series in sqrt(2(e*x + 1)) near x = -1/e, the
    asymptotic log(x) - log(log(x)) for large x, and x itself near zero
    (W0(x) ~ x - x^2 there, and for |x| < 1e-300 the identity is exact to
    double precision, which also absorbs arguments that underflow to -0.0).

    Raises
    ------
    ValueError
        If x < -1/e beyond a 1e-15 slack (no real principal-branch value).
    """
    if math.isnan(x):
        raise ValueError("lambert_w0: argument is NaN")
    if x < -_INV_E:
        if x >= -_INV_E - 1e-15:
            return -1.0
        raise ValueError(f"lambert_w0: argument {x!r} below -1/e")
    if abs(x) < 1e-300:
        return x

    if x < -0.25:
        # branch-point series: w = -1 + p - p^2/3 + 11 p^3/72, p = sqrt(2(ex+1))
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 * p ** 3 / 72.0
    elif x < 2.0:
        w = x * (1.0 - x)  # first terms of the Taylor series at 0
    else:
        lx = math.log(x)
        w = lx - math.log(lx)

    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol * max(1.0, abs(x)):
            return w
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        w -= f / denom
        if w < -1.0:  # Halley can overshoot the branch point
            w = -1.0 + 1e-12
    ew = math.exp(w)
    if abs(w * ew - x) <= tol * max(1.0, abs(x)):
        return w
    raise ValueError(f"lambert_w0: no convergence for x={x!r}")


def find_root(f: Callable[[float], float], bracket: Bracket,
              tol: float = 1e-12, max_iter: int = 200) -> float:
    """Root of a continuous scalar function on a sign-changing bracket.

    Bisection with a secant step whenever the secant candidate falls
    strictly inside the current bracket; stops once |f(x)| <= tol or the
    bracket width drops below tol.  Fully deterministic: identical inputs
    give bit-identical results.

    Raises
    ------
    ValueError
        If f has the same sign at both endpoints.
    """
    lo, hi = bracket.lo, bracket.hi
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise ValueError("find_root: no sign change on bracket")

    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        # secant candidate, else midpoint
        if fhi != flo:
            xs = hi - fhi * (hi - lo) / (fhi - flo)
        else:
            xs = 0.5 * (lo + hi)
        x = xs if lo < xs < hi else 0.5 * (lo + hi)
        fx = f(x)
        if abs(fx) <= tol or (hi - lo) <= tol:
            return x
        if (fx > 0.0) == (flo > 0.0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
    return x
