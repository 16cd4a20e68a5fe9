"""Delay-constrained energy minimization of the wake-up scheme.

The optimum of

    minimize   average power P(t_w, t_i)
    subject to average delay D(t_w, t_i) <= d_max,  t_w, t_i >= 1 TTI

always lies on the delay boundary D = d_max (power falls with t_w and rises
with t_i while delay does the opposite, so interior points are dominated).
Along the boundary, t_i is an explicit function of t_w, the boundary power
is a ratio of two functions linear in t_w and e^{-lam t_w}, and its sign of
growth is governed by a constant F1(lam): below the turnoff arrival rate
lambda_t (the root of F1) boundary power increases in t_w, so the smallest
feasible cycle t_wb — available in closed form through the Lambert W
function — is optimal together with the one-TTI inactivity timer.  Above
lambda_t the infimum sits at t_w -> infinity: the scheme stops paying off
and should be disabled.

Integer (TTI-multiple) optima follow by flooring t_wb; an exhaustive grid
search over integer configurations is included as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import (EmptyFeasibleSetError, InfeasibleError, NoRootError,
                   PowerProfile, TimingParams, TrafficModel, ValidationError,
                   WuConfig)
from .metrics import average_delay_simplified, average_power_simplified
from .specfun import Bracket, find_root, lambert_w0

__all__ = [
    "Constraint",
    "BoundaryCoefficients",
    "AppendixConstants",
    "BoundaryCase",
    "Regime",
    "OptimizationResult",
    "boundary_inactivity_timer",
    "min_boundary_wakeup_cycle",
    "boundary_coefficients",
    "boundary_power",
    "appendix_constants",
    "classify_boundary_case",
    "turnoff_arrival_rate",
    "optimize",
    "grid_search_oracle",
]


@dataclass(frozen=True)
class Constraint:
    """Maximum tolerable average buffering delay, ms."""

    d_max: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.d_max) and self.d_max > 0.0):
            raise ValidationError("d_max must be positive and finite")

    def margin(self, timing: TimingParams) -> float:
        """d_max minus the irreducible half-TTI alignment delay."""
        m = self.d_max - timing.t_s / 2.0
        if m <= 0.0:
            raise InfeasibleError(
                f"d_max={self.d_max:g} ms cannot beat the t_s/2 floor")
        return m


@dataclass(frozen=True)
class BoundaryCoefficients:
    """Coefficients of the boundary power ratio.

    Boundary power is pw3 * (u1 + u2 t_w + u3 e^{-lam t_w})
                          / (w1 + w2 t_w + w3 e^{-lam t_w}).
    ``lam`` is carried so the exponential can be evaluated.
    """

    u1: float
    u2: float
    u3: float
    w1: float
    w2: float
    w3: float
    lam: float


@dataclass(frozen=True)
class AppendixConstants:
    """Sign-analysis constants of the boundary power derivative.

    d/dt_w of boundary power has the sign of
    Y(t_w) = f1 + (f2 - lam*f3*t_w) * e^{-lam t_w}.  For decode-to-idle
    ratios 1 <= phi < 2 the combinations f1+f2, f2+f3 and f1-f3 are all
    positive, which pins Y's behaviour down to three cases (see
    :func:`classify_boundary_case`); ``inequalities_hold`` records whether
    that precondition was actually met.
    """

    f1: float
    f2: float
    f3: float
    lam: float
    inequalities_hold: bool

    def y(self, t_w: float) -> float:
        return self.f1 + (self.f2 - self.lam * self.f3 * t_w) * math.exp(-self.lam * t_w)


class BoundaryCase(Enum):
    """Shape of the boundary power curve: A/B increasing, C decreasing."""

    A = "A"  # f3 > 0 (implies f1 > 0): increasing
    B = "B"  # f3 < 0, f1 > 0: increasing
    C = "C"  # f3 < 0, f1 < 0: decreasing on the feasible range


class Regime(Enum):
    WUS_EFFECTIVE = "WUS_EFFECTIVE"
    WUS_INEFFECTIVE = "WUS_INEFFECTIVE"


@dataclass(frozen=True)
class OptimizationResult:
    """Optimal configuration and its predicted performance.

    In the WUS_INEFFECTIVE regime the true optimum is unbounded
    (t_w*, t_i* = inf); ``advisory_config`` then holds a finite integer
    configuration whose power is within 0.1% of the infimum, and the
    predictions refer to that configuration.
    """

    t_w_star: float            # ms, inf in the ineffective regime
    t_i_star: float            # ms, inf in the ineffective regime
    regime: Regime
    lambda_t: float            # turnoff arrival rate, packets/ms
    predicted_power: float     # mW
    predicted_delay: float     # ms
    t_wb: float                # minimum feasible boundary cycle, ms
    advisory_config: WuConfig | None = None
    stationary_point: float | None = None   # case-C root of Y, ms
    stationary_below_twb: bool | None = None


def boundary_inactivity_timer(t_w: float, traffic: TrafficModel,
                              timing: TimingParams,
                              constraint: Constraint) -> float:
    """Inactivity timer that puts (t_w, t_i) exactly on the delay boundary.

    t_i(t_w) = (1/lam) * ln[ (t_w + (t_su - 1/lam)(1 - e^{-lam t_w})
                              - 2(d_max - t_s/2))
                             / ((d_max - t_s/2)(1 - e^{-lam t_w})(1 + e^{lam t_s})) ]

    Raises
    ------
    InfeasibleError
        If t_w is below the minimum feasible cycle (log argument
        non-positive, or the resulting timer shorter than one TTI).
    """
    lam = traffic.lam
    traffic.check_against(timing)
    dm = constraint.margin(timing)
    one_minus_e = -math.expm1(-lam * t_w)
    num = t_w + (timing.t_su - 1.0 / lam) * one_minus_e - 2.0 * dm
    den = dm * one_minus_e * (1.0 + math.exp(lam * timing.t_s))
    if num <= 0.0:
        raise InfeasibleError(
            f"t_w={t_w:g} ms is below the feasible boundary range")
    t_i = math.log(num / den) / lam
    if t_i < timing.tti * (1.0 - 1e-9):
        raise InfeasibleError(
            f"boundary timer {t_i:g} ms falls below one TTI at t_w={t_w:g}")
    return t_i


def min_boundary_wakeup_cycle(traffic: TrafficModel, timing: TimingParams,
                              constraint: Constraint) -> float:
    """Smallest feasible wake-up cycle on the boundary (t_i = one TTI), ms.

    Setting t_i to one TTI in the boundary equation and solving for t_w
    gives t_wb = (F + W0(H e^{-F})) / lam with

        F = ((e^{lam tti}(1 + e^{lam t_s}) + 2)(d_max - t_s/2) - t_su)*lam + 1
        H = lam*t_su - e^{lam tti}(d_max - t_s/2)(1 + e^{lam t_s})*lam - 1

    The exponentials of lam multiply one TTI, so the expression scales
    correctly when the TTI is swept.  A Lambert-domain violation
    (H e^{-F} < -1/e) is surfaced, not masked; it does not occur for valid
    inputs.
    """
    lam = traffic.lam
    traffic.check_against(timing)
    dm = constraint.margin(timing)
    el = math.exp(lam * timing.tti)
    es = math.exp(lam * timing.t_s)
    f = ((el * (1.0 + es) + 2.0) * dm - timing.t_su) * lam + 1.0
    h = lam * timing.t_su - el * dm * (1.0 + es) * lam - 1.0
    t_wb = (f + lambert_w0(h * math.exp(-f))) / lam
    return max(t_wb, timing.tti)


def boundary_coefficients(profile: PowerProfile, timing: TimingParams,
                          traffic: TrafficModel,
                          constraint: Constraint) -> BoundaryCoefficients:
    """Coefficients of the boundary power ratio.

    Obtained by substituting the boundary value of e^{lam t_i} into the
    simplified power expression and collecting the constant, t_w, and
    e^{-lam t_w} terms of numerator and denominator.
    """
    lam = traffic.lam
    traffic.check_against(timing)
    dm = constraint.margin(timing)
    ts, tsu, tpd, phi = timing.t_s, timing.t_su, timing.t_pd, profile.phi
    big_a = 1.0 + math.exp(lam * ts)          # 1 + e^{lam t_s}
    a_u = phi * ts * math.exp(lam * ts) + 1.0 / lam
    a_w = ts * math.exp(lam * ts) + 1.0 / lam
    p_u = 0.5 * (phi * tsu + tpd) - 1.0 / lam
    p_w = tsu + tpd - 1.0 / lam

    return BoundaryCoefficients(
        u1=a_u * (tsu - 1.0 / lam - 2.0 * dm) + p_u * big_a * dm,
        u2=a_u,
        u3=-a_u * (tsu - 1.0 / lam) - p_u * big_a * dm,
        w1=a_w * (tsu - 1.0 / lam - 2.0 * dm) + p_w * big_a * dm,
        w2=a_w + big_a * dm,
        w3=-a_w * (tsu - 1.0 / lam) - p_w * big_a * dm,
        lam=lam,
    )


def boundary_power(t_w: float, coeffs: BoundaryCoefficients,
                   profile: PowerProfile) -> float:
    """Average power on the delay boundary at wake-up cycle t_w, mW."""
    e_w = math.exp(-coeffs.lam * t_w)
    return (profile.pw3 * (coeffs.u1 + coeffs.u2 * t_w + coeffs.u3 * e_w)
            / (coeffs.w1 + coeffs.w2 * t_w + coeffs.w3 * e_w))


def appendix_constants(profile: PowerProfile, timing: TimingParams,
                       traffic: TrafficModel,
                       constraint: Constraint) -> AppendixConstants:
    """Constants f1, f2, f3 of the boundary-power sign analysis.

    Derived from the boundary coefficients: the derivative numerator is
    Y(t_w) = (u2 w1 - u1 w2) + [(u2 w3 - u3 w2) + lam (u1 w3 - u3 w1)
             - lam (u3 w2 - u2 w3) t_w] e^{-lam t_w}, matching the
    f1/f2/f3 parameterization.
    """
    c = boundary_coefficients(profile, timing, traffic, constraint)
    f1 = c.u2 * c.w1 - c.u1 * c.w2
    f3 = c.u3 * c.w2 - c.u2 * c.w3
    f2 = -f3 + c.lam * (c.u1 * c.w3 - c.u3 * c.w1)
    holds = (f1 + f2 > 0.0) and (f2 + f3 > 0.0) and (f1 > f3)
    if not 1.0 <= profile.phi < 2.0:
        # inequalities only guaranteed for typical ratios; still computed
        holds = holds and False
    return AppendixConstants(f1=f1, f2=f2, f3=f3, lam=c.lam,
                             inequalities_hold=holds)


def classify_boundary_case(constants: AppendixConstants) -> BoundaryCase:
    """Case A (f3 > 0), B (f3 < 0 < f1), or C (f3 < 0, f1 < 0).

    A and B make the boundary power increasing in t_w; C makes it
    decreasing on the feasible range.  Near-zero f1 or f3 (within 1e-12 of
    the coefficient scale) is reported as degenerate.
    """
    scale = max(abs(constants.f1), abs(constants.f3), 1.0)
    if abs(constants.f3) <= 1e-12 * scale or abs(constants.f1) <= 1e-12 * scale:
        raise ValidationError("degenerate boundary case: f1 or f3 is zero")
    if constants.f3 > 0.0:
        return BoundaryCase.A
    return BoundaryCase.B if constants.f1 > 0.0 else BoundaryCase.C


def turnoff_arrival_rate(profile: PowerProfile, timing: TimingParams,
                         constraint: Constraint, tol: float = 1e-9) -> float:
    """Arrival rate above which the scheme stops saving energy, per ms.

    The unique root of f1(lam) on (0, 1/tti), located by a linear sign scan
    followed by bracketed root refinement.
    """
    def f1_of(lam: float) -> float:
        return appendix_constants(profile, timing, TrafficModel(lam),
                                  constraint).f1

    hi = 1.0 / timing.tti
    grid = np.linspace(hi * 1e-6, hi * (1.0 - 1e-9), 2048)
    prev_x, prev_v = grid[0], f1_of(grid[0])
    for x in grid[1:]:
        v = f1_of(x)
        if (prev_v > 0.0) != (v > 0.0):
            return find_root(f1_of, Bracket(prev_x, x), tol=tol)
        prev_x, prev_v = x, v
    raise NoRootError("f1 has constant sign on (0, 1/tti); no turnoff rate")


def _round_down_to_tti(value: float, tti: float) -> float:
    return max(math.floor(value / tti + 1e-12), 1) * tti


def _boundary_cycle_for_timer(t_i: float, traffic: TrafficModel,
                              timing: TimingParams, constraint: Constraint,
                              t_wb: float) -> float:
    """Wake-up cycle putting (t_w, t_i) on the delay boundary, by bisection.

    The simplified delay is strictly increasing in t_w, so the crossing is
    unique on [t_wb, inf).
    """
    def excess(t_w: float) -> float:
        cfg = WuConfig(t_w=t_w, t_i=t_i)
        return average_delay_simplified(timing, traffic, cfg) - constraint.d_max

    lo = max(t_wb, timing.tti)
    hi = max(2.0 * lo, 16.0)
    for _ in range(200):
        if excess(hi) > 0.0:
            break
        hi *= 2.0
    return find_root(excess, Bracket(lo, hi), tol=1e-9)


def _case_c_stationary_point(constants: AppendixConstants,
                             t_wb: float) -> float | None:
    """Root of Y(t_w) = 0 in case C, or None if no bracket is found."""
    lo, hi = 1e-6, max(4.0 * t_wb, 16.0)
    if constants.y(lo) <= 0.0:
        return lo
    for _ in range(80):
        if constants.y(hi) < 0.0:
            return find_root(constants.y, Bracket(lo, hi), tol=1e-9)
        lo, hi = hi, hi * 2.0
    return None


def optimize(profile: PowerProfile, timing: TimingParams,
             traffic: TrafficModel, constraint: Constraint) -> OptimizationResult:
    """Delay-constrained minimum-power configuration (integer TTI multiples).

    For lam <= lambda_t the optimum is t_w* = floor(t_wb), t_i* = one TTI.
    For lam > lambda_t the infimum sits at infinity; sentinels are returned
    together with an advisory finite configuration within 0.1% of the
    infimum power pw3 * u2 / w2.
    """
    traffic.check_against(timing)
    lam_t = turnoff_arrival_rate(profile, timing, constraint)
    t_wb = min_boundary_wakeup_cycle(traffic, timing, constraint)
    coeffs = boundary_coefficients(profile, timing, traffic, constraint)
    constants = appendix_constants(profile, timing, traffic, constraint)

    t_ws = None
    t_ws_below = None
    if constants.f3 < 0.0 and constants.f1 < 0.0:
        t_ws = _case_c_stationary_point(constants, t_wb)
        if t_ws is not None:
            t_ws_below = t_ws < t_wb

    if traffic.lam <= lam_t:
        t_w_star = _round_down_to_tti(t_wb, timing.tti)
        cfg = WuConfig(t_w=t_w_star, t_i=timing.tti, integral=True)
        return OptimizationResult(
            t_w_star=t_w_star,
            t_i_star=timing.tti,
            regime=Regime.WUS_EFFECTIVE,
            lambda_t=lam_t,
            predicted_power=average_power_simplified(profile, timing, traffic, cfg),
            predicted_delay=average_delay_simplified(timing, traffic, cfg),
            t_wb=t_wb,
            stationary_point=t_ws,
            stationary_below_twb=t_ws_below,
        )

    # ineffective regime: walk out the boundary along integer inactivity
    # timers (inverting the boundary for t_w, then flooring it, which keeps
    # the point feasible) until within 0.1% of the power infimum
    p_inf = profile.pw3 * coeffs.u2 / coeffs.w2
    advisory = None
    power = delay = math.inf
    ti_units = max(math.ceil(
        boundary_inactivity_timer(2.0 * t_wb, traffic, timing, constraint)
        / timing.tti), 1)
    for _ in range(200):
        t_i = ti_units * timing.tti
        t_w_edge = _boundary_cycle_for_timer(t_i, traffic, timing, constraint,
                                             t_wb)
        candidate = WuConfig(t_w=_round_down_to_tti(t_w_edge, timing.tti),
                             t_i=t_i, integral=True)
        power = average_power_simplified(profile, timing, traffic, candidate)
        delay = average_delay_simplified(timing, traffic, candidate)
        advisory = candidate
        if power <= 1.001 * p_inf or traffic.lam * t_i > 600.0:
            break
        ti_units *= 2

    return OptimizationResult(
        t_w_star=math.inf,
        t_i_star=math.inf,
        regime=Regime.WUS_INEFFECTIVE,
        lambda_t=lam_t,
        predicted_power=power,
        predicted_delay=delay,
        t_wb=t_wb,
        advisory_config=advisory,
        stationary_point=t_ws,
        stationary_below_twb=t_ws_below,
    )


def grid_search_oracle(profile: PowerProfile, timing: TimingParams,
                       traffic: TrafficModel, constraint: Constraint,
                       t_w_max: float, t_i_max: float) -> OptimizationResult:
    """Exhaustive integer-configuration search (validation oracle).

    Evaluates the simplified power on every (t_w, t_i) integer TTI multiple
    within the bounds whose simplified delay meets the constraint, and
    returns the minimum; ties break toward smaller t_w, then smaller t_i.
    The bounds must be large enough to contain the closed-form optimum.

    Raises
    ------
    EmptyFeasibleSetError
        If no grid point satisfies the delay constraint.
    """
    traffic.check_against(timing)
    # triggers the infeasibility error for d_max <= t_s/2
    constraint.margin(timing)
    lam, ts, tti = traffic.lam, timing.t_s, timing.tti
    tsu, tpd, phi = timing.t_su, timing.t_pd, profile.phi

    tws = tti * np.arange(1, int(round(t_w_max / tti)) + 1)[:, None]
    tis = tti * np.arange(1, int(round(t_i_max / tti)) + 1)[None, :]
    one_minus_e = -np.expm1(-lam * tws)
    ei = np.exp(lam * tis)

    delay = ((tws + (tsu - 1.0 / lam) * one_minus_e)
             / (2.0 + one_minus_e * (1.0 + math.exp(lam * ts)) * ei)
             + ts / 2.0)
    a = ts * math.exp(lam * ts)
    num = ei * (phi * a + 1.0 / lam) + 0.5 * (phi * tsu + tpd) - 1.0 / lam
    den = ei * (a + 1.0 / lam) + tws / one_minus_e + tsu + tpd - 1.0 / lam
    power = profile.pw3 * num / den

    feasible = delay <= constraint.d_max
    if not feasible.any():
        raise EmptyFeasibleSetError(
            f"no feasible (t_w, t_i) within bounds ({t_w_max:g}, {t_i_max:g})")
    power = np.where(feasible, power, np.inf)
    flat = int(np.argmin(power))          # row-major: smallest t_w, then t_i
    i, j = np.unravel_index(flat, power.shape)

    t_w_star = float(tws[i, 0])
    t_i_star = float(tis[0, j])
    lam_t = turnoff_arrival_rate(profile, timing, constraint)
    return OptimizationResult(
        t_w_star=t_w_star,
        t_i_star=t_i_star,
        regime=(Regime.WUS_EFFECTIVE if traffic.lam <= lam_t
                else Regime.WUS_INEFFECTIVE),
        lambda_t=lam_t,
        predicted_power=float(power[i, j]),
        predicted_delay=float(delay[i, j]),
        t_wb=min_boundary_wakeup_cycle(traffic, timing, constraint),
    )
