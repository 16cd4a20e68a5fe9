"""Closed-form average power consumption and average buffering delay of the
wake-up scheme, plus their partial derivatives in the optimized variables.

Two variants are exposed for each metric:

* ``*_full``: renewal-reward average over the complete semi-Markov chain,
  including channel errors, a non-zero WRx on-duration, and the triangular
  start-up/power-down transition energies (ramp areas between the sleep
  level and the target level).
* ``*_simplified``: the two-variable closed forms obtained under
  p_fa = p_md = 0, t_on = 0, pw4 = 0.  These are what the optimizer
  manipulates analytically.

The delay figure is the scheme's model delay: the buffering delay of the
packet that opens each sleep-buffering period, averaged per chain
transition, plus the half-TTI slot-alignment offset.  See wusim for the
matching simulator convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (ChannelErrorModel, PowerProfile, TimingParams,
                   TrafficModel, ValidationError, WuConfig, analyze_chain)

__all__ = [
    "PowerDelayPoint",
    "Gradient2",
    "DelayEstimate",
    "average_power_full",
    "average_power_simplified",
    "power_gradient",
    "average_delay_full",
    "average_delay_simplified",
    "delay_gradient",
]

#: Geometric tail mass at which the misdetection series is cut off.
SERIES_TAIL = 1e-12


@dataclass(frozen=True)
class PowerDelayPoint:
    """A (power, delay) operating point: mW and ms."""

    power: float
    delay: float


@dataclass(frozen=True)
class Gradient2:
    """Partial derivatives with respect to t_w and t_i."""

    d_tw: float
    d_ti: float


@dataclass(frozen=True)
class DelayEstimate:
    """Full-model delay value with series-truncation metadata."""

    delay: float          # ms
    series_terms: int
    tail_mass: float      # p_md ** series_terms
    truncated: bool       # True if tail_mass still exceeds SERIES_TAIL


def average_power_full(profile: PowerProfile, timing: TimingParams,
                       traffic: TrafficModel, channel: ChannelErrorModel,
                       cfg: WuConfig) -> float:
    """Average power over the full chain, mW.

    Ratio of expected energy to expected time per jump step.  Start-up and
    power-down contribute their ramp durations to the time budget and their
    trapezoid areas 0.5*(pw2+pw4)*t_su and 0.5*(pw3+pw4)*t_pd to the energy
    budget, weighted by the probability the transition occurs (pi1*P12 and
    pi3*P34).
    """
    chain = analyze_chain(traffic, timing, channel, cfg)
    pi, p, hold = chain.pi, chain.p, chain.hold
    levels = (profile.pw1, profile.pw2, profile.pw3, profile.pw4)

    w_su = pi[0] * p[0, 1] * timing.t_su
    w_pd = pi[2] * p[2, 3] * timing.t_pd
    energy = (w_su * 0.5 * (profile.pw2 + profile.pw4)
              + w_pd * 0.5 * (profile.pw3 + profile.pw4)
              + sum(pi[k] * hold[k] * levels[k] for k in range(4)))
    duration = w_su + w_pd + sum(pi[k] * hold[k] for k in range(4))
    return energy / duration


def _simplified_parts(profile: PowerProfile, timing: TimingParams,
                      traffic: TrafficModel, cfg: WuConfig):
    """Shared sub-expressions of the simplified power formula."""
    lam = traffic.lam
    traffic.check_against(timing)
    cfg.check_against(timing)
    ts, tsu, tpd, phi = timing.t_s, timing.t_su, timing.t_pd, profile.phi
    one_minus_e = -math.expm1(-lam * cfg.t_w)
    a = ts * math.exp(lam * ts)
    ei = math.exp(lam * cfg.t_i)
    num = ei * (phi * a + 1.0 / lam) + 0.5 * (phi * tsu + tpd) - 1.0 / lam
    den = ei * (a + 1.0 / lam) + cfg.t_w / one_minus_e + tsu + tpd - 1.0 / lam
    return lam, ts, tsu, tpd, phi, one_minus_e, a, ei, num, den


def average_power_simplified(profile: PowerProfile, timing: TimingParams,
                             traffic: TrafficModel, cfg: WuConfig) -> float:
    """Two-variable closed-form average power, mW.

    pw3 * [e^{lam t_i}(phi t_s e^{lam t_s} + 1/lam) + (phi t_su + t_pd)/2 - 1/lam]
        / [e^{lam t_i}(t_s e^{lam t_s} + 1/lam) + t_w/(1 - e^{-lam t_w})
           + t_su + t_pd - 1/lam]
    """
    _, _, _, _, _, _, _, _, num, den = _simplified_parts(profile, timing, traffic, cfg)
    return profile.pw3 * num / den


def power_gradient(profile: PowerProfile, timing: TimingParams,
                   traffic: TrafficModel, cfg: WuConfig) -> Gradient2:
    """Closed-form partials of the simplified average power.

    d/dt_i is strictly positive and d/dt_w strictly negative on the feasible
    region: a longer inactivity timer keeps the baseband up longer, a longer
    wake-up cycle stretches the sleep share.
    """
    lam, ts, tsu, tpd, phi, one_minus_e, a, ei, num, den = \
        _simplified_parts(profile, timing, traffic, cfg)
    tw = cfg.t_w

    # quotient rule; the e^{lam t_i} blocks of numerator and denominator
    # cancel, leaving a factor linear in the remaining terms
    bracket = ((lam * phi * a + 1.0) * (tw / one_minus_e + tsu + tpd - 1.0 / lam)
               - (lam * a + 1.0) * (0.5 * (phi * tsu + tpd) - 1.0 / lam))
    d_ti = profile.pw3 * ei * bracket / den ** 2

    e_w = math.exp(-lam * tw)
    d_tw = (profile.pw3 * ((1.0 + lam * tw) * e_w - 1.0) * num
            / (one_minus_e * den) ** 2)
    return Gradient2(d_tw=d_tw, d_ti=d_ti)


def _default_series_terms(p_md: float) -> int:
    if p_md <= 0.0:
        return 1
    return max(1, math.ceil(math.log(SERIES_TAIL) / math.log(p_md)))


def average_delay_full(timing: TimingParams, traffic: TrafficModel,
                       channel: ChannelErrorModel, cfg: WuConfig,
                       series_terms: int | None = None) -> DelayEstimate:
    """Full-model average buffering delay, ms.

    Sums the misdetection series: after i consecutive misdetections the
    packet that opened the buffering period waits (i+1)*t_w + t_su + t_on
    minus its arrival offset.  Each term's integral over the exponential
    arrival density has the closed form
    c*(1 - e^{-lam t_w}) - (1 - (1 + lam t_w) e^{-lam t_w})/lam with
    c = (i+1)*t_w + t_su + t_on.  The series is weighted by the full-chain
    pi4 and the geometric misdetection probabilities; the slot-alignment
    offset t_s/2 is added on top.

    ``series_terms=None`` truncates adaptively at tail mass 1e-12.
    """
    if series_terms is None:
        series_terms = _default_series_terms(channel.p_md)
    if series_terms < 1:
        raise ValidationError("series_terms must be >= 1")

    chain = analyze_chain(traffic, timing, channel, cfg)
    lam, tw = traffic.lam, cfg.t_w
    one_minus_e = -math.expm1(-lam * tw)
    e_w = math.exp(-lam * tw)
    ramp = (1.0 - (1.0 + lam * tw) * e_w) / lam

    total = 0.0
    weight = 1.0 - channel.p_md
    for i in range(series_terms):
        c = (i + 1) * tw + timing.t_su + timing.t_on
        total += weight * (c * one_minus_e - ramp)
        weight *= channel.p_md

    tail = channel.p_md ** series_terms
    delay = chain.pi[3] * total + timing.t_s / 2.0
    return DelayEstimate(delay=delay, series_terms=series_terms,
                         tail_mass=tail, truncated=tail > SERIES_TAIL)


def average_delay_simplified(timing: TimingParams, traffic: TrafficModel,
                             cfg: WuConfig) -> float:
    """Two-variable closed-form average buffering delay, ms.

    [t_w + (t_su - 1/lam)(1 - e^{-lam t_w})]
        / [2 + (1 - e^{-lam t_w})(1 + e^{lam t_s}) e^{lam t_i}]  +  t_s/2
    """
    traffic.check_against(timing)
    cfg.check_against(timing)
    lam = traffic.lam
    one_minus_e = -math.expm1(-lam * cfg.t_w)
    num = cfg.t_w + (timing.t_su - 1.0 / lam) * one_minus_e
    den = 2.0 + one_minus_e * (1.0 + math.exp(lam * timing.t_s)) * math.exp(lam * cfg.t_i)
    return num / den + timing.t_s / 2.0


def delay_gradient(timing: TimingParams, traffic: TrafficModel,
                   cfg: WuConfig) -> Gradient2:
    """Closed-form partials of the simplified average delay.

    d/dt_w is strictly positive (longer cycles buffer longer) and d/dt_i
    strictly negative (a longer inactivity timer catches more packets while
    the baseband is still up).
    """
    traffic.check_against(timing)
    cfg.check_against(timing)
    lam, tw = traffic.lam, cfg.t_w
    e_w = math.exp(-lam * tw)
    one_minus_e = -math.expm1(-lam * tw)
    big_a = (1.0 + math.exp(lam * timing.t_s)) * math.exp(lam * cfg.t_i)
    den = 2.0 + one_minus_e * big_a

    d_tw = (big_a * (1.0 - (1.0 + lam * tw) * e_w)
            + 2.0 * one_minus_e + 2.0 * lam * timing.t_su * e_w) / den ** 2
    d_ti = (-lam * big_a * one_minus_e
            * (tw + (timing.t_su - 1.0 / lam) * one_minus_e)) / den ** 2
    return Gradient2(d_tw=d_tw, d_ti=d_ti)
