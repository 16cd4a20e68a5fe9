"""Domain types and the four-state semi-Markov chain of a wake-up-receiver
based downlink access scheme.

The device alternates between four states:

  S1  WRx-ON             low-power receiver monitors the wake-up channel
  S2  active-decoding    baseband decodes buffered packets, one TTI at a time
  S3  active-inactivity  baseband idles while the inactivity timer runs
  S4  sleep              everything off until the next wake-up cycle

Traffic is Poisson with rate ``lam`` packets/ms.  All times are milliseconds.
This module computes the chain's transition probabilities, steady-state
(jump-chain) probabilities, and expected state holding times; the closed-form
power/delay metrics and the optimizer build on these quantities.

Everything here is a pure function over frozen value types, safe for
concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "WakeupModelError",
    "ValidationError",
    "SingularChainError",
    "InfeasibleError",
    "NoRootError",
    "EmptyFeasibleSetError",
    "PowerProfile",
    "TimingParams",
    "TrafficModel",
    "ChannelErrorModel",
    "WuConfig",
    "SemiMarkovSummary",
    "transition_probabilities",
    "steady_state",
    "expected_holding_times",
    "analyze_chain",
]


class WakeupModelError(Exception):
    """Base class for model errors raised by this package."""


class ValidationError(WakeupModelError, ValueError):
    """An input value violates a type invariant."""


class SingularChainError(WakeupModelError):
    """The embedded chain is degenerate (P23 or P34 underflowed to zero)."""


class InfeasibleError(WakeupModelError):
    """A requested configuration cannot satisfy the delay constraint."""


class NoRootError(WakeupModelError):
    """A root search found no sign change on the scanned interval."""


class EmptyFeasibleSetError(WakeupModelError):
    """An exhaustive search found no feasible configuration."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValidationError(msg)


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class PowerProfile:
    """Per-state power levels of the cellular module.

    Attributes
    ----------
    pw1 : float
        Power while the wake-up receiver monitors, mW.
    pw2 : float
        Power while the baseband decodes, mW.
    pw3 : float
        Power while the inactivity timer runs (baseband idle-active), mW.
    pw4 : float
        Sleep power, mW.
    """

    pw1: float
    pw2: float
    pw3: float
    pw4: float

    def __post_init__(self) -> None:
        _require(_finite(self.pw1, self.pw2, self.pw3, self.pw4),
                 "power levels must be finite")
        _require(self.pw4 >= 0.0, "pw4 must be >= 0")
        _require(self.pw1 >= self.pw4, "pw1 must be >= pw4")
        _require(self.pw3 >= self.pw1, "pw3 must be >= pw1")
        _require(self.pw2 >= self.pw3, "pw2 must be >= pw3")

    @property
    def phi(self) -> float:
        """Decode-to-idle-active power ratio pw2/pw3 (>= 1)."""
        return self.pw2 / self.pw3


@dataclass(frozen=True)
class TimingParams:
    """Fixed timing constants of the scheme, all in ms.

    ``t_s`` (the service time) is exactly one TTI: buffered packets are
    concatenated into a single transmission interval.
    """

    t_su: float   # baseband start-up ramp
    t_pd: float   # baseband power-down ramp
    t_on: float   # WRx on-duration per wake-up cycle
    tti: float    # transmission time interval
    t_s: float | None = None  # service time; defaults to one TTI

    def __post_init__(self) -> None:
        if self.t_s is None:
            object.__setattr__(self, "t_s", self.tti)
        _require(_finite(self.t_su, self.t_pd, self.t_on, self.tti, self.t_s),
                 "timing parameters must be finite")
        _require(self.t_su > 0 and self.t_pd > 0 and self.tti > 0,
                 "t_su, t_pd and tti must be positive")
        _require(self.t_on >= 0, "t_on must be >= 0")
        _require(self.t_on < self.tti, "t_on must be shorter than one TTI")
        _require(abs(self.t_s - self.tti) <= 1e-12 * self.tti,
                 "t_s must equal one TTI")


@dataclass(frozen=True)
class TrafficModel:
    """Poisson downlink traffic with rate ``lam`` packets per ms."""

    lam: float

    def __post_init__(self) -> None:
        _require(_finite(self.lam) and self.lam > 0.0, "lam must be > 0")

    def check_against(self, timing: TimingParams) -> None:
        """Enforce the per-TTI load bound 0 < lam * tti < 1."""
        _require(self.lam * timing.tti < 1.0,
                 f"lam*tti must be < 1 (got {self.lam * timing.tti:g})")


@dataclass(frozen=True)
class ChannelErrorModel:
    """Wake-up signaling decoding errors: false alarm and misdetection."""

    p_fa: float = 0.0
    p_md: float = 0.0

    def __post_init__(self) -> None:
        _require(0.0 <= self.p_fa < 1.0, "p_fa must be in [0, 1)")
        _require(0.0 <= self.p_md < 1.0, "p_md must be in [0, 1)")


@dataclass(frozen=True)
class WuConfig:
    """Configurable scheme parameters: wake-up cycle and inactivity timer.

    With ``integral=True`` both must be integer multiples of the TTI
    (checked by :meth:`check_against`); the relaxed optimization problem
    works with real values.
    """

    t_w: float
    t_i: float
    integral: bool = False

    def __post_init__(self) -> None:
        _require(_finite(self.t_w, self.t_i), "t_w and t_i must be finite")
        _require(self.t_w > 0 and self.t_i > 0, "t_w and t_i must be positive")

    def check_against(self, timing: TimingParams) -> None:
        slack = 1e-9 * timing.tti  # float fuzz at the relaxed-problem corner
        _require(self.t_w >= timing.tti - slack, "t_w must be at least one TTI")
        _require(self.t_i >= timing.tti - slack, "t_i must be at least one TTI")
        if self.integral:
            for name, value in (("t_w", self.t_w), ("t_i", self.t_i)):
                ratio = value / timing.tti
                _require(abs(ratio - round(ratio)) <= 1e-9,
                         f"{name} must be an integer multiple of the TTI")


@dataclass(frozen=True)
class SemiMarkovSummary:
    """Chain quantities; parts not yet computed are ``None``.

    Attributes
    ----------
    p : (4, 4) array or None
        Transition probabilities, ``p[k-1, l-1]`` for states S_k -> S_l.
    pi : (4,) array or None
        Jump-chain steady-state probabilities.
    hold : (4,) array or None
        Expected holding times per state, ms.
    """

    p: np.ndarray | None = None
    pi: np.ndarray | None = None
    hold: np.ndarray | None = None


def _validate_inputs(traffic: TrafficModel, timing: TimingParams,
                     cfg: WuConfig, channel: ChannelErrorModel | None = None) -> None:
    traffic.check_against(timing)
    cfg.check_against(timing)
    # Channel/profile invariants are enforced at construction.
    _ = channel


def transition_probabilities(traffic: TrafficModel, timing: TimingParams,
                             channel: ChannelErrorModel,
                             cfg: WuConfig) -> SemiMarkovSummary:
    """Transition matrix of the embedded jump chain.

    From S1 the device wakes on a false alarm (no packet arrived within the
    cycle) or on correct detection (at least one packet arrived); S2 repeats
    while a new packet lands inside the service TTI; S3 returns to S2 when a
    packet beats the inactivity timer; S4 always hands over to S1.
    """
    _validate_inputs(traffic, timing, cfg, channel)
    lam = traffic.lam
    e_w = math.exp(-lam * cfg.t_w)
    e_s = math.exp(-lam * timing.t_s)
    e_i = math.exp(-lam * cfg.t_i)

    p12 = e_w * channel.p_fa + (1.0 - e_w) * (1.0 - channel.p_md)
    p = np.zeros((4, 4))
    p[0, 1] = p12
    p[0, 3] = 1.0 - p12
    p[1, 1] = 1.0 - e_s
    p[1, 2] = e_s
    p[2, 1] = 1.0 - e_i
    p[2, 3] = e_i
    p[3, 0] = 1.0
    return SemiMarkovSummary(p=p)


def steady_state(summary: SemiMarkovSummary) -> SemiMarkovSummary:
    """Closed-form jump-chain steady state.

    Solves the balance equations of the four-state chain.  The structure
    forces pi1 == pi4 (every sleep period is followed by exactly one
    monitoring occasion).

    Raises
    ------
    SingularChainError
        If P23 or P34 is zero, i.e. lam*t_s or lam*t_i is so large that the
        chain never leaves the active loop.
    """
    if summary.p is None:
        raise ValidationError("summary lacks transition probabilities")
    p = summary.p
    p12, p23, p34 = p[0, 1], p[1, 2], p[2, 3]
    if p23 <= 0.0 or p34 <= 0.0:
        raise SingularChainError(
            "degenerate chain: P23 and P34 must be positive "
            f"(P23={p23:g}, P34={p34:g})")

    pi1 = p34 * p23 / (2.0 * p34 * p23 + p12 * (1.0 + p23))
    pi2 = pi1 * p12 / (p23 * p34)
    pi3 = pi1 * p12 / p34
    pi = np.array([pi1, pi2, pi3, pi1])
    return SemiMarkovSummary(p=p, pi=pi, hold=summary.hold)


def expected_holding_times(traffic: TrafficModel, timing: TimingParams,
                           cfg: WuConfig) -> SemiMarkovSummary:
    """Expected holding times per state, ms.

    S1, S2 and S4 hold for fixed durations; S3 holds until the earlier of
    the next arrival and the inactivity timer, whose mean is
    (1 - exp(-lam*t_i)) / lam.
    """
    _validate_inputs(traffic, timing, cfg)
    lam = traffic.lam
    hold = np.array([
        timing.t_on,
        timing.t_s,
        -math.expm1(-lam * cfg.t_i) / lam,
        cfg.t_w - timing.t_on,
    ])
    return SemiMarkovSummary(hold=hold)


def analyze_chain(traffic: TrafficModel, timing: TimingParams,
                  channel: ChannelErrorModel, cfg: WuConfig) -> SemiMarkovSummary:
    """Transition matrix, steady state, and holding times in one pass."""
    summary = transition_probabilities(traffic, timing, channel, cfg)
    summary = steady_state(summary)
    hold = expected_holding_times(traffic, timing, cfg).hold
    return SemiMarkovSummary(p=summary.p, pi=summary.pi, hold=hold)
