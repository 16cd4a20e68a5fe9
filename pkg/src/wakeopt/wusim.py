"""Discrete-event simulator of the wake-up scheme state machine.

Each wake-up cycle sleeps for t_w - t_on, monitors the wake-up channel for
t_on, and decides at the end of the window: with packets buffered the
device wakes unless the indicator is misdetected (prob. p_md); with an
empty buffer a false alarm (prob. p_fa) wakes it anyway.  A wake-up pays
the start-up ramp, decodes all buffered packets in one concatenated TTI
(repeating while new packets land inside the service TTI), runs the
inactivity timer, and pays the power-down ramp back to sleep.  Ramp energy
is triangular: the area between the sleep level and the active level over
the ramp duration.

Conventions (chosen to match the analytical chain exactly under ideal
flags, see package docs):

* Arrivals are sampled over the state holding times; the power-down ramp
  carries no arrivals.  Start-up-ramp arrivals are modeled and join the
  first decode TTI.
* A packet arriving during a decode TTI is served in the next TTI; a packet
  that beats the inactivity timer is served from its arrival instant.
* ``mean_delay_ms`` is the model delay: every sleep window that receives at
  least one arrival contributes the wait of its first in-window arrival
  until the eventual decode instant (misdetection chains thus contribute
  one reward per window they span); the rewards are summed, divided by the
  number of state transitions, and offset by t_s/2.  This is exactly the
  quantity the closed-form delay expressions predict.
* ``mean_packet_delay_ms`` is the plain per-packet average (arrival to the
  start of the packet's decode TTI, plus t_s/2) over all served packets.

Identical seeds produce bit-identical reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (ChannelErrorModel, PowerProfile, TimingParams,
                   TrafficModel, ValidationError, WuConfig)
from .optimizer import Constraint, OptimizationResult, Regime, optimize

__all__ = ["SimConfig", "SimulationReport", "SweepPoint",
           "simulate", "energy_share_sweep", "derive_seed"]

_N_BATCHES = 32
_CHUNK = 1 << 14


@dataclass(frozen=True)
class SimConfig:
    """Simulation horizon and reproducibility knobs.

    Exactly one of ``n_cycles`` (measured sleep cycles) or ``horizon_ms``
    (measured simulated time) must be set.  A warm-up of
    ``warmup_fraction`` times the horizon runs before measurement starts.
    """

    seed: int = 0
    n_cycles: int | None = None
    horizon_ms: float | None = None
    warmup_fraction: float = 0.05

    def __post_init__(self) -> None:
        if (self.n_cycles is None) == (self.horizon_ms is None):
            raise ValidationError("set exactly one of n_cycles / horizon_ms")
        if self.n_cycles is not None and self.n_cycles <= 0:
            raise ValidationError("n_cycles must be positive")
        if self.horizon_ms is not None and self.horizon_ms <= 0:
            raise ValidationError("horizon_ms must be positive")
        if not 0.0 <= self.warmup_fraction < 1.0:
            raise ValidationError("warmup_fraction must be in [0, 1)")


@dataclass(frozen=True)
class SimulationReport:
    """Empirical power, delay, per-state energy shares, and event counters."""

    mean_power_mw: float
    power_stderr_mw: float
    mean_delay_ms: float
    delay_stderr_ms: float
    mean_packet_delay_ms: float
    energy_share: dict[str, float]
    counters: dict[str, int]
    transitions: int
    measured_time_ms: float
    seed: int


@dataclass(frozen=True)
class SweepPoint:
    """One sweep row: the optimized configuration and its simulation."""

    lam: float
    regime: Regime
    config: WuConfig
    optimum: OptimizationResult
    report: SimulationReport


def derive_seed(base_seed: int, index: int) -> int:
    """Independent per-point stream seed for reproducible parallel sweeps."""
    return int(np.random.SeedSequence((base_seed, index)).generate_state(1)[0])


class _Stream:
    """Chunked deterministic draws of one distribution from a shared rng."""

    def __init__(self, draw, chunk: int = _CHUNK) -> None:
        self._draw = draw
        self._chunk = chunk
        self._buf = draw(chunk)
        self._pos = 0

    def one(self) -> float:
        if self._pos >= len(self._buf):
            self._buf = self._draw(self._chunk)
            self._pos = 0
        v = self._buf[self._pos]
        self._pos += 1
        return v

    def many(self, k: int) -> np.ndarray:
        if self._pos + k > len(self._buf):
            self._buf = self._draw(max(self._chunk, k))
            self._pos = 0
        out = self._buf[self._pos:self._pos + k]
        self._pos += k
        return out


@dataclass
class _Accum:
    """Measurement accumulators, grouped into batches for standard errors."""

    energy: dict[str, float] = field(default_factory=dict)
    time: float = 0.0
    reward: float = 0.0
    transitions: int = 0
    packet_delay: float = 0.0
    packets: int = 0
    cycles: int = 0
    wakeups: int = 0
    false_alarms: int = 0
    misdetections: int = 0
    b_energy: np.ndarray = field(default_factory=lambda: np.zeros(_N_BATCHES))
    b_time: np.ndarray = field(default_factory=lambda: np.zeros(_N_BATCHES))
    b_reward: np.ndarray = field(default_factory=lambda: np.zeros(_N_BATCHES))
    b_transitions: np.ndarray = field(default_factory=lambda: np.zeros(_N_BATCHES))


def _stderr_ratio(num: np.ndarray, den: np.ndarray) -> float:
    """Standard error of a ratio estimate from batch means."""
    ok = den > 0
    if ok.sum() < 2:
        return math.nan
    ratios = num[ok] / den[ok]
    return float(ratios.std(ddof=1) / math.sqrt(ok.sum()))


def simulate(profile: PowerProfile, timing: TimingParams,
             traffic: TrafficModel, channel: ChannelErrorModel,
             cfg: WuConfig, sim: SimConfig) -> SimulationReport:
    """Run the wake-up scheme state machine and collect statistics."""
    traffic.check_against(timing)
    cfg.check_against(timing)

    lam = traffic.lam
    tw, ti = cfg.t_w, cfg.t_i
    ts, tsu, tpd, ton = timing.t_s, timing.t_su, timing.t_pd, timing.t_on
    pw1, pw2, pw3, pw4 = profile.pw1, profile.pw2, profile.pw3, profile.pw4
    e_startup = 0.5 * (pw2 + pw4) * tsu
    e_powerdown = 0.5 * (pw3 + pw4) * tpd

    rng = np.random.default_rng(np.random.PCG64(np.random.SeedSequence(sim.seed)))
    uni = _Stream(lambda n: rng.random(n))
    pois_win = _Stream(lambda n: rng.poisson(lam * tw, n))
    pois_tti = _Stream(lambda n: rng.poisson(lam * ts, n))
    pois_su = _Stream(lambda n: rng.poisson(lam * tsu, n))
    expo = _Stream(lambda n: rng.exponential(1.0 / lam, n))

    acc = _Accum()
    for key in ("sleep", "wrx_on", "decode", "inactivity", "startup", "powerdown"):
        acc.energy[key] = 0.0

    now = 0.0
    buffered = 0
    buf_sum = 0.0            # sum of buffered arrival instants
    pending_rewards = 0      # sleep windows awaiting their decode instant
    pending_sum = 0.0        # sum of those windows' first-arrival instants
    measuring = False
    measure_start = 0.0

    # horizon bookkeeping: warm-up runs first and is then discarded
    if sim.n_cycles is not None:
        warm_target = int(sim.warmup_fraction * sim.n_cycles)
        main_target = sim.n_cycles
    else:
        warm_target = sim.warmup_fraction * sim.horizon_ms
        main_target = sim.horizon_ms

    def progress() -> float:
        if sim.n_cycles is not None:
            return acc.cycles / main_target
        return (now - measure_start) / main_target

    def done() -> bool:
        if sim.n_cycles is not None:
            return acc.cycles >= main_target
        return now - measure_start >= main_target

    def warmup_done() -> bool:
        if sim.n_cycles is not None:
            return acc.cycles >= warm_target
        return now >= warm_target

    def spend(key: str, duration: float, energy: float, batch: int) -> None:
        acc.time += duration
        acc.energy[key] += energy
        acc.b_time[batch] += duration
        acc.b_energy[batch] += energy

    state = "sleep"
    while True:
        if measuring:
            if done():
                break
        elif warmup_done():
            # reset statistics, keep machine state and rng position
            acc = _Accum()
            for key in ("sleep", "wrx_on", "decode", "inactivity",
                        "startup", "powerdown"):
                acc.energy[key] = 0.0
            measuring = True
            measure_start = now

        b = min(_N_BATCHES - 1, int(_N_BATCHES * max(progress(), 0.0))) if measuring else 0

        if state == "sleep":
            # S4 sleep then S1 monitoring; arrivals span the whole window
            acc.transitions += 2
            acc.b_transitions[b] += 2
            t0 = now
            spend("sleep", tw - ton, pw4 * (tw - ton), b)
            spend("wrx_on", ton, pw1 * ton, b)
            now = t0 + tw
            k = int(pois_win.one())
            if k:
                offs = uni.many(k)
                pending_rewards += 1
                pending_sum += t0 + float(offs.min()) * tw
                buffered += k
                buf_sum += k * t0 + float(offs.sum()) * tw
            acc.cycles += 1
            decision = uni.one()
            if buffered > 0:
                if decision >= channel.p_md:
                    acc.wakeups += 1
                    state = "startup"
                else:
                    acc.misdetections += 1
            else:
                if decision < channel.p_fa:
                    acc.wakeups += 1
                    acc.false_alarms += 1
                    state = "startup"

        elif state == "startup":
            t0 = now
            spend("startup", tsu, e_startup, b)
            now = t0 + tsu
            k = int(pois_su.one())
            if k:
                # joins the first decode TTI; not a sleep-window reward
                offs = uni.many(k)
                buffered += k
                buf_sum += k * t0 + float(offs.sum()) * tsu
            state = "decode" if buffered > 0 else "inactivity"

        elif state == "decode":
            acc.transitions += 1
            acc.b_transitions[b] += 1
            t0 = now
            if pending_rewards:
                gain = pending_rewards * t0 - pending_sum
                acc.reward += gain
                acc.b_reward[b] += gain
                pending_rewards = 0
                pending_sum = 0.0
            acc.packet_delay += buffered * (t0 + ts / 2.0) - buf_sum
            acc.packets += buffered
            buffered = 0
            buf_sum = 0.0
            spend("decode", ts, pw2 * ts, b)
            now = t0 + ts
            k = int(pois_tti.one())
            if k:
                offs = uni.many(k)
                buffered = k
                buf_sum = k * t0 + float(offs.sum()) * ts
                # stays in "decode": next TTI serves them
            else:
                state = "inactivity"

        elif state == "inactivity":
            acc.transitions += 1
            acc.b_transitions[b] += 1
            t0 = now
            gap = expo.one()
            if gap <= ti:
                spend("inactivity", gap, pw3 * gap, b)
                now = t0 + gap
                buffered = 1
                buf_sum = now  # served from its arrival instant
                state = "decode"
            else:
                spend("inactivity", ti, pw3 * ti, b)
                now = t0 + ti
                state = "powerdown"

        else:  # powerdown; no arrivals land inside the ramp
            spend("powerdown", tpd, e_powerdown, b)
            now += tpd
            state = "sleep"

    total_energy = sum(acc.energy.values())
    mean_power = total_energy / acc.time
    mean_delay = acc.reward / acc.transitions + ts / 2.0
    return SimulationReport(
        mean_power_mw=mean_power,
        power_stderr_mw=_stderr_ratio(acc.b_energy, acc.b_time),
        mean_delay_ms=mean_delay,
        delay_stderr_ms=_stderr_ratio(acc.b_reward, acc.b_transitions),
        mean_packet_delay_ms=(acc.packet_delay / acc.packets
                              if acc.packets else math.nan),
        energy_share={k: v / total_energy for k, v in acc.energy.items()},
        counters={
            "cycles": acc.cycles,
            "wakeups": acc.wakeups,
            "false_alarms": acc.false_alarms,
            "misdetections": acc.misdetections,
            "packets": acc.packets,
        },
        transitions=acc.transitions,
        measured_time_ms=acc.time,
        seed=sim.seed,
    )


def energy_share_sweep(profile: PowerProfile, timing: TimingParams,
                       channel: ChannelErrorModel, lambdas,
                       constraint: Constraint,
                       sim: SimConfig) -> list[SweepPoint]:
    """Optimize then simulate each arrival rate; report per-state energy.

    Rates above the turnoff rate use the optimizer's advisory finite
    configuration.  Requires a time-based horizon: advisory configurations
    sleep so rarely that a cycle-count horizon might never finish.  Each
    point gets an independent stream derived from (seed, index).
    """
    if sim.horizon_ms is None:
        raise ValidationError("energy_share_sweep needs a horizon_ms SimConfig")
    rows: list[SweepPoint] = []
    for idx, lam in enumerate(lambdas):
        traffic = TrafficModel(lam)
        opt = optimize(profile, timing, traffic, constraint)
        if opt.regime is Regime.WUS_EFFECTIVE:
            cfg = WuConfig(t_w=opt.t_w_star, t_i=opt.t_i_star, integral=True)
        else:
            cfg = opt.advisory_config
        point_sim = SimConfig(seed=derive_seed(sim.seed, idx),
                              horizon_ms=sim.horizon_ms,
                              warmup_fraction=sim.warmup_fraction)
        report = simulate(profile, timing, traffic, channel, cfg, point_sim)
        rows.append(SweepPoint(lam=lam, regime=opt.regime, config=cfg,
                               optimum=opt, report=report))
    return rows
