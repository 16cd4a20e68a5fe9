"""Reference parameter sets and published validation values.

Power levels are representative measurements of an LTE-class cellular
module at 20 MHz carrier bandwidth; the wake-up receiver draws 57 mW while
monitoring and the baseband decodes at 935 mW against an 850 mW
inactive-active level (decode-to-idle ratio 1.1).  The validation tables
below hold the published optimal wake-up cycles and minimum power values
for this module, used by the ``reproduce`` CLI targets and the acceptance
suite.
"""

from __future__ import annotations

from .core import ChannelErrorModel, PowerProfile, TimingParams
from .drx import DrxPowerTable

__all__ = [
    "REFERENCE_PROFILE",
    "reference_timing",
    "REFERENCE_CHANNEL_IDEAL",
    "REFERENCE_CHANNEL_REALISTIC",
    "REFERENCE_DRX_TABLE",
    "REFERENCE_T_ON",
    "REFERENCE_OPTIMAL_TW",
    "REFERENCE_MIN_POWER",
]

#: WRx monitoring, decode, inactive-active, and sleep levels, mW.
REFERENCE_PROFILE = PowerProfile(pw1=57.0, pw2=935.0, pw3=850.0, pw4=0.0)

#: WRx on-duration: one OFDM symbol of a 14-symbol 1 ms subframe.
REFERENCE_T_ON = 1.0 / 14.0


def reference_timing(tti: float = 1.0, t_on: float | None = None) -> TimingParams:
    """Reference timing (15 ms start-up, 10 ms power-down) at a given TTI.

    ``t_on`` defaults to the reference on-duration when it fits into the
    TTI and to zero otherwise (sub-ms TTIs are used analytically, where the
    on-duration plays no role).
    """
    if t_on is None:
        t_on = REFERENCE_T_ON if REFERENCE_T_ON < tti else 0.0
    return TimingParams(t_su=15.0, t_pd=10.0, t_on=t_on, tti=tti)


REFERENCE_CHANNEL_IDEAL = ChannelErrorModel(p_fa=0.0, p_md=0.0)

#: Wake-up signaling error rates of the realistic receiver design.
REFERENCE_CHANNEL_REALISTIC = ChannelErrorModel(p_fa=0.10, p_md=0.01)

#: LTE module measurements for short and long DRX cycles.
REFERENCE_DRX_TABLE = DrxPowerTable(
    pw_sleep_short=395.0, pw_sleep_long=0.0,
    pw_active=850.0, pw_decode=935.0,
    t_su_short=1.0, t_pd_short=1.0,
    t_su_long=15.0, t_pd_long=10.0,
)

#: Published optimal wake-up cycles [ms] per (lam [pkts/ms], d_max [ms]),
#: with a one-TTI inactivity timer.
REFERENCE_OPTIMAL_TW: dict[tuple[float, float], float] = {
    (0.01, 30.0): 180.0, (0.01, 75.0): 380.0, (0.01, 500.0): 2099.0,
    (0.08, 30.0): 124.0, (0.08, 75.0): 315.0, (0.08, 500.0): 2124.0,
    (0.15, 30.0): 125.0, (0.15, 75.0): 328.0, (0.15, 500.0): 2246.0,
}

#: Published minimum power [mW] per TTI [ms] and (lam, d_max) pair.
REFERENCE_MIN_POWER: dict[float, dict[tuple[float, float], float]] = {
    1.0: {
        (0.01, 30.0): 54.2, (0.01, 75.0): 31.6, (0.01, 500.0): 6.6,
        (0.08, 30.0): 88.7, (0.08, 75.0): 39.0, (0.08, 500.0): 6.1,
        (0.15, 30.0): 88.9, (0.15, 75.0): 38.1, (0.15, 500.0): 5.9,
    },
    0.5: {
        (0.01, 30.0): 50.4, (0.01, 75.0): 29.4, (0.01, 500.0): 5.7,
        (0.08, 30.0): 83.7, (0.08, 75.0): 36.8, (0.08, 500.0): 5.8,
        (0.15, 30.0): 85.4, (0.15, 75.0): 36.6, (0.15, 500.0): 5.7,
    },
    0.25: {
        (0.01, 30.0): 48.3, (0.01, 75.0): 28.1, (0.01, 500.0): 5.5,
        (0.08, 30.0): 81.1, (0.08, 75.0): 35.7, (0.08, 500.0): 5.7,
        (0.15, 30.0): 83.7, (0.15, 75.0): 35.9, (0.15, 500.0): 5.6,
    },
    0.125: {
        (0.01, 30.0): 47.5, (0.01, 75.0): 27.7, (0.01, 500.0): 5.4,
        (0.08, 30.0): 80.1, (0.08, 75.0): 35.3, (0.08, 500.0): 5.6,
        (0.15, 30.0): 83.1, (0.15, 75.0): 35.7, (0.15, 500.0): 5.6,
    },
}
