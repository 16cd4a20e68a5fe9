import numpy as np
import pytest

from wakeopt import ChannelErrorModel, TrafficModel
from wakeopt.reference import REFERENCE_PROFILE, reference_timing


@pytest.fixture
def profile():
    return REFERENCE_PROFILE


@pytest.fixture
def timing():
    """Reference timing with zero on-duration (analytical setting)."""
    return reference_timing(t_on=0.0)


@pytest.fixture
def timing_ton():
    """Reference timing with the 1/14 ms on-duration."""
    return reference_timing()


@pytest.fixture
def ideal():
    return ChannelErrorModel(p_fa=0.0, p_md=0.0)


@pytest.fixture
def realistic():
    return ChannelErrorModel(p_fa=0.10, p_md=0.01)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_traffic(lam: float) -> TrafficModel:
    return TrafficModel(lam)
