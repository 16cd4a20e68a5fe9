import math

import numpy as np
import pytest
from scipy.integrate import quad

from wakeopt import (ChannelErrorModel, PowerProfile, TimingParams,
                     TrafficModel, ValidationError, WuConfig,
                     average_delay_full, average_delay_simplified,
                     average_power_full, average_power_simplified,
                     delay_gradient, power_gradient)
from wakeopt.wusim import SimConfig, simulate


def cfg(tw, ti):
    return WuConfig(t_w=tw, t_i=ti)


def fd_reliable(grad, step, value) -> bool:
    """Central differences only resolve |f'|*h above the cancellation floor."""
    return abs(grad) * step > 1e8 * 0.5e-16 * abs(value)


class TestPowerFull:
    def test_constant_profile_yields_constant_power(self, timing, ideal):
        flat = PowerProfile(pw1=7.0, pw2=7.0, pw3=7.0, pw4=7.0)
        for tw, ti in [(10.0, 1.0), (500.0, 30.0), (3000.0, 200.0)]:
            p = average_power_full(flat, timing, TrafficModel(0.05), ideal,
                                   cfg(tw, ti))
            assert p == pytest.approx(7.0, rel=1e-12)

    def test_reduces_to_simplified_under_flags(self, profile, timing, ideal, rng):
        # p_fa = p_md = 0, t_on = 0, pw4 = 0: the two forms coincide
        for _ in range(200):
            lam = rng.uniform(1e-3, 0.5)
            c = cfg(rng.uniform(1, 4000), rng.uniform(1, 300))
            full = average_power_full(profile, timing, TrafficModel(lam), ideal, c)
            simp = average_power_simplified(profile, timing, TrafficModel(lam), c)
            assert full == pytest.approx(simp, rel=1e-12)

    def test_reference_power_at_published_optimum(self, profile, timing_ton, ideal):
        p = average_power_full(profile, timing_ton, TrafficModel(0.15), ideal,
                               cfg(2246.0, 1.0))
        assert p == pytest.approx(5.9, rel=0.02)


class TestPowerSimplified:
    def test_vanishes_for_huge_cycles(self, profile, timing):
        p = average_power_simplified(profile, timing, TrafficModel(0.05),
                                     cfg(1e7, 5.0))
        assert p < 0.01

    def test_reference_value(self, profile, timing):
        p = average_power_simplified(profile, timing, TrafficModel(0.01),
                                     cfg(180.0, 1.0))
        assert abs(p - 54.2) <= 1.0


class TestPowerGradient:
    def test_signs_everywhere(self, profile, timing, rng):
        for _ in range(300):
            lam = rng.uniform(0.001, 0.3)
            g = power_gradient(profile, timing, TrafficModel(lam),
                               cfg(rng.uniform(1, 5000), rng.uniform(1, 500)))
            assert g.d_ti > 0.0
            assert g.d_tw < 0.0

    def test_matches_finite_differences_at_reference_point(self, profile, timing):
        lam, tw, ti, h = 0.05, 200.0, 5.0, 1e-4
        tr = TrafficModel(lam)
        g = power_gradient(profile, timing, tr, cfg(tw, ti))
        fd_ti = (average_power_simplified(profile, timing, tr, cfg(tw, ti + h))
                 - average_power_simplified(profile, timing, tr, cfg(tw, ti - h))) / (2 * h)
        fd_tw = (average_power_simplified(profile, timing, tr, cfg(tw + h, ti))
                 - average_power_simplified(profile, timing, tr, cfg(tw - h, ti))) / (2 * h)
        assert g.d_ti == pytest.approx(fd_ti, rel=1e-6)
        assert g.d_tw == pytest.approx(fd_tw, rel=1e-6)


class TestDelayFull:
    def test_single_term_equals_simplified_when_clean(self, timing, ideal):
        tr = TrafficModel(0.04)
        c = cfg(250.0, 3.0)
        est = average_delay_full(timing, tr, ideal, c, series_terms=1)
        assert est.delay == pytest.approx(
            average_delay_simplified(timing, tr, c), rel=1e-12)
        assert not est.truncated

    def test_monotone_in_series_terms(self, timing):
        tr = TrafficModel(0.05)
        chan = ChannelErrorModel(p_md=0.5)
        c = cfg(100.0, 2.0)
        values = [average_delay_full(timing, tr, chan, c, series_terms=n).delay
                  for n in range(1, 12)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_truncation_metadata(self, timing):
        tr = TrafficModel(0.05)
        chan = ChannelErrorModel(p_md=0.5)
        short = average_delay_full(timing, tr, chan, cfg(100.0, 2.0), series_terms=3)
        assert short.truncated and short.tail_mass == pytest.approx(0.125)
        auto = average_delay_full(timing, tr, chan, cfg(100.0, 2.0))
        assert not auto.truncated and auto.tail_mass <= 1e-12

    def test_against_event_simulation(self, profile, timing):
        # misdetections included; simulator measures the same convention
        tr = TrafficModel(0.08)
        chan = ChannelErrorModel(p_md=0.01)
        c = WuConfig(t_w=315.0, t_i=1.0, integral=True)
        est = average_delay_full(timing, tr, chan, c)
        rep = simulate(profile, timing, tr, chan, c,
                       SimConfig(seed=11, n_cycles=200_000))
        assert abs(rep.mean_delay_ms - est.delay) <= 2.0 * rep.delay_stderr_ms

    def test_dominates_simplified(self, timing):
        tr = TrafficModel(0.05)
        c = cfg(300.0, 4.0)
        simp = average_delay_simplified(timing, tr, c)
        with_md = average_delay_full(timing, tr, ChannelErrorModel(p_md=0.3), c)
        clean = average_delay_full(timing, tr, ChannelErrorModel(), c)
        assert with_md.delay > simp
        assert clean.delay == pytest.approx(simp, rel=1e-12)

    def test_series_terms_validation(self, timing, ideal):
        with pytest.raises(ValidationError):
            average_delay_full(timing, TrafficModel(0.05), ideal,
                               cfg(100.0, 2.0), series_terms=0)


class TestDelaySimplified:
    def test_large_timer_floor(self, timing):
        d = average_delay_simplified(timing, TrafficModel(0.1), cfg(50.0, 500.0))
        assert d == pytest.approx(timing.t_s / 2.0, abs=1e-9)

    def test_published_bound_at_optimal_cycle(self, timing):
        # optimizer's floored cycle for (lam=0.01, d_max=30) is 179 ms
        d = average_delay_simplified(timing, TrafficModel(0.01), cfg(179.0, 1.0))
        assert d <= 30.0
        assert 29.0 <= d <= 30.0

    def test_against_quadrature(self, timing):
        lam, tw, ti, ts, tsu = 0.1, 50.0, 3.0, timing.t_s, timing.t_su
        mass, _ = quad(lambda t: lam * math.exp(-lam * t) * (tw + tsu - t),
                       0.0, tw)
        pi4 = 1.0 / (2.0 + (1 - math.exp(-lam * tw))
                     * (1 + math.exp(lam * ts)) * math.exp(lam * ti))
        expected = pi4 * mass + ts / 2.0
        d = average_delay_simplified(timing, TrafficModel(lam), cfg(tw, ti))
        assert d == pytest.approx(expected, rel=1e-9)


class TestDelayGradient:
    def test_signs_everywhere(self, timing, rng):
        for _ in range(300):
            lam = rng.uniform(0.001, 0.3)
            g = delay_gradient(timing, TrafficModel(lam),
                               cfg(rng.uniform(1, 5000), rng.uniform(1, 500)))
            assert g.d_tw > 0.0
            assert g.d_ti < 0.0


class TestGradientsAgainstFiniteDifferences:
    def test_randomized_grid(self, profile, timing, rng):
        checked = 0
        while checked < 400:
            lam = rng.uniform(0.001, 0.3)
            tw = rng.uniform(1, 5000)
            ti = rng.uniform(1, 500)
            tr = TrafficModel(lam)
            h_tw = 1e-5 * (1 + tw)
            h_ti = 1e-5 * (1 + ti)

            p0 = average_power_simplified(profile, timing, tr, cfg(tw, ti))
            d0 = average_delay_simplified(timing, tr, cfg(tw, ti))
            fd = {
                "p_tw": (average_power_simplified(profile, timing, tr, cfg(tw + h_tw, ti))
                         - average_power_simplified(profile, timing, tr, cfg(tw - h_tw, ti))) / (2 * h_tw),
                "p_ti": (average_power_simplified(profile, timing, tr, cfg(tw, ti + h_ti))
                         - average_power_simplified(profile, timing, tr, cfg(tw, ti - h_ti))) / (2 * h_ti),
                "d_tw": (average_delay_simplified(timing, tr, cfg(tw + h_tw, ti))
                         - average_delay_simplified(timing, tr, cfg(tw - h_tw, ti))) / (2 * h_tw),
                "d_ti": (average_delay_simplified(timing, tr, cfg(tw, ti + h_ti))
                         - average_delay_simplified(timing, tr, cfg(tw, ti - h_ti))) / (2 * h_ti),
            }
            if not (fd_reliable(fd["p_tw"], h_tw, p0) and fd_reliable(fd["p_ti"], h_ti, p0)
                    and fd_reliable(fd["d_tw"], h_tw, d0) and fd_reliable(fd["d_ti"], h_ti, d0)):
                continue
            checked += 1
            pg = power_gradient(profile, timing, tr, cfg(tw, ti))
            dg = delay_gradient(timing, tr, cfg(tw, ti))
            assert pg.d_tw == pytest.approx(fd["p_tw"], rel=1e-6)
            assert pg.d_ti == pytest.approx(fd["p_ti"], rel=1e-6)
            assert dg.d_tw == pytest.approx(fd["d_tw"], rel=1e-6)
            assert dg.d_ti == pytest.approx(fd["d_ti"], rel=1e-6)
