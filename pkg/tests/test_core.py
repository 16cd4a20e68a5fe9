import math

import numpy as np
import pytest

from wakeopt import (ChannelErrorModel, PowerProfile, SemiMarkovSummary,
                     SingularChainError, TimingParams, TrafficModel,
                     ValidationError, WuConfig, analyze_chain,
                     expected_holding_times, steady_state,
                     transition_probabilities)


def chain(lam, tw, ti, pfa=0.0, pmd=0.0, tti=1.0, ton=0.0):
    return transition_probabilities(
        TrafficModel(lam), TimingParams(t_su=15.0, t_pd=10.0, t_on=ton, tti=tti),
        ChannelErrorModel(p_fa=pfa, p_md=pmd), WuConfig(t_w=tw, t_i=ti))


class TestTransitionProbabilities:
    def test_zero_rate_limit_no_false_alarm(self):
        # lam -> 0 with p_fa = 0: e^{-lam t_w} -> 1 kills both wake terms
        p = chain(1e-12, 100.0, 5.0).p
        assert p[0, 1] == pytest.approx(0.0, abs=1e-9)
        assert p[0, 3] == pytest.approx(1.0, abs=1e-9)

    def test_certain_arrival_perfect_detection(self):
        # lam*t_w large with clean signaling: always wakes
        p = chain(0.3, 5000.0, 5.0).p
        assert p[0, 1] == pytest.approx(1.0, abs=1e-12)

    def test_wake_probability_value_and_monte_carlo(self, rng):
        # lam=0.1/ms, t_w=100 ms, p_fa=0.1, p_md=0.01
        p12 = chain(0.1, 100.0, 5.0, pfa=0.1, pmd=0.01).p[0, 1]
        assert p12 == pytest.approx(0.98996, abs=1e-5)

        n = 2_000_000
        arrivals = rng.exponential(1.0 / 0.1, n) <= 100.0
        wake = np.where(arrivals, rng.random(n) < 0.99, rng.random(n) < 0.1)
        estimate = wake.mean()
        sigma = math.sqrt(estimate * (1 - estimate) / n)
        assert abs(p12 - estimate) <= 4 * sigma

    def test_rows_are_probability_distributions(self, rng):
        for _ in range(200):
            lam = rng.uniform(1e-3, 0.9)
            s = chain(lam, rng.uniform(1, 4000), rng.uniform(1, 400),
                      pfa=rng.uniform(0, 0.5), pmd=rng.uniform(0, 0.5))
            assert np.all(s.p >= 0.0) and np.all(s.p <= 1.0)
            assert np.allclose(s.p[:3].sum(axis=1), 1.0, atol=1e-12)
            assert s.p[3, 0] == 1.0

    def test_wake_probability_monotone_in_tw(self, rng):
        # nondecreasing in t_w whenever p_md < 1 - p_fa
        for _ in range(50):
            lam = rng.uniform(1e-3, 0.5)
            pfa = rng.uniform(0.0, 0.4)
            pmd = rng.uniform(0.0, min(0.5, 1 - pfa - 0.05))
            tws = np.sort(rng.uniform(1, 3000, size=8))
            vals = [chain(lam, tw, 5.0, pfa=pfa, pmd=pmd).p[0, 1] for tw in tws]
            assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_retrigger_probability_increasing_in_ti(self, rng):
        for _ in range(50):
            lam = rng.uniform(1e-3, 0.5)
            tis = np.sort(rng.uniform(1, 400, size=8))
            vals = [chain(lam, 100.0, ti).p[2, 1] for ti in tis]
            assert all(b >= a for a, b in zip(vals, vals[1:]))
            # strict growth wherever the exponential is still resolvable
            for (t1, v1), (t2, v2) in zip(zip(tis, vals), zip(tis[1:], vals[1:])):
                if math.exp(-lam * t2) > 1e-12:
                    assert v2 > v1


class TestSteadyState:
    def test_symmetric_cycle(self):
        # P12 = P23 = P34 = 1: pure S1->S2->S3->S4->S1 rotation
        p = np.zeros((4, 4))
        p[0, 1] = p[1, 2] = p[2, 3] = p[3, 0] = 1.0
        pi = steady_state(SemiMarkovSummary(p=p)).pi
        assert np.allclose(pi, 0.25, atol=1e-15)

    def test_monitor_and_sleep_visits_match_exactly(self, rng):
        for _ in range(100):
            s = chain(rng.uniform(1e-3, 0.9), rng.uniform(1, 4000),
                      rng.uniform(1, 400), pfa=rng.uniform(0, 0.9),
                      pmd=rng.uniform(0, 0.9))
            pi = steady_state(s).pi
            assert pi[0] == pi[3]

    def test_against_linear_solver(self):
        s = steady_state(chain(0.01, 180.0, 1.0))
        # generic balance-equation solve, independent of the closed form
        p = s.p
        a = np.vstack([p.T - np.eye(4), np.ones(4)])
        b = np.array([0.0, 0.0, 0.0, 0.0, 1.0])
        pi_ref, *_ = np.linalg.lstsq(a, b, rcond=None)
        assert np.allclose(s.pi, pi_ref, atol=1e-12)
        assert s.pi.sum() == pytest.approx(1.0, abs=1e-12)

    def test_balance_equations_hold(self, rng):
        for _ in range(100):
            s = steady_state(chain(rng.uniform(1e-3, 0.9), rng.uniform(1, 4000),
                                   rng.uniform(1, 400), pmd=rng.uniform(0, 0.5)))
            assert np.allclose(s.pi @ s.p, s.pi, atol=1e-10)
            assert s.pi.sum() == pytest.approx(1.0, abs=1e-10)

    def test_degenerate_chain_rejected(self):
        p = np.zeros((4, 4))
        p[0, 1] = 1.0
        p[1, 1] = 1.0  # never leaves decode: P23 = 0
        p[2, 1] = 1.0
        p[3, 0] = 1.0
        with pytest.raises(SingularChainError):
            steady_state(SemiMarkovSummary(p=p))

    def test_missing_transitions_rejected(self):
        with pytest.raises(ValidationError):
            steady_state(SemiMarkovSummary())


class TestHoldingTimes:
    def hold(self, lam, tw, ti, ton=0.0):
        return expected_holding_times(
            TrafficModel(lam), TimingParams(t_su=15.0, t_pd=10.0, t_on=ton, tti=1.0),
            WuConfig(t_w=tw, t_i=ti)).hold

    def test_inactivity_limit_small_rate(self):
        h = self.hold(1e-12, 100.0, 10.0)
        assert h[2] == pytest.approx(10.0, rel=1e-9)

    def test_inactivity_against_quadrature(self):
        from scipy.integrate import quad
        lam, ti = 0.1, 10.0
        expected, _ = quad(lambda t: min(t, ti) * lam * math.exp(-lam * t),
                           0.0, 80.0 / lam)
        h = self.hold(lam, 100.0, ti)
        assert h[2] == pytest.approx(expected, rel=1e-9)
        assert h[2] == pytest.approx((1 - math.exp(-1.0)) / 0.1, rel=1e-12)

    def test_sleep_duration_definition(self):
        h = self.hold(0.05, 100.0, 5.0, ton=1.0 / 14.0)
        assert h[3] == pytest.approx(100.0 - 1.0 / 14.0, rel=1e-15)
        assert h[0] == 1.0 / 14.0
        assert h[1] == 1.0

    def test_positive_and_bounded(self, rng):
        for _ in range(100):
            lam = rng.uniform(1e-3, 0.9)
            ti = rng.uniform(1, 400)
            h = self.hold(lam, rng.uniform(1, 4000), ti)
            assert np.all(h[1:] > 0)
            assert 0 < h[2] < ti


class TestValidation:
    def test_profile_ordering(self):
        with pytest.raises(ValidationError):
            PowerProfile(pw1=57.0, pw2=935.0, pw3=850.0, pw4=60.0)
        with pytest.raises(ValidationError):
            PowerProfile(pw1=57.0, pw2=800.0, pw3=850.0, pw4=0.0)
        assert PowerProfile(pw1=57.0, pw2=935.0, pw3=850.0, pw4=0.0).phi \
            == pytest.approx(1.1)

    def test_timing_invariants(self):
        with pytest.raises(ValidationError):
            TimingParams(t_su=0.0, t_pd=10.0, t_on=0.0, tti=1.0)
        with pytest.raises(ValidationError):
            TimingParams(t_su=15.0, t_pd=10.0, t_on=1.5, tti=1.0)
        with pytest.raises(ValidationError):
            TimingParams(t_su=15.0, t_pd=10.0, t_on=0.0, tti=1.0, t_s=2.0)

    def test_load_bound(self):
        timing = TimingParams(t_su=15.0, t_pd=10.0, t_on=0.0, tti=1.0)
        with pytest.raises(ValidationError):
            TrafficModel(1.2).check_against(timing)
        with pytest.raises(ValidationError):
            TrafficModel(-0.1)
        with pytest.raises(ValidationError):
            TrafficModel(math.inf)

    def test_config_bounds(self):
        timing = TimingParams(t_su=15.0, t_pd=10.0, t_on=0.0, tti=1.0)
        with pytest.raises(ValidationError):
            WuConfig(t_w=0.5, t_i=1.0).check_against(timing)
        with pytest.raises(ValidationError):
            WuConfig(t_w=10.0, t_i=2.5, integral=True).check_against(timing)
        WuConfig(t_w=10.0, t_i=2.0, integral=True).check_against(timing)

    def test_channel_bounds(self):
        with pytest.raises(ValidationError):
            ChannelErrorModel(p_fa=1.0)
        with pytest.raises(ValidationError):
            ChannelErrorModel(p_md=-0.1)


def test_analyze_chain_assembles_all_parts():
    summary = analyze_chain(TrafficModel(0.05),
                            TimingParams(t_su=15.0, t_pd=10.0, t_on=0.0, tti=1.0),
                            ChannelErrorModel(), WuConfig(t_w=200.0, t_i=5.0))
    assert summary.p is not None and summary.pi is not None \
        and summary.hold is not None
