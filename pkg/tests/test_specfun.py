import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.special import lambertw as scipy_w

from wakeopt import Bracket, find_root, lambert_w0


class TestLambertW0:
    def test_fixed_points(self):
        assert lambert_w0(0.0) == 0.0
        assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-14)
        assert lambert_w0(-1.0 / math.e) == pytest.approx(-1.0, abs=1e-7)

    def test_defining_identity_on_log_grid(self):
        xs = np.concatenate([
            np.array([-1 / math.e + 1e-9, -0.3, -0.1, -1e-6]),
            np.logspace(-12, 6, 400),
        ])
        for x in xs:
            w = lambert_w0(float(x))
            assert w >= -1.0
            assert abs(w * math.exp(w) - x) <= 1e-12 * max(1.0, abs(x))

    def test_monotone_increasing(self):
        xs = np.concatenate([np.linspace(-1 / math.e + 1e-9, 0, 50),
                             np.logspace(-9, 6, 200)])
        ws = [lambert_w0(float(x)) for x in xs]
        assert all(b > a for a, b in zip(ws, ws[1:]))

    def test_against_scipy(self, rng):
        for _ in range(500):
            x = float(rng.uniform(-1 / math.e + 1e-12, 50.0))
            assert lambert_w0(x) == pytest.approx(
                float(scipy_w(x).real), rel=1e-10, abs=1e-12)

    def test_underflow_guard(self):
        # near 0, W0(x) ~ x; below 1e-300 the identity is exact in doubles
        assert lambert_w0(1e-310) == 1e-310
        assert lambert_w0(-0.0) == 0.0

    def test_domain_error(self):
        with pytest.raises(ValueError):
            lambert_w0(-1.0 / math.e - 1e-6)
        with pytest.raises(ValueError):
            lambert_w0(math.nan)
        # within the documented slack: branch point value
        assert lambert_w0(-1.0 / math.e - 1e-16) == -1.0


class TestFindRoot:
    def test_linear(self):
        assert find_root(lambda x: x - 2.0, Bracket(0.0, 10.0)) \
            == pytest.approx(2.0, abs=1e-12)

    def test_sqrt2(self):
        assert find_root(lambda x: x * x - 2.0, Bracket(1.0, 2.0)) \
            == pytest.approx(math.sqrt(2.0), abs=1e-12)

    def test_deterministic(self):
        f = lambda x: math.cos(x) - x
        a = find_root(f, Bracket(0.0, 1.0))
        b = find_root(f, Bracket(0.0, 1.0))
        assert a == b  # bit-identical

    def test_no_sign_change(self):
        with pytest.raises(ValueError):
            find_root(lambda x: x * x + 1.0, Bracket(-1.0, 1.0))

    def test_invalid_bracket(self):
        with pytest.raises(ValueError):
            Bracket(2.0, 1.0)

    def test_against_brentq(self, rng):
        funcs = [
            (lambda x: math.exp(x) - 3.0, 0.0, 2.0),
            (lambda x: x ** 3 - 7.0 * x + 1.0, 0.0, 1.0),
            (lambda x: math.tanh(x) - 0.5, 0.0, 2.0),
        ]
        for f, lo, hi in funcs:
            ours = find_root(f, Bracket(lo, hi), tol=1e-13)
            ref = brentq(f, lo, hi, xtol=1e-14)
            assert ours == pytest.approx(ref, abs=1e-9)

    def test_endpoint_roots(self):
        assert find_root(lambda x: x, Bracket(0.0, 1.0)) == 0.0
        assert find_root(lambda x: x - 1.0, Bracket(0.0, 1.0)) == 1.0
