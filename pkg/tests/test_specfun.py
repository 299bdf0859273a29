import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbmlt.errors import AdmissibilityError
from mbmlt.specfun import (
    HurstFunctional,
    TruncationParams,
    check_A2,
    gamma_factor,
    hermite_function,
    minimal_truncation,
    normalizing_constant,
)

from .oracles import gauss_hermite_inner, hermite_direct


class TestNormalizingConstant:
    def test_half(self):
        # Gamma(2) = 1, sin(pi/2) = 1
        assert normalizing_constant(0.5) == pytest.approx(math.sqrt(2 * math.pi), abs=1e-14)

    def test_three_quarters(self):
        # frozen from Gamma(5/2) = 3 sqrt(pi)/4, sin(3 pi/4) = sqrt(2)/2
        assert normalizing_constant(0.75) == pytest.approx(2.5854094580322607, rel=1e-13)

    @pytest.mark.parametrize("x", [0.55, 0.95])
    def test_finite_positive(self, x):
        c = normalizing_constant(x)
        assert np.isfinite(c) and c > 0

    @pytest.mark.parametrize("x", [-0.1, 0.0, 1.0, 1.5])
    def test_domain(self, x):
        with pytest.raises(ValueError):
            normalizing_constant(x)

    @given(st.floats(min_value=0.01, max_value=0.99))
    @settings(max_examples=60, deadline=None)
    def test_defining_identity(self, x):
        from scipy.special import gamma

        c = normalizing_constant(x)
        assert c ** 2 * gamma(2 * x + 1) * math.sin(math.pi * x) == pytest.approx(
            2 * math.pi, rel=1e-12
        )


class TestGammaFactor:
    def test_vanishes_at_half(self):
        # Gamma(H - 1/2) pole: gamma_factor -> 0 as H -> 1/2+
        assert abs(gamma_factor(0.5 + 1e-9)) < 1e-8

    def test_frozen_values(self):
        assert gamma_factor(0.75) == pytest.approx(0.14472187625540384, rel=1e-13)
        assert gamma_factor(0.9) == pytest.approx(0.20054477317132445, rel=1e-13)

    @pytest.mark.parametrize("H", [0.5, 1.0, 0.3, 1.2])
    def test_domain(self, H):
        with pytest.raises(ValueError):
            gamma_factor(H)


class TestHermiteFunction:
    def test_ground_state(self):
        assert hermite_function(0, 0.0) == pytest.approx(math.pi ** -0.25, rel=1e-14)

    def test_odd_at_zero(self):
        assert hermite_function(1, 0.0) == 0.0

    @pytest.mark.parametrize("j", range(9))
    @pytest.mark.parametrize("k", range(9))
    def test_orthonormality(self, j, k):
        val = gauss_hermite_inner(j, k, hermite_function)
        assert val == pytest.approx(1.0 if j == k else 0.0, abs=1e-8)

    @pytest.mark.parametrize("k", range(11))
    def test_matches_direct_definition(self, k):
        for x in np.linspace(-4.0, 4.0, 20):
            assert hermite_function(k, x) == pytest.approx(
                hermite_direct(k, x), abs=1e-9
            )

    def test_extreme_argument_underflows_to_zero(self):
        assert hermite_function(3, 60.0) == 0.0

    def test_negative_index(self):
        with pytest.raises(ValueError):
            hermite_function(-1, 0.0)


class TestHurstFunctional:
    def test_range_violation(self):
        with pytest.raises(AdmissibilityError):
            HurstFunctional.constant(0.45)
        with pytest.raises(AdmissibilityError):
            HurstFunctional.linear(0.6, 0.5)  # exceeds 1 at t = 0.8

    def test_sinusoidal_wide_range_rejected(self):
        # amplitude takes the range below 1/2
        with pytest.raises(AdmissibilityError):
            HurstFunctional.sinusoidal(0.4, 0.5, 5 * math.pi)

    def test_discontinuous_rejected(self):
        step = lambda t: 0.6 if t < 0.5 else 0.8
        with pytest.raises(AdmissibilityError):
            HurstFunctional(T=1.0, eval=step)

    def test_call_and_sup(self, h_linear):
        assert h_linear(0.0) == pytest.approx(0.55)
        assert h_linear(1.0) == pytest.approx(0.75)
        assert h_linear.sup == pytest.approx(0.75, abs=1e-6)

    def test_from_config(self):
        h = HurstFunctional.from_config({"const": 0.7})
        assert h(0.3) == 0.7
        h = HurstFunctional.from_config({"linear": {"a": 0.55, "b": 0.2}})
        assert h(0.5) == pytest.approx(0.65)
        h = HurstFunctional.from_config({"sin": {"a": 0.7, "b": 0.05, "omega": 3.0}})
        assert h(0.0) == pytest.approx(0.7)
        with pytest.raises(ValueError):
            HurstFunctional.from_config({"spline": []})

    def test_out_of_horizon(self, h_const_07):
        with pytest.raises(ValueError):
            h_const_07(1.5)


class TestCheckA2:
    def test_d1_passes(self, h_const_06):
        ok, diag = check_A2(h_const_06, N=0, d=1)
        assert ok and diag["bound"] == 1.0

    def test_d3_fails(self, h_const_06):
        ok, diag = check_A2(h_const_06, N=0, d=3)
        assert not ok
        assert diag["bound"] == pytest.approx(1 / 3)

    def test_minimal_truncation_d3(self, h_const_06):
        # N=1 gives bound 3/5 = 0.6, not strictly above; N=2 gives 5/7
        assert minimal_truncation(h_const_06, d=3) == 2
        assert check_A2(h_const_06, N=2, d=3)[0]

    @given(st.integers(min_value=0, max_value=20), st.integers(min_value=1, max_value=5))
    @settings(max_examples=40, deadline=None)
    def test_monotone_in_N(self, N, d):
        h = HurstFunctional.constant(0.72)
        if check_A2(h, N, d)[0]:
            assert check_A2(h, N + 1, d)[0]

    def test_bound_nondecreasing(self):
        for d in (1, 2, 3):
            bounds = [TruncationParams(N=N, d=d).bound for N in range(10)]
            assert all(b2 >= b1 for b1, b2 in zip(bounds, bounds[1:]))
