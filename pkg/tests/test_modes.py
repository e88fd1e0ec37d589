import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oscneg.errors import InsufficientTruncationError
from oscneg.modes import (
    ScaledModeOperator,
    TruncationPolicy,
    char_function,
    char_function_from_spectrum,
    eigenvalue,
    eigenvalue_table,
    eigenvalues,
    omega,
    sigma,
    tail_bound,
    trace_norm_bound,
    truncated_trace_norm,
)
from oscneg.special import laguerre

a_st = st.floats(0.2, 5.0)
ell_st = st.integers(0, 5)


class TestCoefficients:
    def test_sigma_values(self):
        assert sigma(0, 1, 0.5) == 1.5
        assert sigma(1, 1, 0.5) == -0.5

    @given(st.floats(-0.9, 0.9), ell_st)
    def test_sigma_sums_to_one(self, x, ell):
        assert math.fsum(sigma(j, ell, x) for j in range(ell + 1)) == pytest.approx(1.0, abs=1e-12)

    @given(ell_st)
    def test_sigma_at_zero(self, ell):
        assert [sigma(j, ell, 0.0) for j in range(ell + 1)] == [1.0] + [0.0] * ell

    def test_sigma_range(self):
        with pytest.raises(IndexError):
            sigma(3, 2, 0.1)

    def test_omega_ground(self):
        n = np.arange(10)
        np.testing.assert_allclose(omega(n, 0, 0, 0.3), 0.7 * 0.3**n, rtol=1e-14)

    @given(ell_st, st.integers(0, 8))
    def test_omega_at_zero(self, ell, n):
        assert omega(n, ell, ell, 0.0) == (1.0 if n == 0 else 0.0)

    def test_omega_partial_sum(self):
        assert math.fsum(omega(np.arange(201), 1, 1, 0.5)) == pytest.approx(1.0, abs=1e-10)


class TestEigenvalues:
    @pytest.mark.parametrize("ell", range(4))
    def test_pure_state(self, ell):
        lam = eigenvalues(ScaledModeOperator(1.0, ell), 8)
        np.testing.assert_array_equal(lam, np.eye(9)[ell])

    def test_ground_case(self):
        lam = eigenvalues(ScaledModeOperator(3.0, 0), 20)
        np.testing.assert_allclose(lam, 0.5 * 0.5 ** np.arange(21), rtol=1e-14)

    def test_first_excited(self):
        assert eigenvalue(ScaledModeOperator(3.0, 1), 0) == pytest.approx(-0.25, abs=1e-15)

    def test_first_excited_closed_form(self):
        # l = 1: (1 + z) n z^(n-1) (1 - z)^2 - z (1 - z) z^n
        op = ScaledModeOperator(3.0, 1)
        z = op.zeta
        n = np.arange(30)
        ref = (1 + z) * (1 - z) ** 2 * n * z ** np.maximum(n - 1, 0) - z * (1 - z) * z**n
        np.testing.assert_allclose(eigenvalues(op, 29), ref, atol=1e-15)

    def test_table(self):
        T = eigenvalue_table(2.0, 3, 10)
        assert T.shape == (4, 11)
        np.testing.assert_allclose(T[2], eigenvalues(ScaledModeOperator(2.0, 2), 10))

    @given(a_st, ell_st)
    def test_trace_one_within_tail(self, a, ell):
        op = ScaledModeOperator(a, ell)
        n_max = 400
        tail = tail_bound(op, n_max)
        assert math.isfinite(tail)
        assert abs(math.fsum(eigenvalues(op, n_max)) - 1.0) <= tail + 1e-13


class TestTail:
    @given(a_st, ell_st, st.integers(20, 80))
    def test_tail_is_an_upper_bound(self, a, ell, n_max):
        op = ScaledModeOperator(a, ell)
        bound = tail_bound(op, n_max)
        lam = eigenvalues(op, n_max + 2000)
        actual = math.fsum(np.abs(lam[n_max + 1:]))
        assert actual <= bound * (1 + 1e-9) + 1e-300

    def test_too_short_window(self):
        assert tail_bound(ScaledModeOperator(3.0, 4), 2) == math.inf


class TestTraceNorm:
    def test_bound_values(self):
        assert trace_norm_bound(2.0, 3) == 8.0
        assert trace_norm_bound(0.5, 1) == 4.0
        assert all(trace_norm_bound(1.0, ell) == 1.0 for ell in range(6))

    @pytest.mark.parametrize("ell", range(4))
    def test_pure_state_norm(self, ell):
        value, tail = truncated_trace_norm(ScaledModeOperator(1.0, ell), TruncationPolicy(n_max=10))
        assert value == 1.0 and tail == 0.0

    def test_ground_case_equality(self):
        value, tail = truncated_trace_norm(ScaledModeOperator(3.0, 0), TruncationPolicy(n_max=60))
        assert value == pytest.approx(1.0, abs=tail + 1e-14)

    def test_first_excited_between(self):
        value, _ = truncated_trace_norm(ScaledModeOperator(3.0, 1), TruncationPolicy(n_max=80))
        assert 1.0 <= value <= 3.0

    def test_insufficient(self):
        with pytest.raises(InsufficientTruncationError) as info:
            truncated_trace_norm(ScaledModeOperator(0.05, 2), TruncationPolicy(n_max=10))
        assert info.value.achieved > 1e-10

    @given(a_st, ell_st)
    def test_never_exceeds_bound(self, a, ell):
        value, tail = truncated_trace_norm(ScaledModeOperator(a, ell), TruncationPolicy(n_max=600, tail_eps=1e-6))
        assert value <= trace_norm_bound(a, ell) * (1 + 1e-12) + tail


class TestCharFunction:
    def test_origin(self):
        assert char_function(ScaledModeOperator(2.3, 3), 0) == 1.0

    @given(ell_st, st.complex_numbers(max_magnitude=3))
    def test_fock_state(self, ell, z):
        r2 = abs(z) ** 2
        expected = laguerre(ell, r2 / 2) * math.exp(-r2 / 4)
        assert char_function(ScaledModeOperator(1.0, ell), z) == pytest.approx(expected, abs=1e-14)

    @given(a_st, st.complex_numbers(max_magnitude=3))
    def test_gaussian(self, a, z):
        expected = math.exp(-a * abs(z) ** 2 / 4)
        assert char_function(ScaledModeOperator(a, 0), z) == pytest.approx(expected, abs=1e-14)

    @given(st.floats(0.3, 4.0), ell_st, st.complex_numbers(max_magnitude=2))
    def test_spectral_sum(self, a, ell, z):
        op = ScaledModeOperator(a, ell)
        assert char_function_from_spectrum(op, z, 500) == pytest.approx(char_function(op, z), abs=1e-8)
