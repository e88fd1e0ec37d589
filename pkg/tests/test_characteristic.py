import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oscneg.characteristic import (
    ensemble_char,
    ensemble_pt_char,
    eigenstate_char,
    gaussian_char,
    ground_state_char,
    normal_mode_char,
    rotate,
    stack,
)
from oscneg.fock import FockOracle
from oscneg.special import enumerate_sector, laguerre
from oscneg.spectral import build_correlation_frame, eigendecompose

from conftest import HAND_H, random_frame


def random_f(rng, n, radius=1.0):
    f = rng.normal(size=n) + 1j * rng.normal(size=n)
    return f * rng.uniform(0, radius) / np.linalg.norm(f)


f_st = st.lists(st.complex_numbers(max_magnitude=1.5), min_size=2, max_size=2)


class TestGround:
    def test_origin(self, hand_frame):
        assert ground_state_char(hand_frame, [0, 0]) == 1.0
        assert eigenstate_char(hand_frame, [2, 1], [0, 0]) == 1.0

    @given(f_st)
    def test_matches_gaussian(self, f):
        fr = eigendecompose(HAND_H)
        M = build_correlation_frame(fr, []).M
        expected = math.exp(-float(stack(f) @ M @ stack(f)) / 4)
        assert ground_state_char(fr, f) == pytest.approx(expected, rel=1e-12)
        Gamma = build_correlation_frame(fr, []).ground_correlation()
        assert gaussian_char(Gamma, f) == pytest.approx(expected, rel=1e-12)

    @given(f_st, st.floats(0.1, 3.0))
    def test_quadratic_scaling(self, f, t):
        fr = eigendecompose(HAND_H)
        base = ground_state_char(fr, f)
        scaled = ground_state_char(fr, [t * v for v in f])
        if base > 1e-200:
            assert math.log(scaled) == pytest.approx(t * t * math.log(base), rel=1e-10, abs=1e-14)

    def test_rotation_norm(self, hand_frame):
        f = np.array([0.3 + 0.1j, -0.2 + 0.4j])
        v = rotate(hand_frame, f)
        M = build_correlation_frame(hand_frame, []).M
        assert np.vdot(v, v).real == pytest.approx(float(stack(f) @ M @ stack(f)), rel=1e-13)


class TestEigenstate:
    def test_ground_alpha(self, hand_frame):
        f = [0.4 - 0.2j, 0.1j]
        assert eigenstate_char(hand_frame, [0, 0], f) == pytest.approx(ground_state_char(hand_frame, f), rel=1e-15)

    @given(st.integers(0, 6), st.complex_numbers(max_magnitude=2))
    def test_single_site(self, n, z):
        fr = eigendecompose([[1.0]])
        r2 = abs(z) ** 2
        assert eigenstate_char(fr, [n], [z]) == pytest.approx(laguerre(n, r2 / 2) * math.exp(-r2 / 4), abs=1e-14)

    def test_wrong_length(self, hand_frame):
        with pytest.raises(ValueError):
            eigenstate_char(hand_frame, [1], [0.1, 0.2])

    def test_against_oracle(self, hand_frame):
        oracle = FockOracle(HAND_H, 18)
        rng = np.random.default_rng(11)
        for alpha in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)]:
            f = random_f(rng, 2)
            assert eigenstate_char(hand_frame, alpha, f) == pytest.approx(oracle.eigenstate_char(alpha, f), abs=1e-7)


class TestEnsemble:
    @pytest.mark.parametrize("N", range(4))
    def test_origin(self, hand_frame, N):
        assert ensemble_pt_char(hand_frame, [0], N, [0, 0]) == pytest.approx(1.0, rel=1e-14)

    @given(f_st)
    def test_n0_is_gaussian_in_mtilde(self, f):
        fr = eigendecompose(HAND_H)
        Mt = build_correlation_frame(fr, [0]).Mtilde
        expected = math.exp(-float(stack(f) @ Mt @ stack(f)) / 4)
        assert ensemble_pt_char(fr, [0], 0, f) == pytest.approx(expected, rel=1e-12)

    @given(st.integers(0, 1000), st.integers(1, 4), st.integers(0, 4))
    def test_untransposed_is_sector_average(self, seed, n, N):
        rng = np.random.default_rng(seed)
        fr = random_frame(rng, n)
        f = random_f(rng, n, 1.5)
        avg = [eigenstate_char(fr, al, f) for al in enumerate_sector(n, N)]
        assert ensemble_char(fr, N, f) == pytest.approx(math.fsum(avg) / len(avg), abs=1e-12)

    @given(st.integers(0, 1000), st.integers(0, 3))
    def test_normal_mode_form_at_origin(self, seed, N):
        d = np.random.default_rng(seed).uniform(0.5, 2.0, 3)
        assert normal_mode_char(d, N, [0, 0, 0]) == pytest.approx(1.0, rel=1e-14)

    def test_partial_transpose_against_oracle(self, hand_frame):
        oracle = FockOracle(HAND_H, 16, region=[0])
        rng = np.random.default_rng(5)
        for N in (0, 1, 2):
            for _ in range(3):
                f = random_f(rng, 2)
                ref = oracle.ensemble_pt_char(N, f)
                assert ensemble_pt_char(hand_frame, [0], N, f) == pytest.approx(ref, abs=1e-6)
