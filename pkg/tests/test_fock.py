import math

import numpy as np
import pytest

from oscneg.errors import TruncationLeakError
from oscneg.fock import (
    FockOracle,
    TruncatedFockSpace,
    bogoliubov_b_matrices,
    ensemble_density,
    eigenstate_vector,
    ground_state,
    hamiltonian_matrix,
    ladder_matrices,
    partial_transpose_dense,
    trace_norm_dense,
    weyl_matrix,
    weyl_site_matrix,
)

from conftest import HAND_H, QUARTER_LN3


@pytest.fixture(scope="module")
def hand_oracle():
    return FockOracle(HAND_H, 20, region=[0])


class TestLadder:
    def test_two_levels(self):
        a, ad = ladder_matrices(2)
        np.testing.assert_array_equal(a, [[0, 1], [0, 0]])
        np.testing.assert_array_equal(ad, a.T)

    def test_number_operator(self):
        a, ad = ladder_matrices(7)
        np.testing.assert_allclose(ad @ a, np.diag(np.arange(7.0)), atol=1e-14)

    def test_commutator_artifact_is_at_the_edge(self):
        a, ad = ladder_matrices(7)
        c = a @ ad - ad @ a - np.eye(7)
        np.testing.assert_allclose(c[:6, :6], 0.0, atol=1e-14)
        assert abs(c[6, 6]) > 1

    def test_space_guard(self):
        with pytest.raises(ValueError):
            TruncatedFockSpace.build(4, 20, max_dim=1000)


class TestHamiltonian:
    def test_single_oscillator(self):
        space = TruncatedFockSpace.build(1, 40)
        ev = np.linalg.eigvalsh(hamiltonian_matrix(space, [[1.0]]).toarray())
        np.testing.assert_allclose(ev[:5], [1, 3, 5, 7, 9], atol=1e-10)

    def test_hand_levels(self):
        space = TruncatedFockSpace.build(2, 30)
        ev = np.linalg.eigvalsh(hamiltonian_matrix(space, HAND_H).toarray())
        np.testing.assert_allclose(ev[:2], [1 + math.sqrt(3), 3 + math.sqrt(3)], atol=1e-6)

    def test_ground_energy(self):
        space = TruncatedFockSpace.build(2, 30)
        e0, _ = ground_state(space, HAND_H)
        assert e0 == pytest.approx(1 + math.sqrt(3), abs=1e-6)

    def test_sparse_ground_state_path(self):
        h = np.array([[2.0, -0.5, 0.0], [-0.5, 2.5, -0.5], [0.0, -0.5, 3.0]])
        space = TruncatedFockSpace.build(3, 16)
        e0, psi = ground_state(space, h)
        assert e0 == pytest.approx(float(np.sum(np.sqrt(np.linalg.eigvalsh(h)))), abs=1e-6)
        assert np.linalg.norm(psi) == pytest.approx(1.0)


class TestBogoliubov:
    def test_decoupled_is_identity(self):
        space = TruncatedFockSpace.build(2, 6)
        b = bogoliubov_b_matrices(space, np.eye(2))
        a, _ = ladder_matrices(6)
        np.testing.assert_allclose(b[0].toarray(), np.kron(a, np.eye(6)))
        np.testing.assert_allclose(b[1].toarray(), np.kron(np.eye(6), a))

    def test_vacuum(self, hand_oracle):
        for bk in hand_oracle.b:
            assert np.linalg.norm(bk @ hand_oracle.ground) <= 1e-6

    @pytest.mark.parametrize("N", [1, 2])
    def test_number_operator_on_sector(self, hand_oracle, N):
        num = sum(bk.T @ bk for bk in hand_oracle.b)
        for alpha in [(N, 0), (0, N)]:
            psi = hand_oracle.eigenstate(alpha)
            assert float(psi @ (num @ psi)) == pytest.approx(N, abs=1e-6)


class TestEigenstates:
    def test_ground_alpha(self, hand_oracle):
        np.testing.assert_allclose(hand_oracle.eigenstate((0, 0)), hand_oracle.ground)

    def test_energies(self, hand_oracle):
        g = np.sqrt(np.linalg.eigvalsh(HAND_H))
        for alpha in [(0, 0), (1, 0), (0, 1), (2, 1)]:
            psi = hand_oracle.eigenstate(alpha)
            assert float(psi @ (hand_oracle.H @ psi)) == pytest.approx(float(np.sum(g * (2 * np.array(alpha) + 1))), abs=1e-6)

    def test_orthonormal(self, hand_oracle):
        alphas = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        V = np.column_stack([hand_oracle.eigenstate(a) for a in alphas])
        np.testing.assert_allclose(V.T @ V, np.eye(len(alphas)), atol=1e-6)

    def test_leak(self):
        space = TruncatedFockSpace.build(2, 4)
        with pytest.raises(TruncationLeakError):
            eigenstate_vector(space, HAND_H, (3, 0))


class TestDensity:
    def test_ground_projector(self, hand_oracle):
        rho = hand_oracle.density(0)
        assert np.trace(rho) == pytest.approx(1.0)
        np.testing.assert_allclose(rho @ rho, rho, atol=1e-10)

    def test_energy(self, hand_oracle):
        g = np.sqrt(np.linalg.eigvalsh(HAND_H))
        for N in range(3):
            rho = hand_oracle.density(N)
            e = float(np.sum(rho * hand_oracle.H.toarray()))
            assert e == pytest.approx((1 + N) * g.sum(), abs=1e-6)
            assert hand_oracle.energy(N) == pytest.approx(e, abs=1e-8)

    def test_sectors_orthogonal(self, hand_oracle):
        assert np.abs(hand_oracle.density(1) @ hand_oracle.density(2)).max() < 1e-8


class TestPartialTranspose:
    def test_involution_and_trace(self, hand_oracle):
        rho = hand_oracle.density(1)
        rt = partial_transpose_dense(hand_oracle.space, rho)
        np.testing.assert_array_equal(partial_transpose_dense(hand_oracle.space, rt), rho)
        assert np.trace(rt) == pytest.approx(np.trace(rho))

    def test_product_state(self):
        space = TruncatedFockSpace.build(2, 3, region=[0])
        rng = np.random.default_rng(0)
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        rA = A @ A.conj().T
        rA /= np.trace(rA)
        rB = np.diag([0.2, 0.3, 0.5])
        rt = partial_transpose_dense(space, np.kron(rA, rB))
        np.testing.assert_allclose(rt, np.kron(rA.T, rB))
        assert trace_norm_dense(rt) == pytest.approx(1.0)


class TestTraceNorm:
    def test_density(self, hand_oracle):
        assert trace_norm_dense(hand_oracle.density(1)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert trace_norm_dense(np.diag([0.5, 0.75, -0.25])) == 1.5

    def test_not_hermitian(self):
        with pytest.raises(ValueError):
            trace_norm_dense(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_hand_ground_negativity(self):
        oracle = FockOracle(HAND_H, 30, region=[0])
        assert oracle.log_negativity(0) == pytest.approx(QUARTER_LN3, abs=1e-6)


class TestWeyl:
    def test_identity(self):
        space = TruncatedFockSpace.build(2, 5)
        np.testing.assert_allclose(weyl_matrix(space, [0, 0]), np.eye(25))

    def test_low_columns_orthonormal(self):
        W = weyl_site_matrix(30, 0.4 - 0.3j)[:, :10]
        np.testing.assert_allclose(W.conj().T @ W, np.eye(10), atol=1e-10)

    def test_ground_value(self, hand_oracle):
        f = np.array([0.3 + 0.2j, -0.1 + 0.4j])
        g2, O = np.linalg.eigh(HAND_H)
        v = (O.T @ f.real) / g2**0.25 + 1j * g2**0.25 * (O.T @ f.imag)
        expected = math.exp(-np.vdot(v, v).real / 4)
        assert hand_oracle.eigenstate_char((0, 0), f) == pytest.approx(expected, abs=1e-8)
