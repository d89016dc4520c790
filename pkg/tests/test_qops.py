import numpy as np
import pytest
from conftest import random_hermitian, random_state
from hypothesis import given
from hypothesis import strategies as st

from qfeedback import qops
from qfeedback.errors import BasisError
from qfeedback.qops import (
    BELL_BASIS,
    FanoCoefficients,
    fano_decompose,
    fano_recompose,
    from_bell_basis,
    from_q_block,
    levi_civita,
    partial_transpose,
    q_block,
    symmetric_ops,
    tau_of,
    tensor_pauli,
    to_bell_basis,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_pauli_algebra():
    s = qops.SIGMA
    for i in (1, 2, 3):
        assert np.allclose(s[i] @ s[i], np.eye(2))
        for j in (1, 2, 3):
            expected = (i == j) * np.eye(2) + 1j * sum(levi_civita(i - 1, j - 1, k) * s[k + 1] for k in range(3))
            assert np.allclose(s[i] @ s[j], expected)


def test_sigma3_convention():
    # |0> is the +1 eigenvector of sigma_3
    assert qops.SIGMA[3][0, 0] == 1


def test_levi_civita_values():
    assert levi_civita(0, 1, 2) == 1
    assert levi_civita(1, 0, 2) == -1
    assert levi_civita(0, 0, 2) == 0


def test_tensor_pauli_out_of_range():
    with pytest.raises(IndexError):
        tensor_pauli(4, 0)


def test_bell_basis_unitary_and_entries():
    assert np.allclose(BELL_BASIS.conj().T @ BELL_BASIS, np.eye(4))
    s = 1 / np.sqrt(2)
    ket00, ket11 = np.eye(4)[0], np.eye(4)[3]
    ket01, ket10 = np.eye(4)[1], np.eye(4)[2]
    assert np.allclose(BELL_BASIS[:, 0], s * (ket00 + ket11))
    assert np.allclose(BELL_BASIS[:, 1], s * (ket00 - ket11))
    assert np.allclose(BELL_BASIS[:, 2], s * (ket01 + ket10))
    assert np.allclose(BELL_BASIS[:, 3], s * (ket01 - ket10))


def test_projectors():
    ops = symmetric_ops()
    P, Q = ops["P"], ops["Q"]
    psi4 = BELL_BASIS[:, 3]
    assert np.allclose(P, np.outer(psi4, psi4.conj()))
    assert np.allclose(P @ P, P)
    assert np.allclose(P @ Q, 0)
    # S = 2 on the symmetric range and -6 on the singlet
    assert np.allclose(ops["S"] @ Q, 2 * Q)
    assert np.allclose(ops["S"] @ P, -6 * P)


def test_symmetric_ops_commute_with_swap():
    for name, op in symmetric_ops().items():
        assert np.allclose(qops.SWAP @ op @ qops.SWAP, op), name


def test_singlet_annihilated_by_total_spin():
    psi4 = BELL_BASIS[:, 3]
    for i in (1, 2, 3):
        assert np.allclose(qops.sigma_sym(i) @ psi4, 0)


# Q-block matrices of the symmetric operators in the order (psi1, psi3, psi2)
Q_BLOCKS = {
    "Sigma1": 2 * np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]]),
    "Sigma3": 2 * np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]]),
    "S11": 2 * np.diag([1, 1, -1]),
    "S22": 2 * np.diag([-1, 1, 1]),
    "S33": 2 * np.diag([1, -1, 1]),
    "S12": 2 * np.array([[0, 0, 1j], [0, 0, 0], [-1j, 0, 0]]),
    "S13": 2 * np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]]),
}


@pytest.mark.parametrize("name", sorted(Q_BLOCKS))
def test_q_blocks(name):
    assert np.allclose(q_block(symmetric_ops()[name]), Q_BLOCKS[name], atol=1e-14)


def test_q_blocks_sigma2_s23():
    ops = symmetric_ops()
    assert np.allclose(q_block(ops["Sigma2"]), 2 * np.array([[0, 0, 0], [0, 0, 1j], [0, -1j, 0]]))
    assert np.allclose(q_block(ops["S23"]), 2 * np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]]))


@given(seeds)
def test_bell_round_trip(seed):
    m = random_hermitian(np.random.default_rng(seed))
    assert np.max(np.abs(from_bell_basis(to_bell_basis(m)) - m)) < 1e-14


@given(seeds)
def test_q_block_round_trip_on_symmetric_operators(seed):
    rng = np.random.default_rng(seed)
    block = random_hermitian(rng, 3)
    assert np.max(np.abs(q_block(from_q_block(block)) - block)) < 1e-14


@given(seeds)
def test_fano_round_trip(seed):
    m = random_hermitian(np.random.default_rng(seed))
    coeffs = fano_decompose(m)
    assert np.max(np.abs(fano_recompose(coeffs) - m)) < 1e-14


def test_fano_explicit_trace():
    rng = np.random.default_rng(3)
    rho = random_state(rng)
    c = fano_decompose(rho).as_matrix()
    for i in range(4):
        for j in range(4):
            assert c[i, j] == pytest.approx(np.trace(rho @ np.kron(qops.SIGMA[i], qops.SIGMA[j])).real, abs=1e-14)
    assert c[0, 0] == pytest.approx(1.0)


def test_fano_of_bell_states():
    # psi4 has correlations -1 along every axis, so tau = -3
    for k, tau in enumerate([1, 1, 1, -3]):
        v = BELL_BASIS[:, k]
        assert tau_of(np.outer(v, v.conj())) == pytest.approx(tau)


def test_fano_flat_has_fifteen_entries():
    c = FanoCoefficients(np.zeros(3), np.zeros(3), np.eye(3))
    assert c.flat().shape == (15,)
    assert c.tau == 3


def test_tau_batch():
    rng = np.random.default_rng(0)
    batch = np.stack([random_state(rng) for _ in range(5)])
    assert np.allclose(tau_of(batch), [tau_of(r) for r in batch])


@given(seeds)
def test_tau_range(seed):
    tau = tau_of(random_state(np.random.default_rng(seed)))
    assert -3 - 1e-12 <= tau <= 1 + 1e-12


def test_partial_transpose_involution_and_spectrum():
    rng = np.random.default_rng(1)
    rho = random_state(rng)
    pt = partial_transpose(rho)
    assert np.allclose(partial_transpose(pt), rho)
    # transposing the first factor instead gives the full transpose of pt: same spectrum
    pt1 = rho.reshape(2, 2, 2, 2).transpose(2, 1, 0, 3).reshape(4, 4)
    assert np.allclose(np.linalg.eigvalsh(pt), np.linalg.eigvalsh(pt1))


def test_bell_basis_rejects_wrong_shape():
    with pytest.raises(BasisError):
        to_bell_basis(np.eye(3))
    with pytest.raises(BasisError):
        from_bell_basis(np.eye(2))
