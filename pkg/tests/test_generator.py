import numpy as np
import pytest
from conftest import random_hermitian, random_state
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from qfeedback.errors import NotHermitian, NotPSD
from qfeedback.generator import (
    KossakowskiMatrix,
    LindbladOp,
    dissipator_apply,
    dissipator_superop,
    lindblad_extract,
    lindblad_superop,
    liouvillian,
    liouvillian_from_ops,
    spost,
    spre,
    sprepost,
    unvec,
    vec,
)
from qfeedback.qops import local_ops

seeds = st.integers(min_value=0, max_value=2**32 - 1)
F = local_ops()


def random_kossakowski(rng, rank=3):
    c = rng.normal(size=(6, rank)) + 1j * rng.normal(size=(6, rank))
    return KossakowskiMatrix(c @ c.conj().T)


def brute_dissipator(K, rho):
    """Sum over the Lindblad channels of K, with no superoperator algebra."""
    lam, U = np.linalg.eigh(K.matrix)
    out = np.zeros((4, 4), complex)
    for mu in range(6):
        L = sum(U[a, mu] * F[a] for a in range(6))
        out += lam[mu] * (L @ rho @ L.conj().T - 0.5 * (L.conj().T @ L @ rho + rho @ L.conj().T @ L))
    return out


def test_vec_is_column_stacking():
    x = np.arange(16).reshape(4, 4)
    v = vec(x)
    assert v[1] == x[1, 0] and v[4] == x[0, 1]
    assert np.array_equal(unvec(v), x)


def test_superop_identities(rng):
    a, b, x = (random_hermitian(rng) for _ in range(3))
    assert np.allclose(unvec(spre(a) @ vec(x)), a @ x)
    assert np.allclose(unvec(spost(b) @ vec(x)), x @ b)
    assert np.allclose(unvec(sprepost(a, b) @ vec(x)), a @ x @ b)


def test_single_channel_convention(rng):
    # K = c c^+ reproduces D[L] with L = sum c_a F_a
    c = rng.normal(size=6) + 1j * rng.normal(size=6)
    L = LindbladOp(c[:3], c[3:])
    K = KossakowskiMatrix.from_lindblad([L])
    rho = random_state(rng)
    direct = L.op @ rho @ L.op.conj().T - 0.5 * (L.op.conj().T @ L.op @ rho + rho @ L.op.conj().T @ L.op)
    assert np.allclose(dissipator_apply(K, rho), direct, atol=1e-13)


@given(seeds)
def test_dissipator_matches_channel_sum(seed):
    rng = np.random.default_rng(seed)
    K = random_kossakowski(rng)
    rho = random_state(rng)
    assert np.max(np.abs(dissipator_apply(K, rho) - brute_dissipator(K, rho))) < 1e-12
    sup = unvec(dissipator_superop(K) @ vec(rho))
    assert np.max(np.abs(sup - brute_dissipator(K, rho))) < 1e-12


@given(seeds)
def test_lindblad_extract_reconstructs(seed):
    rng = np.random.default_rng(seed)
    K = random_kossakowski(rng, rank=2)
    ops = lindblad_extract(K)
    assert len(ops) == 2
    assert np.max(np.abs(KossakowskiMatrix.from_lindblad(ops).matrix - K.matrix)) < 1e-12
    rates = [np.linalg.norm(op.coefficients) for op in ops]
    assert rates == sorted(rates, reverse=True)


def test_lindblad_extract_rejects_non_psd():
    with pytest.raises(NotPSD):
        lindblad_extract(KossakowskiMatrix(np.diag([1, -1, 0, 0, 0, 0])))


def test_lindblad_extract_zero():
    assert lindblad_extract(KossakowskiMatrix.zero()) == []


def test_kossakowski_rejects_non_hermitian():
    m = np.zeros((6, 6), complex)
    m[0, 1] = 1
    with pytest.raises(NotHermitian):
        KossakowskiMatrix(m)


def test_kossakowski_shape():
    with pytest.raises(ValueError):
        KossakowskiMatrix(np.eye(5))


def test_kossakowski_blocks_and_json(rng):
    K = random_kossakowski(rng)
    assert np.allclose(KossakowskiMatrix.from_blocks(K.A, K.B, K.C).matrix, K.matrix)
    assert np.array_equal(KossakowskiMatrix.from_json(K.to_json()).matrix, K.matrix)


def test_phase_invariance(rng):
    c = rng.normal(size=6) + 1j * rng.normal(size=6)
    L = LindbladOp(c[:3], c[3:])
    assert np.allclose(lindblad_superop(L.op), lindblad_superop(L.with_phase(0.7).op))


@given(seeds)
def test_trace_preservation(seed):
    rng = np.random.default_rng(seed)
    L = liouvillian(random_hermitian(rng), random_kossakowski(rng))
    # trace functional vec(I) annihilates the generator
    assert np.max(np.abs(vec(np.eye(4)) @ L.matrix)) < 1e-12


@given(seeds)
def test_hermiticity_preservation(seed):
    rng = np.random.default_rng(seed)
    L = liouvillian(random_hermitian(rng), random_kossakowski(rng))
    out = L.apply(random_state(rng))
    assert np.max(np.abs(out - out.conj().T)) < 1e-12


@given(seeds)
def test_complete_positivity_of_propagator(seed):
    # Choi matrix of exp(tL) is PSD
    rng = np.random.default_rng(seed)
    L = liouvillian(random_hermitian(rng), random_kossakowski(rng))
    prop = L.propagator(0.3)
    choi = np.zeros((16, 16), complex)
    for i in range(4):
        for j in range(4):
            e = np.zeros((4, 4))
            e[i, j] = 1
            choi += np.kron(e, unvec(prop @ vec(e)))
    assert np.linalg.eigvalsh(choi).min() > -1e-10


def test_liouvillian_rejects_non_hermitian_hamiltonian():
    with pytest.raises(NotHermitian):
        liouvillian(np.triu(np.ones((4, 4))), KossakowskiMatrix.zero())


def test_liouvillian_from_ops_matches_kossakowski(rng):
    c = rng.normal(size=(2, 6)) + 1j * rng.normal(size=(2, 6))
    ops = [LindbladOp(v[:3], v[3:]) for v in c]
    H = random_hermitian(rng)
    a = liouvillian_from_ops(H, [(op.op, 1.0) for op in ops])
    b = liouvillian(H, KossakowskiMatrix.from_lindblad(ops))
    assert np.allclose(a.matrix, b.matrix)


def test_batch_apply(rng):
    L = liouvillian(random_hermitian(rng), random_kossakowski(rng))
    batch = np.stack([random_state(rng) for _ in range(3)])
    assert np.allclose(L.apply(batch), np.stack([L.apply(r) for r in batch]))


def test_propagator_is_expm(rng):
    L = liouvillian(random_hermitian(rng), random_kossakowski(rng))
    assert np.allclose(L.propagator(0.2), expm(0.2 * L.matrix))
