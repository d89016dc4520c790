"""GKSL generators built from a Hamiltonian and a Kossakowski matrix.

Dissipator convention
---------------------
For the six local operators ``F_1..F_6`` of :func:`qops.local_ops`::

    D[rho] = sum_ab K_ab (F_a rho F_b - 1/2 {F_b F_a, rho})

so that a single channel ``L = sum_a c_a F_a`` has ``K_ab = c_a conj(c_b)`` and
``D[L] rho = L rho L^+ - 1/2 {L^+ L, rho}``. The blocks of ``K`` are then
``A_ij = sum_mu l_i conj(l_j)``, ``B_ij = sum_mu l_i conj(r_j)``,
``C_ij = sum_mu r_i conj(r_j)``.

Superoperators act on column-stacked vectors: ``vec(X)[i + 4 j] = X[i, j]``
and ``vec(A X B) = (B^T kron A) vec(X)``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import NotHermitian, NotPSD
from .qops import I4, local_ops

HERMITIAN_TOL = 1e-12
PSD_FLOOR = -1e-10
ZERO_CHANNEL_REL = 1e-12

_F = np.stack(local_ops())


def vec(rho):
    """Column-stack the trailing 4x4 axes; leading axes are batch axes."""
    rho = np.asarray(rho)
    return np.swapaxes(rho, -1, -2).reshape(rho.shape[:-2] + (16,))


def unvec(v):
    v = np.asarray(v)
    return np.swapaxes(v.reshape(v.shape[:-1] + (4, 4)), -1, -2)


def spre(a):
    """Superoperator of ``X -> a X``."""
    return np.kron(I4, a)


def spost(b):
    """Superoperator of ``X -> X b``."""
    return np.kron(np.asarray(b).T, I4)


def sprepost(a, b):
    """Superoperator of ``X -> a X b``."""
    return np.kron(np.asarray(b).T, a)


def commutator_superop(h):
    """Superoperator of ``X -> -i [h, X]``."""
    return -1j * (spre(h) - spost(h))


def lindblad_superop(op):
    """Superoperator of ``D[op] X = op X op^+ - 1/2 {op^+ op, X}``."""
    op = np.asarray(op, dtype=complex)
    ld = op.conj().T
    ldl = ld @ op
    return sprepost(op, ld) - 0.5 * (spre(ldl) + spost(ldl))


def _check_hermitian(mat, what):
    err = float(np.max(np.abs(mat - mat.conj().T)))
    if err > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(mat)))):
        exc = NotHermitian({"NotHermitian": err})
        exc.args = (f"{what} is not Hermitian (max |M - M^+| = {err:.3e})",)
        raise exc


@dataclass(frozen=True)
class KossakowskiMatrix:
    """6x6 Hermitian coefficient matrix with 3x3 blocks ``[[A, B], [B^+, C]]``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (6, 6):
            raise ValueError(f"Kossakowski matrix must be 6x6, got {m.shape}")
        _check_hermitian(m, "Kossakowski matrix")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_blocks(cls, A, B=None, C=None):
        A = np.asarray(A, dtype=complex)
        B = np.zeros((3, 3), complex) if B is None else np.asarray(B, dtype=complex)
        C = np.zeros((3, 3), complex) if C is None else np.asarray(C, dtype=complex)
        return cls(np.block([[A, B], [B.conj().T, C]]))

    @classmethod
    def symmetric(cls, A):
        """Four identical blocks: both qubits see the same bath operators."""
        return cls.from_blocks(A, A, A)

    @classmethod
    def zero(cls):
        return cls(np.zeros((6, 6), complex))

    @classmethod
    def from_lindblad(cls, ops):
        """``K = sum_mu c_mu c_mu^+`` with ``c_mu = (l, r)`` of each channel."""
        m = np.zeros((6, 6), complex)
        for op in ops:
            c = op.coefficients
            m += np.outer(c, c.conj())
        return cls(m)

    @property
    def A(self):
        return self.matrix[:3, :3]

    @property
    def B(self):
        return self.matrix[:3, 3:]

    @property
    def C(self):
        return self.matrix[3:, 3:]

    @property
    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(self.matrix)[0])

    @property
    def is_psd(self):
        return self.min_eigenvalue >= PSD_FLOOR

    def __add__(self, other):
        return KossakowskiMatrix(self.matrix + other.matrix)

    def to_json(self):
        return [[float(z.real), float(z.imag)] for z in self.matrix.ravel()]

    @classmethod
    def from_json(cls, data):
        arr = np.array([complex(re, im) for re, im in data], dtype=complex)
        if arr.size != 36:
            raise ValueError(f"expected 36 complex entries, got {arr.size}")
        return cls(arr.reshape(6, 6))


@dataclass(frozen=True)
class LindbladOp:
    """``L = sum_i l_i sigma_i x I + sum_i r_i I x sigma_i``."""

    l: np.ndarray
    r: np.ndarray
    op: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        l = np.array(self.l, dtype=complex).reshape(3)
        r = np.array(self.r, dtype=complex).reshape(3)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "op", np.tensordot(np.concatenate([l, r]), _F, axes=1))

    @property
    def coefficients(self):
        return np.concatenate([self.l, self.r])

    def with_phase(self, phi):
        ph = np.exp(1j * phi)
        return LindbladOp(ph * self.l, ph * self.r)


def dissipator_apply(K, rho):
    """Apply the dissipator of Kossakowski matrix ``K`` to ``rho``."""
    k = K.matrix if isinstance(K, KossakowskiMatrix) else np.asarray(K)
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros((4, 4), complex)
    for a in range(6):
        for b in range(6):
            kab = k[a, b]
            if kab == 0:
                continue
            fbfa = _F[b] @ _F[a]
            out += kab * (_F[a] @ rho @ _F[b] - 0.5 * (fbfa @ rho + rho @ fbfa))
    return out


def lindblad_extract(K):
    """Diagonalize ``K`` into Lindblad channels, largest rate first.

    Channels with eigenvalue below ``1e-12 * lambda_max`` are dropped.
    """
    if not K.is_psd:
        raise NotPSD({"NotPSD": -K.min_eigenvalue})
    lam, U = np.linalg.eigh(K.matrix)
    order = np.argsort(lam)[::-1]
    lam, U = lam[order], U[:, order]
    if lam.size == 0 or lam[0] <= 0:
        return []
    ops = []
    for mu in range(6):
        if lam[mu] < ZERO_CHANNEL_REL * lam[0]:
            continue
        c = np.sqrt(lam[mu]) * U[:, mu]
        ops.append(LindbladOp(c[:3], c[3:]))
    return ops


def dissipator_superop(K):
    k = K.matrix if isinstance(K, KossakowskiMatrix) else np.asarray(K)
    out = np.zeros((16, 16), complex)
    for a in range(6):
        for b in range(6):
            kab = k[a, b]
            if kab == 0:
                continue
            fbfa = _F[b] @ _F[a]
            out += kab * (sprepost(_F[a], _F[b]) - 0.5 * (spre(fbfa) + spost(fbfa)))
    return out


@dataclass(frozen=True)
class Liouvillian:
    """16x16 generator acting on column-stacked density matrices.

    ``hamiltonian`` and ``kossakowski`` record what the matrix was built from.
    """

    matrix: np.ndarray
    hamiltonian: np.ndarray = field(default=None, repr=False, compare=False)
    kossakowski: KossakowskiMatrix = field(default=None, repr=False, compare=False)

    def apply(self, rho):
        return unvec(vec(rho) @ self.matrix.T)

    def propagator(self, t):
        return expm(t * self.matrix)


def hamiltonian_superop(H):
    return commutator_superop(np.asarray(H, dtype=complex))


def liouvillian(H, K):
    """Generator ``rho -> -i[H, rho] + D_K[rho]``."""
    H = np.asarray(H, dtype=complex)
    _check_hermitian(H, "Hamiltonian")
    return Liouvillian(hamiltonian_superop(H) + dissipator_superop(K), H, K)


def liouvillian_from_ops(H, ops, kossakowski=None):
    """Generator from a Hamiltonian and explicit operators ``[(L, rate), ...]``."""
    H = np.asarray(H, dtype=complex)
    _check_hermitian(H, "Hamiltonian")
    m = hamiltonian_superop(H)
    for op, rate in ops:
        if rate != 0:
            m = m + rate * lindblad_superop(op)
    return Liouvillian(m, H, kossakowski)
