"""Weak-coupling-limit compatibility of a symmetric generator.

A generator ``-i[H, .] + D`` is compatible with the weak-coupling limit when
its Hamiltonian and dissipative parts commute. For the dissipator
``D = sum_i a_i (Sigma_i rho Sigma_i - 1/2 {Sigma_i^2, rho})`` the singlet
``psi4`` is annihilated by every ``Sigma_i``, so the check reduces to the
three-dimensional range of ``Q``. There a Hermitian ``rho`` is encoded as the
real 9-vector::

    (r11, r22, r33, Re r12, Im r12, Re r13, Im r13, Re r23, Im r23)

in the Bell order ``(psi1, psi3, psi2)`` of :func:`qops.q_block`.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NegativeRate, NotHermitian
from .generator import KossakowskiMatrix, commutator_superop, dissipator_superop
from .qops import I4, from_q_block, q_block, symmetric_ops, tensor_pauli

COMPAT_REL = 1e-12
NORM_EPS = 1e-30
COMPONENT_TOL = 1e-9

_PAIRS = ((0, 1), (0, 2), (1, 2))


def vec9(r):
    """Real 9-vector of a Hermitian 3x3 matrix."""
    r = np.asarray(r)
    v = [r[0, 0].real, r[1, 1].real, r[2, 2].real]
    for i, j in _PAIRS:
        v += [r[i, j].real, r[i, j].imag]
    return np.array(v, dtype=float)


def unvec9(v):
    r = np.diag(np.asarray(v[:3], dtype=complex))
    for n, (i, j) in enumerate(_PAIRS):
        r[i, j] = v[3 + 2 * n] + 1j * v[4 + 2 * n]
        r[j, i] = np.conj(r[i, j])
    return r


def rep9(fn):
    """9x9 real matrix of a linear map that sends Hermitian 3x3 matrices to Hermitian ones."""
    out = np.zeros((9, 9))
    for n in range(9):
        e = np.zeros(9)
        e[n] = 1.0
        out[:, n] = vec9(fn(unvec9(e)))
    return out


@dataclass(frozen=True)
class QRep:
    matrix: np.ndarray
    kind: str

    def apply(self, rho_q):
        return unvec9(self.matrix @ vec9(rho_q))


def dissipator_9x9(a11, a22, a33):
    """Closed-form 9x9 matrix of the diagonal symmetric dissipator on the Q range."""
    a = np.array([a11, a22, a33], dtype=float)
    if np.any(a < 0):
        raise NegativeRate(f"rates must be >= 0, got {tuple(a)}")
    a1, a2, a3 = a
    m = np.zeros((9, 9))
    m[:3, :3] = [
        [-4 * (a1 + a3), 4 * a1, 4 * a3],
        [4 * a1, -4 * (a1 + a2), 4 * a2],
        [4 * a3, 4 * a2, -4 * (a2 + a3)],
    ]
    m[3:, 3:] = -2 * np.diag([a2 + a3, 4 * a1 + a2 + a3, a1 + a2, a1 + a2 + 4 * a3, a1 + 4 * a2 + a3, a1 + a3])
    return QRep(m, "dissipator")


def hamiltonian_9x9(HQ):
    """9x9 matrix of ``rho -> -i[HQ, rho]`` on Hermitian 3x3 matrices."""
    HQ = np.asarray(HQ, dtype=complex)
    err = float(np.max(np.abs(HQ - HQ.conj().T)))
    if err > 1e-12:
        raise NotHermitian({"NotHermitian": err})
    return QRep(rep9(lambda r: -1j * (HQ @ r - r @ HQ)), "hamiltonian")


def hamiltonian_9x9_blocks(HQ):
    """Block form ``[[0, A, B], [C, D, E], [F, G, H]]`` written out entry by entry.

    Independent of :func:`hamiltonian_9x9`, which derives the same matrix from
    the commutator.
    """
    h = np.asarray(HQ, dtype=complex)
    h11, h22, h33 = h[0, 0].real, h[1, 1].real, h[2, 2].real
    hr12, hi12 = h[0, 1].real, h[0, 1].imag
    hr13, hi13 = h[0, 2].real, h[0, 2].imag
    hr23, hi23 = h[1, 2].real, h[1, 2].imag
    blocks = {
        "A": [[2 * hi12, -2 * hr12, 2 * hi13], [-2 * hi12, 2 * hr12, 0], [0, 0, -2 * hi13]],
        "B": [[-2 * hr13, 0, 0], [0, 2 * hi23, -2 * hr23], [2 * hr13, -2 * hi23, 2 * hr23]],
        "C": [[-hi12, hi12, 0], [hr12, -hr12, 0], [-hi13, 0, hi13]],
        "D": [[0, h11 - h22, hi23], [h22 - h11, 0, hr23], [-hi23, -hr23, 0]],
        "E": [[-hr23, hi13, -hr13], [hi23, -hr13, -hi13], [h11 - h33, hi12, hr12]],
        "F": [[hr13, 0, -hr13], [0, -hi23, hi23], [0, hr23, -hr23]],
        "G": [[hr23, -hi23, h33 - h11], [-hi13, hr13, -hi12], [hr13, hi13, -hr12]],
        "H": [[0, -hr12, hi12], [hr12, 0, h22 - h33], [-hi12, h33 - h22, 0]],
    }
    b = {k: np.array(v, dtype=float) for k, v in blocks.items()}
    z = np.zeros((3, 3))
    return np.block([[z, b["A"], b["B"]], [b["C"], b["D"], b["E"]], [b["F"], b["G"], b["H"]]])


def _norm(m):
    return float(np.linalg.norm(m, np.inf))


def _commutator_verdict(X, Y, x_scale=None):
    comm = X @ Y - Y @ X
    n = _norm(comm)
    x_norm = _norm(X) if x_scale is None else max(_norm(X), x_scale)
    return n, n < COMPAT_REL * (x_norm * _norm(Y) + NORM_EPS)


def _rates(A):
    A = np.asarray(A)
    if A.ndim == 2:
        off = A - np.diag(np.diag(A))
        if np.max(np.abs(off)) > 0:
            raise ValueError("A must be diagonal")
        A = np.diag(A)
    a = np.real(A).astype(float).reshape(3)
    if np.any(a < 0):
        raise NegativeRate(f"rates must be >= 0, got {tuple(a)}")
    return a


def offending_components(H, A):
    """Named parts of ``(H, A)`` outside ``span{Sigma_i, S}`` and ``A ~ I``."""
    H = np.asarray(H, dtype=complex)
    a = _rates(A)
    c = np.array([[np.trace(H @ tensor_pauli(i, j)).real / 4 for j in range(4)] for i in range(4)])
    scale = max(1.0, float(np.max(np.abs(c))))
    tol = COMPONENT_TOL * scale
    out = []
    for i in (1, 2, 3):
        if abs(c[i, 0] - c[0, i]) > tol:
            out.append(f"sigma{i}xI-Ixsigma{i}")
    for i in (1, 2, 3):
        for j in range(i + 1, 4):
            if abs(c[i, j] + c[j, i]) > tol:
                out.append(f"S{i}{j}")
            if abs(c[i, j] - c[j, i]) > tol:
                out.append(f"sigma{i}xsigma{j}-sigma{j}xsigma{i}")
    diag = np.array([c[1, 1], c[2, 2], c[3, 3]])
    for i in (1, 2, 3):
        if abs(diag[i - 1] - diag.mean()) > tol:
            out.append(f"S{i}{i}-S/3")
    if np.ptp(a) > COMPONENT_TOL * max(1.0, float(a.max())):
        out.append("A not proportional to identity")
    return out


@dataclass(frozen=True)
class WclResult:
    compatible: bool
    commutator_norm: float
    commutator_norm_full: float
    compatible_full: bool
    pq_coupling: float
    offending_components: list

    @property
    def routes_agree(self):
        return self.compatible == self.compatible_full

    def to_json(self):
        return {
            "compatible": self.compatible,
            "commutator_norm": self.commutator_norm,
            "commutator_norm_full": self.commutator_norm_full,
            "compatible_full": self.compatible_full,
            "routes_agree": self.routes_agree,
            "pq_coupling": self.pq_coupling,
            "offending_components": list(self.offending_components),
        }


def wcl_compatible(H, A):
    """Does ``-i[H, .]`` commute with the symmetric dissipator of rates ``A``?

    The verdict comes from the 9x9 route on the Q range. The full 16x16
    superoperator commutator is evaluated alongside as a cross-check, and it
    decides the verdict when ``H`` couples the singlet to the Q range (the Q
    range alone is then not invariant).
    """
    H = np.asarray(H, dtype=complex)
    err = float(np.max(np.abs(H - H.conj().T)))
    if err > 1e-12:
        raise NotHermitian({"NotHermitian": err})
    a = _rates(A)
    P = symmetric_ops()["P"]
    pq = float(np.max(np.abs(P @ H @ (I4 - P))))

    d9 = dissipator_9x9(*a).matrix
    h9 = hamiltonian_9x9(q_block(H)).matrix
    # a Q block proportional to the identity leaves only round-off in h9, so
    # the threshold is scaled by the full Hamiltonian
    n9, ok9 = _commutator_verdict(h9, d9, x_scale=_norm(H))

    K = KossakowskiMatrix.symmetric(np.diag(a))
    n16, ok16 = _commutator_verdict(commutator_superop(H), dissipator_superop(K))

    decoupled = pq <= COMPONENT_TOL * max(1.0, float(np.max(np.abs(H))))
    return WclResult(
        compatible=bool(ok9 if decoupled else ok16),
        commutator_norm=n9,
        commutator_norm_full=n16,
        compatible_full=bool(ok16),
        pq_coupling=pq,
        offending_components=offending_components(H, a),
    )


def physical_hamiltonian(alpha, beta, gamma, delta):
    """``alpha Sigma1 + beta Sigma2 + gamma Sigma3 + delta S``."""
    ops = symmetric_ops()
    return alpha * ops["Sigma1"] + beta * ops["Sigma2"] + gamma * ops["Sigma3"] + delta * ops["S"]


def embed_q(HQ):
    """Lift a 3x3 Q-range operator to 4x4 (zero on the singlet)."""
    return from_q_block(HQ)
