"""Pauli algebra on two qubits.

Conventions used throughout the package:

* ``|0>`` is the +1 eigenvector of sigma_3, and the product basis is ordered
  ``|00>, |01>, |10>, |11>`` with the first factor being qubit 1.
* The Bell basis is ordered ``psi1 = (|00>+|11>)/sqrt2``,
  ``psi2 = (|00>-|11>)/sqrt2``, ``psi3 = (|01>+|10>)/sqrt2``,
  ``psi4 = (|01>-|10>)/sqrt2``.
* The three-dimensional symmetric subspace (range of ``Q``) is written in the
  order ``(psi1, psi3, psi2)``; see :data:`Q_ORDER`.
* Partial transposition acts on the second qubit. The spectrum does not depend
  on that choice.

Operators are plain ``(4, 4)`` complex ndarrays in the computational basis
unless a function name says otherwise.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BasisError

SIGMA = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
I2 = SIGMA[0]
I4 = np.eye(4, dtype=complex)

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

_S2 = 1 / np.sqrt(2)
# columns are psi1..psi4
BELL_BASIS = np.array(
    [
        [_S2, _S2, 0, 0],
        [0, 0, _S2, _S2],
        [0, 0, _S2, -_S2],
        [_S2, -_S2, 0, 0],
    ],
    dtype=complex,
)

# Bell indices spanning the range of Q, in the order the 3x3 blocks use.
Q_ORDER = (0, 2, 1)


def levi_civita(i, j, k):
    """Totally antisymmetric symbol on 0-based indices, eps(0,1,2) = +1."""
    return float((i - j) * (j - k) * (k - i) / 2)


def tensor_pauli(i, j):
    """Return ``sigma_i (x) sigma_j`` for ``i, j`` in ``0..3``."""
    if not (0 <= i <= 3 and 0 <= j <= 3):
        raise IndexError(f"Pauli indices must lie in 0..3, got ({i}, {j})")
    return np.kron(SIGMA[i], SIGMA[j])


def local_ops():
    """The six operators ``F_1..F_6``: sigma_i on qubit 1, then on qubit 2."""
    return [tensor_pauli(i, 0) for i in (1, 2, 3)] + [
        tensor_pauli(0, i) for i in (1, 2, 3)
    ]


def sigma_sym(i):
    """Symmetric single-qubit operator ``Sigma_i = sigma_i x I + I x sigma_i``."""
    return tensor_pauli(i, 0) + tensor_pauli(0, i)


def s_sym(i, j):
    """Symmetric two-qubit operator ``S_ij = sigma_i x sigma_j + sigma_j x sigma_i``."""
    return tensor_pauli(i, j) + tensor_pauli(j, i)


def s_total():
    return s_sym(1, 1) + s_sym(2, 2) + s_sym(3, 3)


def symmetric_ops():
    """Named exchange-symmetric operators and the projectors ``P``, ``Q``.

    Keys: ``Sigma1..Sigma3``, ``S11, S12, S13, S22, S23, S33``, ``S``, ``P``, ``Q``.
    ``P = (I - S/2)/4`` is the projector on the singlet psi4.
    """
    ops = {f"Sigma{i}": sigma_sym(i) for i in (1, 2, 3)}
    for i in (1, 2, 3):
        for j in range(i, 4):
            ops[f"S{i}{j}"] = s_sym(i, j)
    ops["S"] = s_total()
    ops["P"] = 0.25 * (I4 - ops["S"] / 2)
    ops["Q"] = I4 - ops["P"]
    return ops


def is_hermitian(op, atol=1e-12):
    op = np.asarray(op)
    return bool(np.max(np.abs(op - op.conj().T)) <= atol)


def to_bell_basis(op):
    """Matrix of ``op`` in the Bell basis ``(psi1, psi2, psi3, psi4)``."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (4, 4):
        raise BasisError(f"expected a 4x4 operator, got shape {op.shape}")
    return BELL_BASIS.conj().T @ op @ BELL_BASIS


def from_bell_basis(op):
    """Inverse of :func:`to_bell_basis`."""
    op = np.asarray(op, dtype=complex)
    if op.shape != (4, 4):
        raise BasisError(f"expected a 4x4 operator, got shape {op.shape}")
    return BELL_BASIS @ op @ BELL_BASIS.conj().T


def q_block(op):
    """Restriction of ``op`` to the range of ``Q`` in the order ``(psi1, psi3, psi2)``."""
    basis = BELL_BASIS[:, Q_ORDER]
    return basis.conj().T @ np.asarray(op, dtype=complex) @ basis


def from_q_block(block):
    """Embed a 3x3 block (order ``psi1, psi3, psi2``) back into a 4x4 operator."""
    basis = BELL_BASIS[:, Q_ORDER]
    return basis @ np.asarray(block, dtype=complex) @ basis.conj().T


def partial_transpose(rho):
    """Transpose on the second tensor factor."""
    r = np.asarray(rho).reshape(2, 2, 2, 2)
    return r.transpose(0, 3, 2, 1).reshape(4, 4)


@dataclass(frozen=True)
class FanoCoefficients:
    """Real coefficients of ``rho = (I + sum r0i I x s_i + ri0 s_i x I + rij s_i x s_j)/4``."""

    r0i: np.ndarray
    ri0: np.ndarray
    rij: np.ndarray
    r00: float = 1.0

    @property
    def tau(self):
        return float(np.trace(self.rij))

    def as_matrix(self):
        """Full 4x4 table ``c[i, j] = Tr(rho sigma_i x sigma_j)``."""
        c = np.empty((4, 4))
        c[0, 0] = self.r00
        c[0, 1:] = self.r0i
        c[1:, 0] = self.ri0
        c[1:, 1:] = self.rij
        return c

    def flat(self):
        """The 15 non-trivial coefficients as a vector."""
        return self.as_matrix().ravel()[1:]


def fano_table(rho):
    """``Tr(rho sigma_i x sigma_j)`` for all 16 index pairs; real part only.

    ``rho`` may carry leading batch dimensions.
    """
    rho = np.asarray(rho)
    paulis = np.stack([tensor_pauli(i, j) for i in range(4) for j in range(4)])
    # Tr(A B) = sum_ab A_ab B_ba
    vals = np.einsum("kab,...ba->...k", paulis, rho)
    return vals.real.reshape(rho.shape[:-2] + (4, 4))


def fano_decompose(rho):
    """Fano coefficients of a Hermitian ``rho``; ``r00 = Tr rho`` (1 for states)."""
    c = fano_table(rho)
    return FanoCoefficients(
        r0i=c[0, 1:].copy(), ri0=c[1:, 0].copy(), rij=c[1:, 1:].copy(), r00=float(c[0, 0])
    )


def fano_recompose(coeffs):
    c = coeffs.as_matrix()
    out = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            if c[i, j] != 0:
                out += c[i, j] * tensor_pauli(i, j)
    return out / 4


def tau_of(rho):
    """Sum of the diagonal correlation coefficients ``sum_i Tr(rho s_i x s_i)``."""
    c = fano_table(rho)
    return c[..., 1, 1] + c[..., 2, 2] + c[..., 3, 3]
