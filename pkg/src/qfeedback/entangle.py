"""Entanglement measures and the short-time entanglement-generation criterion.

Short-time criterion
--------------------
A pure product state ``|phi> x |psi>`` with ``phi = U|1>`` and ``psi = V|1>``
becomes entangled at short times under ``rho -> rho + t L rho`` iff::

    <u|A|u> <v|C^T|v>  <  |<u| (Re B + i H12) |v>|^2

where ``Re`` is the entrywise real part, ``u, v`` come from :func:`uv_vectors`
and the blocks are read in the *criterion frame*: ``A, B, C`` are the blocks
of ``conj(K)`` for the library Kossakowski matrix ``K`` and ``H12 = -h`` for
``H = sum_ij h_ij sigma_i x sigma_j + local terms``. Use
:func:`short_time_input` to build the input from a generator.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotUnitary
from .qops import SIGMA, partial_transpose, tensor_pauli
from .states import XFORM_TOL, off_x_magnitude

WOOTTERS_CLAMP = -1e-12
TIE_TOL = 1e-12
UNITARY_TOL = 1e-12

_YY = np.kron(SIGMA[2], SIGMA[2])
# <0|sigma_j|1> and <1|sigma_j|0> for j = 1, 2, 3
_E01 = np.array([SIGMA[j][0, 1] for j in (1, 2, 3)])
_E10 = np.array([SIGMA[j][1, 0] for j in (1, 2, 3)])


def concurrence_x(rho):
    """``2 max(0, |z| - sqrt(ad), |w| - sqrt(bc))`` for an X-state matrix."""
    rho = np.asarray(rho)
    a, b, c, d = (max(float(rho[i, i].real), 0.0) for i in range(4))
    z, w = abs(rho[1, 2]), abs(rho[0, 3])
    return 2.0 * max(0.0, z - np.sqrt(a * d), w - np.sqrt(b * c))


def concurrence_wootters(rho):
    rho = np.asarray(rho, dtype=complex)
    r = rho @ _YY @ rho.conj() @ _YY
    lam = np.sort(np.linalg.eigvals(r).real)[::-1]
    # rho~rho is similar to a PSD matrix for valid states, so negatives are round-off
    if lam[-1] < WOOTTERS_CLAMP * max(1.0, lam[0]):
        raise ValueError(f"spin-flip spectrum has eigenvalue {lam[-1]:.3e}; input is not a state")
    s = np.sqrt(np.clip(lam, 0.0, None))
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))


def concurrence(rho):
    """Wootters concurrence; X-states use the closed form."""
    rho = np.asarray(rho, dtype=complex)
    if off_x_magnitude(rho) <= XFORM_TOL:
        return concurrence_x(rho)
    return concurrence_wootters(rho)


def negativity(rho):
    """Absolute sum of the negative eigenvalues of the partial transpose."""
    ev = np.linalg.eigvalsh(partial_transpose(np.asarray(rho, dtype=complex)))
    return float(-ev[ev < 0].sum())


def _check_unitary(U, name):
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2):
        raise NotUnitary(f"{name} must be 2x2, got shape {U.shape}")
    err = float(np.max(np.abs(U.conj().T @ U - np.eye(2))))
    if err > UNITARY_TOL:
        raise NotUnitary(f"{name} is not unitary (max |U^+U - I| = {err:.3e})")
    return U


def rotation_of(U):
    """Orthogonal ``R`` with ``U^+ sigma_i U = sum_j R_ij sigma_j``."""
    U = np.asarray(U, dtype=complex)
    return np.array(
        [[0.5 * np.trace(U.conj().T @ SIGMA[i] @ U @ SIGMA[j]).real for j in (1, 2, 3)] for i in (1, 2, 3)]
    )


def uv_vectors(U, V):
    """Vectors ``u = R_U <0|sigma|1>`` and ``v = R_V <1|sigma|0>``."""
    U = _check_unitary(U, "U")
    V = _check_unitary(V, "V")
    return rotation_of(U) @ _E01, rotation_of(V) @ _E10


@dataclass(frozen=True)
class ShortTimeInput:
    """Total blocks (base plus feedback) in the criterion frame."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    H12: np.ndarray
    u: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class ShortTimeResult:
    verdict: bool
    lhs: float
    rhs: float

    @property
    def boundary(self):
        return abs(self.lhs - self.rhs) < TIE_TOL


def short_time_entangles(inp):
    u = np.asarray(inp.u, dtype=complex)
    v = np.asarray(inp.v, dtype=complex)
    A, B, C, H12 = (np.asarray(x, dtype=complex) for x in (inp.A, inp.B, inp.C, inp.H12))
    lhs = float(np.vdot(u, A @ u).real * np.vdot(v, C.T @ v).real)
    rhs = float(abs(np.vdot(u, (B.real + 1j * H12) @ v)) ** 2)
    verdict = lhs < rhs and abs(lhs - rhs) >= TIE_TOL
    return ShortTimeResult(verdict=verdict, lhs=lhs, rhs=rhs)


def coupling_coefficients(H):
    """``h_ij = Tr(H sigma_i x sigma_j) / 4`` for ``i, j = 1..3``."""
    H = np.asarray(H, dtype=complex)
    return np.array(
        [[np.trace(H @ tensor_pauli(i, j)).real / 4 for j in (1, 2, 3)] for i in (1, 2, 3)]
    )


def short_time_input(H, K, U, V):
    """Criterion input for generator ``(H, K)`` and initial state ``U|1> x V|1>``."""
    u, v = uv_vectors(U, V)
    kc = np.conj(K.matrix)
    return ShortTimeInput(
        A=kc[:3, :3], B=kc[:3, 3:], C=kc[3:, 3:], H12=-coupling_coefficients(H), u=u, v=v
    )


def product_state(U, V):
    """Density matrix of ``U|1> x V|1>``."""
    ket = np.kron(np.asarray(U)[:, 1], np.asarray(V)[:, 1])
    return np.outer(ket, ket.conj())


def small_eta_terms(f, g, U, V, *, symmetrized=False):
    """Both sides of the criterion at leading order as the detection efficiency goes to 0.

    There the feedback blocks dominate: ``A ~ f f^T / eta``, ``B ~ f g^T / eta``
    and ``C ~ g g^T / eta``, all real, so with the entrywise real part both
    sides equal ``|<u|f>|^2 |<g|v>|^2`` and the strict inequality fails.

    ``symmetrized=True`` replaces ``Re B`` by ``(B + B^+)/2``, giving the right
    side ``|(<u|f><g|v> + <u|g><f|v>)/2|^2``. That variant is not implied by the
    dynamics and does hold for some inputs; it is kept for comparison.
    """
    u, v = uv_vectors(U, V)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    uf, ug = np.vdot(u, f), np.vdot(u, g)
    gv, fv = np.vdot(g, v), np.vdot(f, v)
    lhs = abs(uf) ** 2 * abs(gv) ** 2
    if symmetrized:
        rhs = abs((uf * gv + ug * fv) / 2) ** 2
    else:
        rhs = abs(uf * gv) ** 2
    return float(lhs), float(rhs)


def small_eta_degenerate(f, g, U, V, *, symmetrized=False):
    """Truth value of the small-efficiency inequality (always false unless ``symmetrized``)."""
    lhs, rhs = small_eta_terms(f, g, U, V, symmetrized=symmetrized)
    return bool(lhs < rhs and abs(lhs - rhs) >= TIE_TOL * max(1.0, lhs))
