"""Markovian homodyne feedback corrections and the symmetric two-qubit scenario."""

from dataclasses import dataclass

import numpy as np

from .errors import EtaZero, NegativeRate, NotHermitian
from .generator import (
    KossakowskiMatrix,
    LindbladOp,
    Liouvillian,
    commutator_superop,
    dissipator_superop,
    lindblad_superop,
    liouvillian,
)
from .qops import local_ops, s_sym, s_total, sigma_sym

_F = np.stack(local_ops())


@dataclass(frozen=True)
class FeedbackConfig:
    """Feedback Hamiltonian ``F = sum f_i s_i x I + g_i I x s_i`` and detector efficiency."""

    f: tuple = (0.0, 0.0, 0.0)
    g: tuple = (0.0, 0.0, 0.0)
    eta: float = 1.0

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float).reshape(3)
        g = np.asarray(self.g, dtype=float).reshape(3)
        object.__setattr__(self, "f", tuple(f))
        object.__setattr__(self, "g", tuple(g))
        if not (0.0 < self.eta <= 1.0):
            raise EtaZero(f"detection efficiency must lie in (0, 1], got {self.eta}")

    @property
    def coefficients(self):
        return np.concatenate([self.f, self.g]).astype(complex)

    def operator(self):
        return np.tensordot(self.coefficients, _F, axes=1)


def feedback_kossakowski(L1, fb):
    """Feedback correction ``K~`` to the Kossakowski matrix.

    Blocks::

        A~_ij = f_i f_j / eta + i l_i f_j - i f_i conj(l_j)
        B~_ij = f_i g_j / eta + i l_i g_j - i f_i conj(r_j)
        C~_ij = g_i g_j / eta + i r_i g_j - i g_i conj(r_j)

    ``K~`` is Hermitian but generally not positive; ``K + K~`` is.
    """
    c = L1.coefficients
    h = fb.coefficients.real
    m = np.outer(h, h) / fb.eta + 1j * np.outer(c, h) - 1j * np.outer(h, c.conj())
    return KossakowskiMatrix(m)


def atilde_quadratic_form(L1, fb, u):
    """``<u|A~|u> = |<f|u>|^2 / eta + 2 Im(<u|f> <l|u>)``."""
    u = np.asarray(u, dtype=complex)
    f = np.asarray(fb.f, dtype=float)
    fu = f @ u
    lu = np.vdot(L1.l, u)
    return float(abs(fu) ** 2 / fb.eta + 2 * np.imag(np.conj(fu) * lu))


def feedback_hamiltonian(L1, F):
    """``H_FB = (L^+ F + F L) / 2``."""
    F = np.asarray(F, dtype=complex)
    if np.max(np.abs(F - F.conj().T)) > 1e-12:
        raise NotHermitian({"NotHermitian": float(np.max(np.abs(F - F.conj().T)))})
    L = L1.op
    return 0.5 * (L.conj().T @ F + F @ L)


def feedback_coupling_block(L1, fb):
    """Coefficients ``Re(l_i) f_j`` of the exchange-symmetric two-qubit coupling."""
    return np.outer(np.real(L1.l), fb.f)


def feedback_liouvillian(H, K, L1, fb):
    """Generator averaged over the homodyne record with Markovian feedback.

    ``-i[H + H_FB, .] + D[L1 - iF] + (1-eta)/eta D[F] + D_rest`` where
    ``D_rest`` is the dissipator of ``K`` with the monitored channel ``L1``
    removed.
    """
    H = np.asarray(H, dtype=complex)
    F = fb.operator()
    c1 = L1.coefficients
    k_rest = K.matrix - np.outer(c1, c1.conj())
    h_total = H + feedback_hamiltonian(L1, F)
    m = (
        commutator_superop(h_total)
        + lindblad_superop(L1.op - 1j * F)
        + dissipator_superop(k_rest)
    )
    noise = (1.0 - fb.eta) / fb.eta
    if noise:
        m = m + noise * lindblad_superop(F)
    return Liouvillian(m, h_total, K + feedback_kossakowski(L1, fb))


@dataclass(frozen=True)
class SymmetricScenario:
    """Rate ``a``, feedback strength ``f`` along sigma_2, Hamiltonian weights."""

    a: float
    f: float = 0.0
    gamma: float = 1.0
    delta: float = 1.0
    eta: float = 1.0

    def __post_init__(self):
        if self.a < 0:
            raise NegativeRate(f"dissipative rate must be >= 0, got {self.a}")
        if not (0.0 < self.eta <= 1.0):
            raise EtaZero(f"detection efficiency must lie in (0, 1], got {self.eta}")

    @property
    def monitored(self):
        """Monitored channel ``sqrt(a) Sigma_1``."""
        s = np.sqrt(self.a)
        return LindbladOp((s, 0, 0), (s, 0, 0))

    @property
    def unmonitored(self):
        s = np.sqrt(self.a)
        return [LindbladOp((0, s, 0), (0, s, 0)), LindbladOp((0, 0, s), (0, 0, s))]

    @property
    def feedback(self):
        return FeedbackConfig(f=(0, self.f, 0), g=(0, self.f, 0), eta=self.eta)

    @property
    def base_hamiltonian(self):
        return self.gamma * sigma_sym(3) + self.delta * s_total()

    @property
    def base_kossakowski(self):
        return KossakowskiMatrix.symmetric(self.a * np.eye(3))

    def to_json(self):
        return {"a": self.a, "f": self.f, "gamma": self.gamma, "delta": self.delta, "eta": self.eta}

    @classmethod
    def from_json(cls, data):
        extra = set(data) - {"a", "f", "gamma", "delta", "eta"}
        if extra:
            raise ValueError(f"unknown scenario fields: {sorted(extra)}")
        return cls(**{k: float(v) for k, v in data.items()})


def symmetric_block(a, f, eta=1.0):
    """3x3 block ``a I + A~`` shared by all four quadrants of the total Kossakowski matrix."""
    s = np.sqrt(a)
    return np.array(
        [[a, 1j * s * f, 0], [-1j * s * f, a + f * f / eta, 0], [0, 0, a]], dtype=complex
    )


def symmetric_scenario(s):
    """Generator ``-i[gamma Sigma3 + delta S + sqrt(a) f S12, .] + D_{K + K~}``.

    The identity part of ``H_FB`` is dropped; it does not enter any commutator.
    """
    if s.a < 0:
        raise NegativeRate(f"dissipative rate must be >= 0, got {s.a}")
    H = s.base_hamiltonian + np.sqrt(s.a) * s.f * s_sym(1, 2)
    K = KossakowskiMatrix.symmetric(symmetric_block(s.a, s.f, s.eta))
    return liouvillian(H, K)
