"""Density matrices, X-states and the catalog of named states."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidState, NotHermitian, NotPSD, NotUnitTrace, NotXForm
from .qops import BELL_BASIS, I4

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
XFORM_TOL = 1e-10

# entries an X-state may populate: diagonal plus anti-diagonal
X_MASK = np.eye(4, dtype=bool) | np.eye(4, dtype=bool)[::-1]


def validate(rho, *, psd_tol=PSD_TOL, tol_scale=1.0):
    """Check that ``rho`` is a two-qubit density matrix and return it as an array.

    All failed checks are collected; the raised exception's class is that of
    the first failure in the order Hermitian, trace, positivity, and its
    ``violations`` attribute lists every failure with its magnitude.
    ``tol_scale`` widens the Hermiticity and trace tolerances for results of
    long computations whose round-off grows with the problem scale.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
    violations = {}
    herm_err = float(np.max(np.abs(rho - rho.conj().T)))
    if herm_err > HERMITIAN_TOL * tol_scale:
        violations["NotHermitian"] = herm_err
    trace_err = abs(np.trace(rho) - 1.0)
    if trace_err > TRACE_TOL * tol_scale:
        violations["NotUnitTrace"] = trace_err
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    if min_eig < -psd_tol:
        violations["NotPSD"] = -min_eig
    if violations:
        cls = {"NotHermitian": NotHermitian, "NotUnitTrace": NotUnitTrace, "NotPSD": NotPSD}[
            next(iter(violations))
        ]
        raise cls(violations)
    return rho


def is_valid(rho):
    try:
        validate(rho)
    except InvalidState:
        return False
    return True


def purity(rho):
    return float(np.real(np.trace(rho @ rho)))


@dataclass(frozen=True)
class XState:
    """Populations ``a, b, c, d`` of ``|00>, |01>, |10>, |11>`` and coherences.

    ``z = rho[|01>, |10>]`` and ``w = rho[|00>, |11>]``.
    """

    a: float
    b: float
    c: float
    d: float
    z: complex = 0j
    w: complex = 0j

    def to_matrix(self):
        return np.array(
            [
                [self.a, 0, 0, self.w],
                [0, self.b, self.z, 0],
                [0, np.conj(self.z), self.c, 0],
                [np.conj(self.w), 0, 0, self.d],
            ],
            dtype=complex,
        )

    def is_physical(self, tol=PSD_TOL):
        pops = np.array([self.a, self.b, self.c, self.d])
        return bool(
            abs(pops.sum() - 1) <= TRACE_TOL
            and pops.min() >= -tol
            and abs(self.z) <= np.sqrt(max(self.b * self.c, 0.0)) + tol
            and abs(self.w) <= np.sqrt(max(self.a * self.d, 0.0)) + tol
        )

    def to_json(self):
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "d": self.d,
            "z": [float(np.real(self.z)), float(np.imag(self.z))],
            "w": [float(np.real(self.w)), float(np.imag(self.w))],
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            a=float(data["a"]),
            b=float(data["b"]),
            c=float(data["c"]),
            d=float(data["d"]),
            z=complex(*data["z"]),
            w=complex(*data["w"]),
        )


def off_x_magnitude(rho):
    """Largest absolute value among entries outside the X pattern."""
    rho = np.asarray(rho)
    return float(np.max(np.abs(rho[..., ~X_MASK]), axis=-1, initial=0.0))


def xstate_cast(rho, tol=XFORM_TOL):
    """Extract the X-state parameters of ``rho``.

    Raises :class:`NotXForm` if an entry outside the X pattern exceeds ``tol``.
    """
    rho = np.asarray(rho, dtype=complex)
    off = np.abs(np.where(X_MASK, 0, rho))
    if off.max() > tol:
        i, j = np.unravel_index(np.argmax(off), off.shape)
        raise NotXForm(f"entry ({i}, {j}) has magnitude {off[i, j]:.3e} > {tol:.0e}")
    return XState(
        a=float(rho[0, 0].real),
        b=float(rho[1, 1].real),
        c=float(rho[2, 2].real),
        d=float(rho[3, 3].real),
        z=complex(rho[1, 2]),
        w=complex(rho[0, 3]),
    )


def _projector(vec):
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def _product(q1, q2):
    ket = np.zeros(4, dtype=complex)
    ket[2 * q1 + q2] = 1.0
    return _projector(ket)


CATALOG_NAMES = (
    "rho1",
    "rho2",
    "rho3",
    "rho4",
    "bell1",
    "bell2",
    "bell3",
    "bell4",
    "maximally_mixed",
)


def catalog(name):
    """Named states: the four computational product states, Bell states, ``I/4``.

    ``rho1 = |00><00|``, ``rho2 = |1><1| x |0><0|``, ``rho3 = |0><0| x |1><1|``,
    ``rho4 = |11><11|``; ``bell1..bell4`` project on psi1..psi4.
    """
    products = {"rho1": (0, 0), "rho2": (1, 0), "rho3": (0, 1), "rho4": (1, 1)}
    if name in products:
        return _product(*products[name])
    if name.startswith("bell") and name[4:] in ("1", "2", "3", "4"):
        return _projector(BELL_BASIS[:, int(name[4:]) - 1])
    if name == "maximally_mixed":
        return I4 / 4
    raise KeyError(f"unknown catalog state {name!r}; expected one of {CATALOG_NAMES}")


def density_to_json(rho):
    """Flat list of 16 ``[re, im]`` pairs, row-major, computational basis."""
    return [[float(z.real), float(z.imag)] for z in np.asarray(rho, dtype=complex).ravel()]


def density_from_json(data):
    arr = np.array([complex(re, im) for re, im in data], dtype=complex)
    if arr.size != 16:
        raise ValueError(f"expected 16 complex entries, got {arr.size}")
    return validate(arr.reshape(4, 4))
