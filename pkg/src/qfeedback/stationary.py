"""Stationary states of the symmetric feedback scenario at ``gamma = delta = 1``.

The generator commutes with the projectors ``P = |psi4><psi4|`` and ``Q = I - P``
and conserves ``tau = sum_i Tr(rho sigma_i x sigma_i)``. Every initial state
relaxes to ``P rho0 P / Tr + Q rho0 Q / Tr`` weighted by ``Tr(P rho) = (1 - tau)/4``
for the faithful invariant state ``rho0`` of :func:`faithful_state`.
"""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .entangle import concurrence
from .errors import NegativeRate, TauOutOfRange, UnsupportedScenario
from .feedback import SymmetricScenario, symmetric_scenario
from .generator import unvec
from .qops import I4, from_q_block, s_sym, sigma_sym
from .states import xstate_cast

TAU_MIN, TAU_MAX = -3.0, 1.0
TAU_TOL = 1e-12
KERNEL_REL = 1e-10


def _check_rate(a):
    if not a > 0:
        raise NegativeRate(f"rate a must be > 0, got {a}")


def _check_tau(tau):
    if not (TAU_MIN - TAU_TOL <= tau <= TAU_MAX + TAU_TOL):
        raise TauOutOfRange(f"tau must lie in [-3, 1], got {tau}")


def check_scenario(s):
    """Reject scenarios the closed forms do not cover (``gamma = delta = eta = 1``)."""
    if s.gamma != 1 or s.delta != 1 or s.eta != 1:
        raise UnsupportedScenario(
            f"stationary formulas need gamma = delta = eta = 1, got gamma={s.gamma}, delta={s.delta}, eta={s.eta}"
        )
    _check_rate(s.a)
    return s


def scenario_liouvillian(a, f):
    return symmetric_scenario(SymmetricScenario(a=a, f=f))


@dataclass(frozen=True)
class FaithfulCoefficients:
    """``rho0 = (I + M Sigma3 - N (S11 - S22) + R S33 - Lc S12) / 4``."""

    M: float
    N: float
    R: float
    Lc: float
    a: float
    f: float


def faithful_coefficients(a, f):
    _check_rate(a)
    a, f = float(a), float(f)
    f2 = f * f
    den = 36 * a**4 + 60 * a**3 * f2 + a**2 * (21 * f2**2 + 4) + 2 * a * f2 * (f2**2 + 2) + f2**2
    M = -2 * np.sqrt(a) * f * (18 * a**3 + 15 * a**2 * f2 + 2 * a * (f2**2 + 1) + f2) / den
    N = a**2 * f2 * (6 * a + f2) / den
    R = a * f2 * (18 * a**2 + 3 * a * f2 + 2) / den
    Lc = 4 * a**2 * f2 / den
    return FaithfulCoefficients(M=M, N=N, R=R, Lc=Lc, a=a, f=f)


def faithful_state(a, f):
    """Faithful (full-rank) stationary state and its coefficients."""
    c = faithful_coefficients(a, f)
    rho = 0.25 * (
        I4 + c.M * sigma_sym(3) - c.N * (s_sym(1, 1) - s_sym(2, 2)) + c.R * s_sym(3, 3) - c.Lc * s_sym(1, 2)
    )
    return c, rho


def kernel_basis(L):
    """Orthonormal basis (Hilbert-Schmidt) of the null space of ``L``."""
    m = L.matrix if hasattr(L, "matrix") else np.asarray(L)
    _, sv, vh = np.linalg.svd(m)
    smax = sv[0] if sv.size else 0.0
    null = sv <= KERNEL_REL * smax if smax > 0 else np.ones_like(sv, dtype=bool)
    return [unvec(row.conj()) for row in vh[null]]


@dataclass(frozen=True)
class AsymptoticState:
    """Stationary X-state carrying the conserved ``tau``.

    ``coeffs`` holds the weights of ``Sigma3, S12, S11, S22, S33`` in
    ``rho = (I + r3 Sigma3 + r12 S12 + r11 S11 + r22 S22 + r33 S33) / 4``.
    """

    tau: float
    xstate: object
    coeffs: dict

    @property
    def matrix(self):
        return self.xstate.to_matrix()


def asymptotic_coefficients(tau, a, f):
    _check_tau(tau)
    c = faithful_coefficients(a, f)
    d = 2 * c.R + 3
    return {
        "r3": c.M * (tau + 3) / d,
        "r12": -c.Lc * (tau + 3) / d,
        "r11": (-2 * c.N * (tau + 3) - 2 * c.R + tau) / (2 * d),
        "r22": (2 * c.N * (tau + 3) - 2 * c.R + tau) / (2 * d),
        "r33": (2 * c.R * (tau + 2) + tau) / (2 * d),
    }


def asymptotic_state(tau, a, f):
    """Stationary state reached from any initial state with the given ``tau``."""
    k = asymptotic_coefficients(tau, a, f)
    rho = 0.25 * (
        I4
        + k["r3"] * sigma_sym(3)
        + k["r12"] * s_sym(1, 2)
        + k["r11"] * s_sym(1, 1)
        + k["r22"] * s_sym(2, 2)
        + k["r33"] * s_sym(3, 3)
    )
    return AsymptoticState(tau=float(tau), xstate=xstate_cast(rho), coeffs=k)


def bell_block_entries(a, f):
    """Entries ``A, B, C, W`` of the normalized Q-block of the stationary state.

    In the order ``(psi1, psi3, psi2)`` the block is ``[[A, 0, W], [0, B, 0], [W*, 0, C]]``.
    """
    _check_rate(a)
    f2 = f * f
    den = 108 * a**4 + 216 * a**3 * f2 + 3 * a**2 * (23 * f2**2 + 4) + 2 * a * f2 * (3 * f2**2 + 8) + 3 * f2**2
    A = (36 * a**4 + 72 * a**3 * f2 + a**2 * (23 * f2**2 + 4) + 2 * a * f2 * (f2**2 + 4) + f2**2) / den
    B = (36 * a**4 + 24 * a**3 * f2 + a**2 * (15 * f2**2 + 4) + 2 * a * f2**3 + f2**2) / den
    C = (36 * a**4 + 120 * a**3 * f2 + a**2 * (31 * f2**2 + 4) + 2 * a * f2 * (f2**2 + 4) + f2**2) / den
    W = -4 * np.sqrt(a) * f * (2j * a**1.5 * f + 18 * a**3 + 15 * a**2 * f2 + 2 * a * (f2**2 + 1) + f2) / den
    return A, B, C, W


def asymptotic_state_bell(tau, a, f):
    """Same stationary state assembled from the Bell-basis block entries."""
    _check_tau(tau)
    A, B, C, W = bell_block_entries(a, f)
    block = np.array([[A, 0, W], [0, B, 0], [np.conj(W), 0, C]], dtype=complex)
    q = from_q_block(block)
    p = I4 - from_q_block(np.eye(3))
    return (3 + tau) / 4 * q + (1 - tau) / 4 * p


@dataclass(frozen=True)
class AsymptoticConcurrence:
    C: float
    D1: float
    D2: float


def asymptotic_concurrence(tau, a, f):
    """``C = 2 max(0, D1, D2)`` of :func:`asymptotic_state`."""
    _check_tau(tau)
    c = faithful_coefficients(a, f)
    d = 4 * (3 + 2 * c.R)
    D1 = (2 * abs(tau - 2 * c.R) - (tau + 3) * np.sqrt((1 + 2 * c.R) ** 2 - 4 * c.M**2)) / d
    D2 = (2 * (tau + 3) * np.sqrt(4 * c.N**2 + c.Lc**2) - abs(tau * (1 + 2 * c.R) - 3 + 2 * c.R)) / d
    return AsymptoticConcurrence(C=2 * max(0.0, D1, D2), D1=float(D1), D2=float(D2))


def asymptotic_concurrence_numeric(tau, a, f):
    return concurrence(asymptotic_state(tau, a, f).matrix)


@dataclass(frozen=True)
class OptimizationResult:
    f_star: float
    C_star: float


def optimize_feedback(a, tau, f_range=(0.0, 10.0), *, n_grid=1001, tol=1e-4):
    """Maximize the asymptotic concurrence over ``f`` in ``f_range``.

    A dense grid locates the best cell; golden-section search refines it until
    the bracket is narrower than ``tol``. Flat objectives return the first grid
    maximizer.
    """
    lo, hi = (float(x) for x in f_range)
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo:
        raise ValueError(f"empty or invalid feedback range {f_range}")
    _check_rate(a)
    _check_tau(tau)

    def obj(f):
        return asymptotic_concurrence(tau, a, f).C

    if hi == lo:
        return OptimizationResult(lo, obj(lo))
    grid = np.linspace(lo, hi, n_grid)
    vals = np.array([obj(f) for f in grid])
    i = int(np.argmax(vals))
    f_best, c_best = grid[i], vals[i]
    if 0 < i < n_grid - 1 and vals[i - 1] < c_best and vals[i + 1] < c_best:
        # golden's xtol is relative to |x|
        res = minimize_scalar(
            lambda f: -obj(f),
            bracket=(grid[i - 1], f_best, grid[i + 1]),
            method="golden",
            options={"xtol": tol / max(abs(f_best), 1.0) / 4},
        )
        if -res.fun >= c_best:
            f_best, c_best = float(res.x), float(-res.fun)
    return OptimizationResult(float(f_best), float(c_best))


def surface_rows(a_values, f_values, tau_values):
    """Rows ``(a, f, tau, D1, D2, C)`` sorted by ``a``, then ``f``, then ``tau``."""
    rows = []
    for a in sorted(a_values):
        for f in sorted(f_values):
            for tau in sorted(tau_values):
                r = asymptotic_concurrence(tau, a, f)
                rows.append((a, f, tau, r.D1, r.D2, r.C))
    return rows


def write_surface_csv(rows, path, comment=None):
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["a", "f", "tau", "D1", "D2", "C"])
        for row in rows:
            w.writerow([format(float(x), ".17g") for x in row])
