"""Deterministic propagation: matrix exponential, adaptive Runge-Kutta, closed forms."""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .entangle import concurrence
from .errors import StepSizeUnderflow
from .generator import unvec, vec
from .qops import tau_of
from .states import PSD_TOL, XState, validate

RTOL = 1e-10
ATOL = 1e-12


@dataclass(frozen=True)
class Trajectory:
    """Sampled states with their concurrence and ``tau``; time in units of 1/gamma."""

    times: np.ndarray
    states: np.ndarray
    concurrences: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        if not (len(self.states) == len(self.concurrences) == len(self.tau) == n):
            raise ValueError("trajectory arrays must have equal length")
        if n > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    @classmethod
    def from_states(cls, times, states, psd_tol=PSD_TOL, tol_scale=1.0):
        states = np.asarray(states, dtype=complex)
        for rho in states:
            validate(rho, psd_tol=psd_tol, tol_scale=tol_scale)
        return cls(
            times=np.asarray(times, dtype=float),
            states=states,
            concurrences=np.array([concurrence(r) for r in states]),
            tau=np.asarray(tau_of(states), dtype=float),
        )

    def __len__(self):
        return len(self.times)


def _check_grid(grid):
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ValueError("time grid is empty")
    if grid[0] < 0:
        raise ValueError(f"time grid must start at t >= 0, got {grid[0]}")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return grid


def propagate(L, rho0, t):
    """``exp(t L) rho0``, re-validated as a density matrix."""
    if t < 0:
        raise ValueError(f"propagation time must be >= 0, got {t}")
    rho0 = np.asarray(rho0, dtype=complex)
    if t == 0:
        return validate(rho0).copy()
    rho = unvec(L.propagator(t) @ vec(rho0))
    return validate(rho, tol_scale=_roundoff_scale(L, t))


def _roundoff_scale(L, t):
    """Round-off of ``expm(t L)`` grows roughly with ``t ||L||``."""
    return max(1.0, t * float(np.linalg.norm(L.matrix, 1)))


def propagate_grid(L, rho0, grid):
    """Exact propagation sampled on ``grid``, stepping between consecutive points."""
    grid = _check_grid(grid)
    v = vec(np.asarray(rho0, dtype=complex))
    states, last = [], 0.0
    for t in grid:
        if t > last:
            v = L.propagator(t - last) @ v
            last = t
        states.append(unvec(v))
    return Trajectory.from_states(grid, states, tol_scale=_roundoff_scale(L, grid[-1]))


def integrate(L, rho0, grid, *, rtol=RTOL, atol=ATOL):
    """Adaptive Dormand-Prince 5(4) integration sampled on ``grid``."""
    grid = _check_grid(grid)
    rho0 = validate(rho0)
    if grid.size == 1 and grid[0] == 0:
        return Trajectory.from_states(grid, [rho0])
    m = L.matrix
    t0 = 0.0 if grid[0] > 0 else grid[0]
    sol = solve_ivp(
        lambda _t, y: m @ y,
        (t0, grid[-1]),
        vec(rho0),
        method="RK45",
        t_eval=grid,
        rtol=rtol,
        atol=atol,
    )
    if sol.status != 0:
        raise StepSizeUnderflow(float(sol.t[-1]) if sol.t.size else t0)
    states = unvec(sol.y.T)
    # the adaptive solver controls error to about rtol relative to each entry
    return Trajectory.from_states(grid, states, tol_scale=max(1.0, rtol / 1e-12) * len(grid))


def _rho2_entries(t, delta):
    e4, e12 = np.exp(-4 * t), np.exp(-12 * t)
    c, s = np.cos(8 * delta * t), np.sin(8 * delta * t)
    A = (1 - e12) / 6
    b_plus = (3 * e4 * c + e12 + 2) / 6
    b_minus = (-3 * e4 * c + e12 + 2) / 6
    c_plus = (-1 + e12 + 3j * e4 * s) / 6
    c_minus = (-1 + e12 - 3j * e4 * s) / 6
    return A, b_plus, b_minus, c_plus, c_minus


def analytic_rho2(t, delta):
    """Closed-form evolution of ``|1><1| x |0><0|`` for ``a=1, f=0, gamma=1``.

    ``B+`` (which starts at 1) sits in the ``|10><10|`` slot and ``B-`` in
    ``|01><01|``; the coherence ``<01|rho|10>`` is ``C-``.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    A, b_plus, b_minus, _, c_minus = _rho2_entries(t, delta)
    return XState(a=A, b=b_minus, c=b_plus, d=A, z=complex(c_minus), w=0j)


def analytic_rho2_concurrence(t, delta):
    """Closed-form concurrence of :func:`analytic_rho2`."""
    t = np.asarray(t, dtype=float)
    first = np.sqrt(9 * np.exp(-8 * t) * np.sin(8 * delta * t) ** 2 + np.exp(-24 * t) - 2 * np.exp(-12 * t) + 1)
    # sqrt(e^{-24t} (e^{12t} - 1)^2) written without overflow for large t
    second = np.abs(1 - np.exp(-12 * t))
    return (first - second) / 3


def state_columns():
    return [f"{part}_{i}{j}" for i in range(4) for j in range(4) for part in ("re", "im")]


def write_trajectory_csv(traj, path, comment=None):
    """Columns ``t``, 16 interleaved re/im state entries (row-major), concurrence, tau."""
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", *state_columns(), "concurrence", "tau"])
        for t, rho, c, tau in zip(traj.times, traj.states, traj.concurrences, traj.tau):
            flat = []
            for z in rho.ravel():
                flat += [z.real, z.imag]
            w.writerow([_num(x) for x in (t, *flat, c, tau)])


def _num(x):
    return format(float(x), ".17g")
