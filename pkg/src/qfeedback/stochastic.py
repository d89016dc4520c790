"""Conditioned homodyne trajectories with instantaneous Markovian feedback.

The filtering equation

    d rho = (-i[H, rho] + D[L] rho + D_rest rho) dt + sqrt(eta) S[L] rho dW,
    S[L] rho = L rho + rho L^+ - Tr[(L + L^+) rho] rho,

is stepped in the Kraus form of the Euler-Maruyama update: with the record
increment ``dy = sqrt(eta) Tr[(L + L^+) rho] dt + dW``,

    M = I + (-i H - 1/2 L^+ L - 1/2 sum_mu L_mu^+ L_mu) dt + sqrt(eta) L dy
    rho' = M rho M^+ + (1 - eta) L rho L^+ dt + sum_mu L_mu rho L_mu^+ dt

followed by trace renormalization. This agrees with the plain Euler-Maruyama
step to first order in ``dt`` but keeps ``rho'`` positive, which the plain step
does not do for nearly pure states.

The feedback then acts as the kick ``rho -> U rho U^+`` with
``U = exp(-i F I dt)`` and photocurrent sample
``I dt = Tr[(L + L^+) rho] dt + dW / sqrt(eta)``, both evaluated on the
state before the step.

Averaged over the noise this reproduces the linear feedback master equation
built by :func:`qfeedback.feedback.feedback_liouvillian` up to an ``O(dt)``
bias. Trajectories run vectorized as a batch; the noise of trajectory ``k``
is drawn from a Philox generator keyed by ``(seed, k)``, so any trajectory can
be regenerated on its own.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, StateBlowUp
from .evolve import Trajectory
from .generator import lindblad_extract
from .qops import I4, fano_table

BLOWUP_EIG = -1e-4
ANTIHERMITIAN_TOL = 1e-9


@dataclass(frozen=True)
class SmeConfig:
    """Monitored channel ``L``, feedback Hamiltonian ``F`` and integration settings."""

    L: object
    F: np.ndarray
    eta: float = 1.0
    dt: float = 1e-3
    T: float = 1.0
    seed: int = 0

    def __post_init__(self):
        F = np.asarray(self.F, dtype=complex)
        err = float(np.max(np.abs(F - F.conj().T)))
        if err > 1e-12:
            raise NotHermitian({"NotHermitian": err})
        object.__setattr__(self, "F", F)
        if not (0.0 < self.eta <= 1.0):
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.T < self.dt:
            raise ValueError(f"horizon T={self.T} is shorter than dt={self.dt}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def n_steps(self):
        return int(round(self.T / self.dt))


@dataclass(frozen=True)
class ConditionedRecord:
    times: np.ndarray
    states: np.ndarray
    photocurrent: np.ndarray


def trajectory_rng(seed, index):
    """Counter-based generator for trajectory ``index`` of a run seeded with ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def _noise(cfg, indices):
    sd = np.sqrt(cfg.dt)
    return np.stack([trajectory_rng(cfg.seed, k).normal(0.0, sd, cfg.n_steps) for k in indices])


def _run_batch(H, K_rest, cfg, rho0, indices, *, keep, diffusion=True):
    """Evolve ``len(indices)`` trajectories; ``keep`` lists the step numbers to record."""
    n = len(indices)
    dW = _noise(cfg, indices)
    dt = cfg.dt
    L = cfg.L.op
    Ld = L.conj().T
    x = L + Ld
    rest = [op.op for op in lindblad_extract(K_rest)]
    G = -1j * np.asarray(H, dtype=complex) - 0.5 * Ld @ L
    for op in rest:
        G = G - 0.5 * op.conj().T @ op
    A0 = I4 + G * dt
    A0d = A0.conj().T
    # channels applied as plain jumps: all unmonitored ones plus the undetected
    # fraction of L (all of it when the back-action is switched off)
    eta_f = cfg.eta if diffusion else 0.0
    jumps = [np.sqrt(dt) * op for op in rest]
    if eta_f < 1.0:
        jumps.append(np.sqrt((1.0 - eta_f) * dt) * L)
    fev, fvec = np.linalg.eigh(cfg.F)
    fvec_d = fvec.conj().T
    kick = bool(np.any(fev != 0))

    rho = np.broadcast_to(np.asarray(rho0, dtype=complex), (n, 4, 4)).copy()
    keep = sorted(set(keep))
    kept, currents = {}, np.empty((n, cfg.n_steps))
    if 0 in keep:
        kept[0] = rho.copy()
    for step in range(cfg.n_steps):
        dw = dW[:, step]
        mean_x = np.einsum("ab,nba->n", x, rho).real
        c = (np.sqrt(eta_f) * (np.sqrt(eta_f) * mean_x * dt + dw))[:, None, None]
        a_rho = A0 @ rho
        l_rho = L @ rho
        new = a_rho @ A0d + c * (l_rho @ A0d + a_rho @ Ld) + c**2 * (l_rho @ Ld)
        for J in jumps:
            new = new + J @ rho @ J.conj().T
        rho = new
        idt = mean_x * dt + dw / np.sqrt(cfg.eta)
        currents[:, step] = idt
        if kick:
            phases = np.exp(-1j * fev[None, :] * idt[:, None])
            U = (fvec[None, :, :] * phases[:, None, :]) @ fvec_d
            rho = U @ rho @ U.conj().transpose(0, 2, 1)
        anti = np.max(np.abs(rho - rho.conj().transpose(0, 2, 1)))
        if anti > ANTIHERMITIAN_TOL:
            raise StateBlowUp(f"anti-Hermitian part {anti:.3e} at step {step + 1}")
        rho = 0.5 * (rho + rho.conj().transpose(0, 2, 1))
        tr = np.trace(rho, axis1=1, axis2=2).real
        if not np.all(np.isfinite(tr)) or np.any(tr <= 0):
            raise StateBlowUp(f"non-positive trace at step {step + 1}")
        rho = rho / tr[:, None, None]
        if step + 1 in keep:
            min_eig = np.linalg.eigvalsh(rho)[:, 0]
            worst = int(np.argmin(min_eig))
            if min_eig[worst] < BLOWUP_EIG:
                raise StateBlowUp(
                    f"trajectory {indices[worst]} reached eigenvalue {min_eig[worst]:.3e} at t={(step + 1) * dt:.6g}"
                )
            kept[step + 1] = rho.copy()
    return kept, currents


def simulate_trajectory(H, K_rest, cfg, rho0, *, index=0, diffusion=True):
    """One conditioned trajectory recorded at every step.

    ``K_rest`` holds the unmonitored channels. ``diffusion=False`` drops the
    measurement back-action term, leaving the feedback kick and the average
    drift.
    """
    steps = range(cfg.n_steps + 1)
    kept, currents = _run_batch(H, K_rest, cfg, rho0, [index], keep=steps, diffusion=diffusion)
    return ConditionedRecord(
        times=np.arange(cfg.n_steps + 1) * cfg.dt,
        states=np.stack([kept[s][0] for s in steps]),
        photocurrent=currents[0],
    )


@dataclass(frozen=True)
class EnsembleResult:
    """Mean conditioned state and Fano-coefficient spread on a time grid."""

    times: np.ndarray
    mean_states: np.ndarray
    fano_mean: np.ndarray
    fano_sem: np.ndarray
    photocurrent_mean: np.ndarray
    n: int

    def trajectory(self):
        return Trajectory.from_states(self.times, self.mean_states, psd_tol=1e-6)


def _grid_steps(cfg, grid):
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    steps = np.rint(grid / cfg.dt).astype(int)
    if np.any(np.abs(steps * cfg.dt - grid) > 1e-9 * max(1.0, cfg.T)):
        raise ValueError("grid times must be multiples of dt")
    if np.any(steps < 0) or np.any(steps > cfg.n_steps):
        raise ValueError("grid times must lie in [0, T]")
    return grid, steps


def ensemble_run(n, H, K_rest, cfg, rho0, grid, *, chunk=1000):
    """Run ``n`` trajectories and collect statistics at the ``grid`` times."""
    if n < 1:
        raise ValueError(f"ensemble size must be >= 1, got {n}")
    grid, steps = _grid_steps(cfg, grid)
    sums = np.zeros((len(steps), 4, 4), complex)
    fano_sum = np.zeros((len(steps), 4, 4))
    fano_sq = np.zeros((len(steps), 4, 4))
    current_sum = np.zeros(cfg.n_steps)
    for start in range(0, n, chunk):
        idx = list(range(start, min(n, start + chunk)))
        kept, currents = _run_batch(H, K_rest, cfg, rho0, idx, keep=steps)
        current_sum += currents.sum(axis=0)
        for g, s in enumerate(steps):
            sums[g] += kept[s].sum(axis=0)
            tab = fano_table(kept[s])
            fano_sum[g] += tab.sum(axis=0)
            fano_sq[g] += (tab**2).sum(axis=0)
    fano_mean = fano_sum / n
    var = np.maximum(fano_sq / n - fano_mean**2, 0.0) * (n / max(n - 1, 1))
    return EnsembleResult(
        times=grid,
        mean_states=sums / n,
        fano_mean=fano_mean,
        fano_sem=np.sqrt(var / n),
        photocurrent_mean=current_sum / n,
        n=n,
    )


def ensemble_mean(n, H, K_rest, cfg, rho0, grid):
    """Mean of ``n`` conditioned trajectories as a :class:`Trajectory`."""
    return ensemble_run(n, H, K_rest, cfg, rho0, grid).trajectory()


def write_photocurrent_csv(record, path, comment=None):
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "I_dt"])
        for t, i in zip(record.times[1:], record.photocurrent):
            w.writerow([format(float(t), ".17g"), format(float(i), ".17g")])
