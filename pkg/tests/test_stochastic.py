import numpy as np
import pytest

from qfeedback.errors import NotHermitian
from qfeedback.evolve import propagate
from qfeedback.feedback import SymmetricScenario, feedback_liouvillian
from qfeedback.generator import KossakowskiMatrix, LindbladOp, liouvillian
from qfeedback.qops import fano_table
from qfeedback.states import catalog, purity
from qfeedback.stochastic import (
    SmeConfig,
    ensemble_run,
    simulate_trajectory,
    trajectory_rng,
    write_photocurrent_csv,
)


def parts(a=1.0, f=0.5, eta=1.0):
    s = SymmetricScenario(a=a, f=f, eta=eta)
    c = s.monitored.coefficients
    k_rest = KossakowskiMatrix(s.base_kossakowski.matrix - np.outer(c, c.conj()))
    return s, k_rest


def test_rng_is_keyed_by_seed_and_index():
    a = trajectory_rng(3, 7).normal(size=5)
    assert np.array_equal(a, trajectory_rng(3, 7).normal(size=5))
    assert not np.array_equal(a, trajectory_rng(3, 8).normal(size=5))
    assert not np.array_equal(a, trajectory_rng(4, 7).normal(size=5))


def test_trajectory_reproducible_and_positive():
    s, k_rest = parts()
    cfg = SmeConfig(L=s.monitored, F=s.feedback.operator(), dt=1e-3, T=0.2, seed=11)
    r1 = simulate_trajectory(s.base_hamiltonian, k_rest, cfg, catalog("rho2"), index=5)
    r2 = simulate_trajectory(s.base_hamiltonian, k_rest, cfg, catalog("rho2"), index=5)
    assert np.array_equal(r1.states, r2.states)
    assert np.array_equal(r1.photocurrent, r2.photocurrent)
    assert r1.states.shape == (cfg.n_steps + 1, 4, 4)
    for rho in r1.states:
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(rho, rho.conj().T, atol=1e-14)
        assert np.linalg.eigvalsh(rho)[0] > -1e-10


def test_batch_matches_single_trajectory():
    s, k_rest = parts()
    cfg = SmeConfig(L=s.monitored, F=s.feedback.operator(), dt=1e-3, T=0.1, seed=2)
    single = simulate_trajectory(s.base_hamiltonian, k_rest, cfg, catalog("rho2"), index=3)
    res = ensemble_run(1, s.base_hamiltonian, k_rest, cfg, catalog("rho2"), [0.1])
    single0 = simulate_trajectory(s.base_hamiltonian, k_rest, cfg, catalog("rho2"), index=0)
    assert np.allclose(res.mean_states[0], single0.states[-1], atol=1e-14)
    assert not np.allclose(single.states[-1], single0.states[-1])


def test_pure_states_stay_pure_without_unmonitored_channels():
    rng = np.random.default_rng(0)
    c = rng.normal(size=6) + 1j * rng.normal(size=6)
    L = LindbladOp(c[:3], c[3:])
    F = np.diag([0.3, -0.1, 0.2, 0.0]).astype(complex)
    cfg = SmeConfig(L=L, F=F, dt=1e-3, T=0.2, seed=1)
    zero = KossakowskiMatrix(np.zeros((6, 6)))
    rec = simulate_trajectory(np.zeros((4, 4)), zero, cfg, catalog("rho1"))
    assert np.min([purity(r) for r in rec.states]) > 1 - 1e-10


def test_no_diffusion_without_feedback_follows_master_equation():
    s, k_rest = parts(f=0.0)
    L = liouvillian(s.base_hamiltonian, s.base_kossakowski)
    errs = []
    for dt in (2e-3, 1e-3):
        cfg = SmeConfig(L=s.monitored, F=np.zeros((4, 4)), dt=dt, T=0.5, seed=0)
        rec = simulate_trajectory(s.base_hamiltonian, k_rest, cfg, catalog("rho2"), diffusion=False)
        errs.append(np.max(np.abs(rec.states[-1] - propagate(L, catalog("rho2"), 0.5))))
    # first-order scheme: error shrinks roughly in proportion to dt
    assert errs[1] < 5e-3
    assert 1.5 < errs[0] / errs[1] < 2.5


def test_ensemble_mean_approaches_feedback_master_equation():
    s, k_rest = parts()
    cfg = SmeConfig(L=s.monitored, F=s.feedback.operator(), dt=1e-3, T=0.25, seed=0)
    res = ensemble_run(400, s.base_hamiltonian, k_rest, cfg, catalog("rho2"), [0.25])
    target = fano_table(propagate(feedback_liouvillian(s.base_hamiltonian, s.base_kossakowski, s.monitored, s.feedback), catalog("rho2"), 0.25))
    dev = np.abs(res.fano_mean[0] - target)
    assert np.max(dev - 4 * res.fano_sem[0]) < 5e-3
    traj = res.trajectory()
    assert len(traj) == 1


def test_config_validation():
    s, _ = parts()
    with pytest.raises(NotHermitian):
        SmeConfig(L=s.monitored, F=np.array([[0, 1], [0, 0]]).repeat(2, 0).repeat(2, 1))
    for kwargs in ({"eta": 0.0}, {"eta": 1.5}, {"dt": 0.0}, {"T": 1e-4}, {"seed": -1}):
        with pytest.raises(ValueError):
            SmeConfig(L=s.monitored, F=np.zeros((4, 4)), **kwargs)


def test_grid_validation():
    s, k_rest = parts()
    cfg = SmeConfig(L=s.monitored, F=np.zeros((4, 4)), dt=1e-2, T=0.1)
    with pytest.raises(ValueError):
        ensemble_run(2, s.base_hamiltonian, k_rest, cfg, catalog("rho2"), [0.015])
    with pytest.raises(ValueError):
        ensemble_run(2, s.base_hamiltonian, k_rest, cfg, catalog("rho2"), [0.2])
    with pytest.raises(ValueError):
        ensemble_run(0, s.base_hamiltonian, k_rest, cfg, catalog("rho2"), [0.1])


def test_photocurrent_csv(tmp_path):
    s, k_rest = parts()
    cfg = SmeConfig(L=s.monitored, F=s.feedback.operator(), dt=1e-2, T=0.1, seed=4)
    rec = simulate_trajectory(s.base_hamiltonian, k_rest, cfg, catalog("rho2"))
    path = tmp_path / "i.csv"
    write_photocurrent_csv(rec, path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (10, 2)
    assert np.array_equal(data[:, 1], rec.photocurrent)
