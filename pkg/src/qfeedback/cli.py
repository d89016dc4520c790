"""Command-line front end.

Every subcommand reads a JSON config (``--config``), writes its artifact to
``--out`` (stdout when omitted) and echoes the effective config. CSV outputs
start with two comment lines holding the SHA-256 of the canonical config and
the config itself. Exit codes: 0 success, 1 input error, 2 numerical failure.
"""

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import stationary as st
from .entangle import short_time_entangles, short_time_input
from .errors import InvalidState, QFeedbackError
from .evolve import propagate, propagate_grid, state_columns
from .feedback import SymmetricScenario, feedback_liouvillian, symmetric_scenario
from .generator import KossakowskiMatrix, liouvillian
from .qops import SIGMA, fano_table, symmetric_ops
from .states import catalog, density_from_json, validate
from .stochastic import SmeConfig, ensemble_run
from .wclcheck import wcl_compatible

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2

# U, V with the product state U|1> x V|1>
PRODUCT_FRAMES = {
    "rho1": (SIGMA[1], SIGMA[1]),
    "rho2": (SIGMA[0], SIGMA[1]),
    "rho3": (SIGMA[1], SIGMA[0]),
    "rho4": (SIGMA[0], SIGMA[0]),
}


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    """All recognized config fields; subcommands read the ones they need."""

    scenario: str = "symmetric"
    a: float = 1.0
    f: float = 0.0
    gamma: float = 1.0
    delta: float = 1.0
    eta: float = 1.0
    initial_state: object = "rho2"
    grid: dict = field(default_factory=lambda: {"t_max": 3.0, "n_points": 301})
    seed: int = 0
    ensemble_n: int = 1000
    dt: float = 1e-3
    sample_times: list = None
    tau: float = -1.0
    tau_grid: dict = None
    a_values: list = None
    f_values: list = None
    f_range: list = field(default_factory=lambda: [0.0, 10.0])
    n_grid: int = 1001
    states: list = field(default_factory=lambda: ["rho1", "rho2", "rho3", "rho4"])
    hamiltonian: list = None
    hamiltonian_terms: dict = None
    kossakowski: list = None
    rates: list = None

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown config fields: {unknown}")
        cfg = cls(**data)
        cfg.check()
        return cfg

    def check(self):
        if self.scenario not in ("symmetric", "custom"):
            raise ConfigError(f"scenario must be 'symmetric' or 'custom', got {self.scenario!r}")
        for name in ("a", "f", "gamma", "delta", "eta", "dt", "tau"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
                raise ConfigError(f"{name} must be a finite number, got {v!r}")
        if self.a < 0:
            raise ConfigError(f"a must be >= 0, got {self.a}")
        if not (0 < self.eta <= 1):
            raise ConfigError(f"eta must lie in (0, 1], got {self.eta}")
        if not isinstance(self.grid, dict) or set(self.grid) - {"t_max", "n_points"}:
            raise ConfigError("grid must be an object with keys t_max and n_points")
        if self.grid.get("t_max", 0) < 0 or int(self.grid.get("n_points", 1)) < 1:
            raise ConfigError("grid needs t_max >= 0 and n_points >= 1")
        if int(self.ensemble_n) < 1:
            raise ConfigError("ensemble_n must be >= 1")
        if not (0 <= int(self.seed) < 2**64):
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.scenario == "custom" and self.hamiltonian is None and self.hamiltonian_terms is None:
            raise ConfigError("custom scenario needs hamiltonian or hamiltonian_terms")

    def to_dict(self):
        return dataclasses.asdict(self)

    def canonical(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def sha256(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    # derived objects ---------------------------------------------------

    def symmetric(self):
        return SymmetricScenario(a=self.a, f=self.f, gamma=self.gamma, delta=self.delta, eta=self.eta)

    def hamiltonian_matrix(self):
        if self.hamiltonian is not None:
            arr = np.array([complex(re, im) for re, im in self.hamiltonian])
            if arr.size != 16:
                raise ConfigError("hamiltonian must list 16 [re, im] pairs")
            return arr.reshape(4, 4)
        if self.hamiltonian_terms is not None:
            ops = symmetric_ops()
            bad = sorted(set(self.hamiltonian_terms) - set(ops))
            if bad:
                raise ConfigError(f"unknown hamiltonian terms {bad}; expected names from {sorted(ops)}")
            return sum((float(c) * ops[k] for k, c in self.hamiltonian_terms.items()), np.zeros((4, 4), complex))
        return self.symmetric().base_hamiltonian

    def kossakowski_matrix(self):
        if self.kossakowski is not None:
            return KossakowskiMatrix.from_json(self.kossakowski)
        if self.rates is not None:
            return KossakowskiMatrix.symmetric(np.diag(np.asarray(self.rates, dtype=float)))
        return self.symmetric().base_kossakowski

    def generator(self):
        if self.scenario == "symmetric":
            return symmetric_scenario(self.symmetric())
        return liouvillian(self.hamiltonian_matrix(), self.kossakowski_matrix())

    def rho0(self):
        if isinstance(self.initial_state, str):
            try:
                return catalog(self.initial_state)
            except KeyError as exc:
                raise ConfigError(str(exc.args[0])) from None
        return density_from_json(self.initial_state)

    def time_grid(self):
        t_max = float(self.grid.get("t_max", 0.0))
        n = int(self.grid.get("n_points", 1))
        if t_max == 0 or n == 1:
            return np.array([0.0]) if t_max == 0 else np.array([t_max])
        return np.linspace(0.0, t_max, n)

    def taus(self):
        if self.tau_grid is None:
            return [float(self.tau)]
        g = self.tau_grid
        lo, hi, step = float(g.get("min", -3.0)), float(g.get("max", 1.0)), float(g.get("step", 0.01))
        n = int(round((hi - lo) / step))
        return [float(x) for x in np.round(lo + step * np.arange(n + 1), 12)]


def _num(x):
    return format(float(x), ".17g")


def _header(cfg):
    return f"# config-sha256: {cfg.sha256()}\n# config: {cfg.canonical()}\n"


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _json_output(cfg, payload):
    body = {"config_sha256": cfg.sha256(), "config": cfg.to_dict(), **payload}
    return json.dumps(_json_ready(body), indent=2, sort_keys=True) + "\n"


def _csv_text(cfg, header, rows):
    buf = io.StringIO()
    buf.write(_header(cfg))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(x) for x in row])
    return buf.getvalue()


# subcommands ------------------------------------------------------------


def cmd_evolve(cfg):
    traj = propagate_grid(cfg.generator(), cfg.rho0(), cfg.time_grid())
    rows = []
    for t, rho, c, tau in zip(traj.times, traj.states, traj.concurrences, traj.tau):
        flat = [x for z in rho.ravel() for x in (z.real, z.imag)]
        rows.append((t, *flat, c, tau))
    return _csv_text(cfg, ["t", *state_columns(), "concurrence", "tau"], rows)


def cmd_stationary(cfg):
    a_values = cfg.a_values if cfg.a_values is not None else [cfg.a]
    f_values = cfg.f_values if cfg.f_values is not None else [cfg.f]
    rows = st.surface_rows(a_values, f_values, cfg.taus())
    return _csv_text(cfg, ["a", "f", "tau", "D1", "D2", "C"], rows)


def _closed_form(name, a, f, delta):
    if name in ("rho2", "rho3"):
        return -(a * f * f + 4 * delta * delta)
    if name == "rho4":
        return a * (np.sqrt(a) - f) ** 2
    if name == "rho1":
        return a * (np.sqrt(a) + f) ** 2
    return None


def cmd_entangle_check(cfg):
    L = cfg.generator()
    out = {}
    for name in cfg.states:
        if name not in PRODUCT_FRAMES:
            raise ConfigError(f"entangle-check supports the product states {sorted(PRODUCT_FRAMES)}, got {name!r}")
        U, V = PRODUCT_FRAMES[name]
        res = short_time_entangles(short_time_input(L.hamiltonian, L.kossakowski, U, V))
        entry = {
            "verdict": res.verdict,
            "boundary": res.boundary,
            "lhs": res.lhs,
            "rhs": res.rhs,
            # |u|^2 |v|^2 = 4 for every product state
            "reduced_expression_value": (res.lhs - res.rhs) / 4,
        }
        if cfg.scenario == "symmetric" and cfg.eta == 1:
            entry["closed_form"] = _closed_form(name, cfg.a, cfg.f, cfg.delta)
        out[name] = entry
    return _json_output(cfg, {"states": out})


def _mc_parts(cfg):
    s = cfg.symmetric()
    L1 = s.monitored
    fb = s.feedback
    c = L1.coefficients
    k_rest = KossakowskiMatrix(s.base_kossakowski.matrix - np.outer(c, c.conj()))
    return s, L1, fb, k_rest


def cmd_mc(cfg):
    if cfg.scenario != "symmetric":
        raise ConfigError("mc supports the symmetric scenario only")
    s, L1, fb, k_rest = _mc_parts(cfg)
    T = float(cfg.grid.get("t_max", 1.0))
    sme = SmeConfig(L=L1, F=fb.operator(), eta=cfg.eta, dt=cfg.dt, T=T, seed=int(cfg.seed))
    times = cfg.sample_times if cfg.sample_times is not None else [T / 4, T / 2, T]
    rho0 = cfg.rho0()
    res = ensemble_run(int(cfg.ensemble_n), s.base_hamiltonian, k_rest, sme, rho0, times)
    l_fb = feedback_liouvillian(s.base_hamiltonian, s.base_kossakowski, L1, fb)
    l_free = liouvillian(s.base_hamiltonian, s.base_kossakowski)
    rows, report = [], []
    labels = [f"r{i}{j}" for i in range(4) for j in range(4)][1:]
    for g, t in enumerate(res.times):
        target = fano_table(propagate(l_fb, rho0, t)).ravel()[1:]
        free = fano_table(propagate(l_free, rho0, t)).ravel()[1:]
        mean = res.fano_mean[g].ravel()[1:]
        sem = res.fano_sem[g].ravel()[1:]
        for k in range(15):
            rows.append((t, k, mean[k], sem[k], target[k], free[k]))
        dev = float(np.max(np.abs(mean - target)))
        dev_free = float(np.max(np.abs(mean - free)))
        report.append(
            {
                "t": float(t),
                "max_dev_feedback": dev,
                "bound_3sigma": float(3 * np.max(sem)),
                "max_dev_no_feedback": dev_free,
                "within_3sigma": bool(np.all(np.abs(mean - target) <= 3 * sem + 1e-15)),
            }
        )
    text = io.StringIO()
    text.write(_header(cfg))
    text.write("# components: " + " ".join(f"{k}={lab}" for k, lab in enumerate(labels)) + "\n")
    w = csv.writer(text, lineterminator="\n")
    w.writerow(["t", "component", "ensemble_mean", "sem", "feedback_me", "no_feedback_me"])
    for t, k, *vals in rows:
        w.writerow([_num(t), k, *(_num(v) for v in vals)])
    return text.getvalue(), _json_output(cfg, {"n": res.n, "convergence": report})


def cmd_wcl(cfg):
    H = cfg.hamiltonian_matrix()
    rates = cfg.rates if cfg.rates is not None else [cfg.a] * 3
    return _json_output(cfg, wcl_compatible(H, rates).to_json())


def cmd_optimize(cfg):
    res = st.optimize_feedback(cfg.a, cfg.tau, tuple(cfg.f_range), n_grid=int(cfg.n_grid))
    return _json_output(cfg, {"f_star": res.f_star, "C_star": res.C_star})


COMMANDS = {
    "evolve": cmd_evolve,
    "stationary": cmd_stationary,
    "entangle-check": cmd_entangle_check,
    "mc": cmd_mc,
    "wcl": cmd_wcl,
    "optimize": cmd_optimize,
}


def build_parser():
    p = argparse.ArgumentParser(prog="qfeedback", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--seed", type=int, help="override the config seed")
    return p


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def load_config(path, seed=None):
    with open(path) as fh:
        data = json.load(fh)
    if seed is not None:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = {**data, "seed": seed}
    return ScenarioConfig.from_dict(data)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.seed)
        if args.command == "mc" or cfg.scenario == "symmetric":
            cfg.symmetric()
        if cfg.initial_state is not None and args.command in ("evolve", "mc"):
            validate(cfg.rho0())
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        result = COMMANDS[args.command](cfg)
    except (ArithmeticError, InvalidState, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, KeyError, QFeedbackError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if isinstance(result, tuple):
        text, report = result
        _write(args.out, text)
        if args.out is None:
            sys.stderr.write(report)
        else:
            _write(args.out + ".report.json", report)
    else:
        _write(args.out, result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
