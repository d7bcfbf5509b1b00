"""Experiment drivers: cost curves, path comparisons, random-unitary runs,
depth sweeps and parameter sweeps, written out as CSV and JSON.

Every run owns its random stream: run ``i`` is seeded with ``seed + i`` and
can be reproduced on its own with :func:`execute_run`.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .analysis import DEFAULT_GRID_POINTS, compilation_stats, path_profile
from .baselines import ideal_sequence, qdrift, randomized_trotter
from .compiler import END, LAST, StoqConfig, compile
from .gates import GateAlphabet, hamiltonian_term_alphabet, universal_alphabet
from .hamiltonian import PRESETS, Hamiltonian, load_hamiltonian, preset
from .random_targets import haar_random_unitary, random_circuit

log = logging.getLogger(__name__)

EXPERIMENTS = ("cost-curves", "path-compare", "random-unitary", "depth-sweep", "param-sweep")
TIME_EVOLUTION = "time-evolution"
HAAR = "haar-random"
RANDOM_CIRCUIT = "random-circuit"

CIRCUIT_ALPHABETS = ("universal", "single-qubit")
DEFAULT_DELTA_BETA = 0.3
LARGE_QUBITS = 7  # STOQ runs above this need allow_large


class ConfigError(ValueError):
    pass


class NumericalError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    preset: Optional[str] = None
    hamiltonian: Optional[str] = None
    qubits: Optional[int] = None
    iterations: int = 10_000
    runs: int = 16
    seed: int = 0
    delta_beta: float = DEFAULT_DELTA_BETA
    p_append: float = 0.5
    insertion: str = END
    removal: str = LAST
    epsilon: float = 0.2
    tau: float = 0.5
    trotter_steps: int = 10
    qdrift_reps: int = 1000
    grid_points: int = DEFAULT_GRID_POINTS
    depths: list = field(default_factory=lambda: [1, 5, 10, 20, 40])
    circuit_alphabet: str = "universal"
    plateau: Optional[float] = None
    plateau_runs: Optional[int] = None
    sweep_delta_betas: list = field(default_factory=lambda: [0.001, 0.01, 0.1, 0.5])
    sweep_p_appends: list = field(default_factory=lambda: [0.2, 0.5, 0.8])
    allow_large: bool = False
    jobs: int = 1
    out: str = "results"

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @property
    def target_kind(self) -> str:
        return {
            "cost-curves": TIME_EVOLUTION,
            "path-compare": TIME_EVOLUTION,
            "random-unitary": HAAR,
            "depth-sweep": RANDOM_CIRCUIT,
            "param-sweep": HAAR,
        }[self.experiment]

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        min_runs = 0 if self.experiment == "path-compare" else 1
        if self.runs < min_runs:
            raise ConfigError(f"runs must be >= {min_runs}")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.target_kind == TIME_EVOLUTION:
            if (self.preset is None) == (self.hamiltonian is None):
                raise ConfigError("give exactly one of preset or hamiltonian")
            if self.preset is not None and self.preset not in PRESETS:
                raise ConfigError(f"unknown preset {self.preset!r}; choose from {sorted(PRESETS)}")
            if self.hamiltonian is not None and not Path(self.hamiltonian).is_file():
                raise ConfigError(f"no such Hamiltonian file {self.hamiltonian!r}")
            if self.tau <= 0 or self.epsilon <= 0:
                raise ConfigError("tau and epsilon must be positive")
        elif self.experiment == "param-sweep":
            if not self.sweep_delta_betas or not self.sweep_p_appends:
                raise ConfigError("parameter sweep grid is empty")
        else:
            if self.qubits is None or self.qubits < 1:
                raise ConfigError("qubits must be given and >= 1")
        if self.experiment == "depth-sweep":
            if not self.depths:
                raise ConfigError("depth list is empty")
            if self.circuit_alphabet not in CIRCUIT_ALPHABETS:
                raise ConfigError(f"circuit_alphabet must be one of {CIRCUIT_ALPHABETS}")
            if any(round(d * self.qubits) < 1 for d in self.depths):
                raise ConfigError("every depth must give at least one gate")
        n = self.num_qubits()
        if n > LARGE_QUBITS and not self.allow_large:
            raise ConfigError(f"{n}-qubit runs are slow; pass allow_large to enable them")
        try:
            for db, pa in self._stoq_settings():
                StoqConfig(self.iterations, db, pa, None, 0, self.insertion, self.removal)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def _stoq_settings(self):
        settings = [(self.delta_beta, self.p_append)]
        if self.experiment == "param-sweep":
            settings += [(db, pa) for db in self.sweep_delta_betas for pa in self.sweep_p_appends]
        return settings

    def num_qubits(self) -> int:
        if self.target_kind == TIME_EVOLUTION:
            return self.load_hamiltonian().n
        if self.experiment == "param-sweep" and self.qubits is None:
            return 3
        return int(self.qubits)

    def load_hamiltonian(self) -> Hamiltonian:
        if self.preset is not None:
            return preset(self.preset)
        return load_hamiltonian(self.hamiltonian)

    def stoq(self, seed: int, delta_beta=None, p_append=None) -> StoqConfig:
        return StoqConfig(
            num_iterations=self.iterations,
            delta_beta=self.delta_beta if delta_beta is None else delta_beta,
            p_append=self.p_append if p_append is None else p_append,
            seed=seed,
            insertion=self.insertion,
            removal=self.removal,
        )


def circuit_alphabet(name: str, n: int) -> GateAlphabet:
    """Alphabet that random target circuits are drawn from."""
    full = universal_alphabet(n)
    if name == "universal":
        return full
    if name == "single-qubit":
        return GateAlphabet(n, [s for s in full.specs if len(s.support) == 1])
    raise ConfigError(f"unknown circuit alphabet {name!r}")


# -- single runs ----------------------------------------------------------------


def run_rngs(seed: int):
    """Independent generators for target construction and for the search."""
    target_ss, search_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(target_ss), np.random.default_rng(search_ss)


def execute_run(cfg: ExperimentConfig, task: dict) -> dict:
    """Run one task in isolation; ``task["index"]`` fixes its seed."""
    index = task["index"]
    seed = cfg.seed + index
    target_rng, search_rng = run_rngs(seed)
    kind = task["kind"]
    start = time.perf_counter()
    out = {"index": index, "seed": seed, "kind": kind}

    if kind in ("trotter", "qdrift"):
        ham = cfg.load_hamiltonian()
        if kind == "trotter":
            seq = randomized_trotter(ham, cfg.tau, cfg.trotter_steps, search_rng)
        else:
            seq = qdrift(ham, cfg.tau, cfg.qdrift_reps, search_rng)
        out["profile"] = path_profile(seq, ham, cfg.tau, cfg.grid_points, kind)
        out["wall_seconds"] = time.perf_counter() - start
        return out

    if cfg.target_kind == TIME_EVOLUTION:
        ham = cfg.load_hamiltonian()
        target = ham.time_evolution(cfg.tau)
        alphabet = hamiltonian_term_alphabet(ham, cfg.epsilon, cfg.tau)
    else:
        n = task.get("qubits", cfg.num_qubits())
        alphabet = universal_alphabet(n)
        if kind == "circuit":
            gen = circuit_alphabet(cfg.circuit_alphabet, n)
            circuit = random_circuit(n, task["depth"], gen, target_rng)
            target = circuit.product()
            out["gates"] = len(circuit)
        else:
            target = haar_random_unitary(2**n, target_rng)

    stoq_cfg = cfg.stoq(seed, task.get("delta_beta"), task.get("p_append"))
    seq, trace = compile(target, alphabet, stoq_cfg, rng=search_rng)
    if not np.isfinite(trace.final_cost):
        raise NumericalError(f"run {index}: non-finite cost")
    out["trace"] = trace
    out["final_cost"] = trace.final_cost
    if kind == "stoq-path":
        out["profile"] = path_profile(seq, ham, cfg.tau, cfg.grid_points, "stoq", target)
    out.update({k: v for k, v in task.items() if k not in out})
    out["wall_seconds"] = time.perf_counter() - start
    return out


def _execute(args):
    cfg, task = args
    out = execute_run(cfg, task)
    # alphabets hold closures and cannot cross process boundaries; the
    # writers only need the per-iteration arrays
    if "trace" in out:
        out["trace"] = replace(out["trace"], sequence=None)
    return out


def run_tasks(cfg: ExperimentConfig, tasks: list[dict]) -> list[dict]:
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(_execute, [(cfg, t) for t in tasks]))
    return [execute_run(cfg, t) for t in tasks]


# -- output -----------------------------------------------------------------------


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.6f}"


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_trace(path: Path, trace) -> None:
    rows = zip(
        trace.iterations,
        map(fmt, trace.beta),
        map(fmt, trace.cost),
        trace.accepted.astype(int),
        trace.length,
    )
    write_csv(path, ["iteration", "beta", "cost", "accepted", "seq_length"], rows)


def write_mean_curve(path: Path, traces) -> np.ndarray:
    # early-stopped runs hold their last cost for the remaining iterations
    length = max(len(t) for t in traces)
    curves = np.array([np.pad(t.cost, (0, length - len(t)), mode="edge") for t in traces])
    mean = curves.mean(axis=0)
    write_csv(path, ["iteration", "mean_cost"], zip(range(1, length + 1), map(fmt, mean)))
    return mean


def write_profile(path: Path, profile) -> None:
    rows = zip(profile.steps, map(fmt, profile.cum_time), map(fmt, profile.distance))
    write_csv(path, ["step", "cum_time", "path_distance"], rows)


def sem(values) -> float:
    """Standard error of the mean with the unbiased sample deviation."""
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return math.nan
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def _manifest(cfg: ExperimentConfig, results, files) -> tuple[dict, dict]:
    """Deterministic manifest for the summary, plus the timing-only part."""
    manifest = {
        "version": __version__,
        "base_seed": cfg.seed,
        "runs": [{"index": r["index"], "seed": r["seed"], "kind": r["kind"]} for r in results],
        "files": sorted(files),
    }
    timing = {
        "version": __version__,
        "wall_seconds": {str(r["index"]): r["wall_seconds"] for r in results},
    }
    return manifest, timing


def _finish(cfg: ExperimentConfig, out: Path, results, files, summary: dict) -> dict:
    manifest, timing = _manifest(cfg, results, files + ["summary.json"])
    summary = {"experiment": cfg.experiment, "config": asdict(cfg), **summary, "manifest": manifest}
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    (out / "timing.json").write_text(json.dumps(timing, indent=2, sort_keys=True) + "\n")
    return summary


def _prepare(cfg: ExperimentConfig) -> Path:
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _trace_summary(cfg, out, results, prefix="trace"):
    files = []
    for r in results:
        name = f"{prefix}_run{r['index']:03d}.csv"
        write_trace(out / name, r["trace"])
        files.append(name)
    write_mean_curve(out / "mean_curve.csv", [r["trace"] for r in results])
    files.append("mean_curve.csv")
    finals = [r["final_cost"] for r in results]
    stats = {
        "final_costs": finals,
        "mean_final_cost": float(np.mean(finals)),
        "min_final_cost": float(np.min(finals)),
        "sem_final_cost": sem(finals),
    }
    return files, stats


# -- experiments ----------------------------------------------------------------


def run_cost_curves(cfg: ExperimentConfig) -> dict:
    out = _prepare(cfg)
    results = run_tasks(cfg, [{"index": i, "kind": "stoq"} for i in range(cfg.runs)])
    files, stats = _trace_summary(cfg, out, results)
    return _finish(cfg, out, results, files, stats)


def run_random_unitary(cfg: ExperimentConfig) -> dict:
    out = _prepare(cfg)
    results = run_tasks(cfg, [{"index": i, "kind": "haar"} for i in range(cfg.runs)])
    files, stats = _trace_summary(cfg, out, results)
    return _finish(cfg, out, results, files, stats)


def run_path_comparison(cfg: ExperimentConfig) -> dict:
    out = _prepare(cfg)
    ham = cfg.load_hamiltonian()
    target = ham.time_evolution(cfg.tau)
    tasks = [{"index": i, "kind": "stoq-path"} for i in range(cfg.runs)]
    tasks += [{"index": cfg.runs, "kind": "trotter"}, {"index": cfg.runs + 1, "kind": "qdrift"}]
    results = run_tasks(cfg, tasks)

    ideal = compilation_stats(ideal_sequence(ham, cfg.tau), ham, cfg.tau, target, cfg.grid_points)
    rows = [["ideal", fmt(ideal.time), "", "", ""]]
    files = []
    stoq_rows = []
    for r in results:
        prof = r["profile"]
        if r["kind"] == "stoq-path":
            label = f"stoq_run{r['index']:03d}"
            stoq_rows.append((prof.total_time, prof.mean, prof.max, prof.final_cost))
        else:
            label = r["kind"]
        name = f"profile_{label}.csv"
        write_profile(out / name, prof)
        files.append(name)
        rows.append([label, fmt(prof.total_time), fmt(prof.mean), fmt(prof.max), fmt(prof.final_cost)])
    if stoq_rows:
        avg = np.mean(np.array(stoq_rows), axis=0)
        rows.append(["stoq", *(fmt(v) for v in avg)])
    write_csv(out / "stats.csv", ["method", "time", "mean_d", "max_d", "cost"], rows)
    files.append("stats.csv")
    summary = {"stats": {row[0]: row[1:] for row in rows}}
    return _finish(cfg, out, results, files, summary)


def exponential_saturation(depth, plateau, scale):
    return plateau * (1.0 - np.exp(-np.asarray(depth, dtype=float) / scale))


def fit_depth_curve(depths, costs, plateau: float) -> dict:
    """Least-squares fit of ``plateau * (1 - exp(-d / scale))`` with ``scale`` free."""
    from scipy.optimize import curve_fit

    depths = np.asarray(depths, dtype=float)
    costs = np.asarray(costs, dtype=float)
    if len(depths) < 2:
        return {"status": "skipped", "reason": "need at least two depths"}
    try:
        (scale,), cov = curve_fit(
            lambda d, s: exponential_saturation(d, plateau, s),
            depths,
            costs,
            p0=[float(np.median(depths))],
            bounds=(1e-9, np.inf),
        )
    except (RuntimeError, ValueError) as exc:
        return {"status": "diverged", "reason": str(exc)}
    resid = costs - exponential_saturation(depths, plateau, scale)
    return {
        "status": "ok",
        "plateau": plateau,
        "scale": float(scale),
        "scale_stderr": float(np.sqrt(cov[0, 0])) if np.isfinite(cov[0, 0]) else None,
        "rss": float(np.sum(resid**2)),
    }


def run_depth_sweep(cfg: ExperimentConfig) -> dict:
    out = _prepare(cfg)
    n = cfg.num_qubits()
    tasks = []
    for depth in cfg.depths:
        for _ in range(cfg.runs):
            tasks.append({"index": len(tasks), "kind": "circuit", "depth": depth})
    plateau_runs = 0
    if cfg.plateau is None:
        plateau_runs = cfg.plateau_runs or cfg.runs
        for _ in range(plateau_runs):
            tasks.append({"index": len(tasks), "kind": "haar"})
    results = run_tasks(cfg, tasks)

    rows, means = [], []
    for depth in cfg.depths:
        finals = [r["final_cost"] for r in results if r["kind"] == "circuit" and r["depth"] == depth]
        gates = round(depth * n)
        m = float(np.mean(finals))
        means.append(m)
        rows.append([fmt(depth), gates, len(finals), fmt(m), fmt(sem(finals))])
    write_csv(out / "depth_sweep.csv", ["depth", "gates", "runs", "mean_cost", "sem"], rows)
    files = ["depth_sweep.csv"]

    if cfg.plateau is None:
        plateau_finals = [r["final_cost"] for r in results if r["kind"] == "haar"]
        plateau = float(np.mean(plateau_finals))
        plateau_sem = sem(plateau_finals)
    else:
        plateau, plateau_sem = float(cfg.plateau), None
    fit = fit_depth_curve(cfg.depths, means, plateau)
    fit.update({"plateau_runs": plateau_runs, "plateau_sem": plateau_sem})
    (out / "fit.json").write_text(json.dumps(fit, indent=2, sort_keys=True) + "\n")
    files.append("fit.json")
    summary = {"depths": list(cfg.depths), "mean_final_cost": means, "plateau": plateau, "fit": fit}
    return _finish(cfg, out, results, files, summary)


def run_param_sweep(cfg: ExperimentConfig) -> dict:
    if cfg.qubits is None:
        cfg.qubits = 3
    out = _prepare(cfg)
    tasks = []
    for db in cfg.sweep_delta_betas:
        for pa in cfg.sweep_p_appends:
            for _ in range(cfg.runs):
                tasks.append({"index": len(tasks), "kind": "haar", "delta_beta": db, "p_append": pa})
    results = run_tasks(cfg, tasks)
    rows, cells = [], []
    for db in cfg.sweep_delta_betas:
        for pa in cfg.sweep_p_appends:
            finals = [r["final_cost"] for r in results if r["delta_beta"] == db and r["p_append"] == pa]
            m = float(np.mean(finals))
            cells.append({"delta_beta": db, "p_append": pa, "runs": len(finals), "mean_cost": m, "sem": sem(finals)})
            rows.append([fmt(db), fmt(pa), len(finals), fmt(m), fmt(sem(finals))])
    write_csv(out / "param_sweep.csv", ["delta_beta", "p_append", "runs", "mean_cost", "sem"], rows)
    return _finish(cfg, out, results, ["param_sweep.csv"], {"cells": cells})


RUNNERS = {
    "cost-curves": run_cost_curves,
    "path-compare": run_path_comparison,
    "random-unitary": run_random_unitary,
    "depth-sweep": run_depth_sweep,
    "param-sweep": run_param_sweep,
}


def run_experiment(cfg: ExperimentConfig) -> dict:
    try:
        runner = RUNNERS[cfg.experiment]
    except KeyError:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}") from None
    log.info("running %s -> %s", cfg.experiment, cfg.out)
    return runner(cfg)
