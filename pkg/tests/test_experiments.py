import csv
import json

import numpy as np
import pytest

from stoq.experiments import (
    ConfigError,
    ExperimentConfig,
    execute_run,
    exponential_saturation,
    fit_depth_curve,
    run_cost_curves,
    run_depth_sweep,
    run_experiment,
    run_param_sweep,
    run_path_comparison,
    run_random_unitary,
    sem,
)
from stoq.hamiltonian import preset, save_hamiltonian


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def cfg(tmp_path, experiment, **kw):
    kw.setdefault("out", str(tmp_path / experiment))
    return ExperimentConfig(experiment=experiment, **kw)


def test_cost_curves_short_trace(tmp_path):
    summary = run_cost_curves(cfg(tmp_path, "cost-curves", preset="ising2", runs=1, iterations=10))
    rows = read_csv(tmp_path / "cost-curves" / "trace_run000.csv")
    assert rows[0] == ["iteration", "beta", "cost", "accepted", "seq_length"]
    assert len(rows) == 11
    assert [r[0] for r in rows[1:]] == [str(i) for i in range(1, 11)]
    assert rows[1][1] == "0.300000"
    mean = read_csv(tmp_path / "cost-curves" / "mean_curve.csv")
    assert mean[0] == ["iteration", "mean_cost"] and len(mean) == 11
    assert summary["manifest"]["runs"] == [{"index": 0, "kind": "stoq", "seed": 0}]


def test_summary_mean_is_plain_mean(tmp_path):
    summary = run_cost_curves(cfg(tmp_path, "cost-curves", preset="ising2", runs=4, iterations=300, seed=7))
    finals = summary["final_costs"]
    assert len(finals) == 4
    assert summary["mean_final_cost"] == pytest.approx(sum(finals) / 4, abs=1e-12)
    assert [r["seed"] for r in summary["manifest"]["runs"]] == [7, 8, 9, 10]
    on_disk = json.loads((tmp_path / "cost-curves" / "summary.json").read_text())
    assert on_disk["config"]["preset"] == "ising2"
    assert "wall_seconds" in json.loads((tmp_path / "cost-curves" / "timing.json").read_text())


def test_single_run_reproduced_standalone(tmp_path):
    c = cfg(tmp_path, "random-unitary", qubits=2, runs=3, iterations=400, seed=20)
    summary = run_random_unitary(c)
    alone = execute_run(c, {"index": 2, "kind": "haar"})
    assert alone["seed"] == 22
    assert alone["final_cost"] == summary["final_costs"][2]


def test_path_compare_rows(tmp_path):
    run_path_comparison(cfg(tmp_path, "path-compare", preset="ising3", runs=2, iterations=500))
    rows = read_csv(tmp_path / "path-compare" / "stats.csv")
    assert rows[0] == ["method", "time", "mean_d", "max_d", "cost"]
    assert rows[1] == ["ideal", "0.500000", "", "", ""]
    methods = [r[0] for r in rows[1:]]
    assert methods == ["ideal", "stoq_run000", "stoq_run001", "trotter", "qdrift", "stoq"]
    trotter = dict(zip(rows[0], rows[methods.index("trotter") + 1]))
    assert trotter["time"] == "2.500000"
    qd = dict(zip(rows[0], rows[methods.index("qdrift") + 1]))
    assert float(qd["time"]) == pytest.approx(0.5 * preset("ising3").lambda_norm(), abs=1e-6)
    prof = read_csv(tmp_path / "path-compare" / "profile_trotter.csv")
    assert prof[0] == ["step", "cum_time", "path_distance"]
    assert len(prof) == 1 + 50


def test_path_compare_without_stoq(tmp_path):
    run_path_comparison(cfg(tmp_path, "path-compare", preset="ising2", runs=0))
    rows = read_csv(tmp_path / "path-compare" / "stats.csv")
    assert [r[0] for r in rows[1:]] == ["ideal", "trotter", "qdrift"]


def test_hamiltonian_file_input(tmp_path):
    path = tmp_path / "h.txt"
    save_hamiltonian(preset("ising2"), path)
    summary = run_cost_curves(cfg(tmp_path, "cost-curves", hamiltonian=str(path), runs=1, iterations=50))
    assert len(summary["final_costs"]) == 1


def test_depth_sweep_single_depth(tmp_path):
    summary = run_depth_sweep(cfg(tmp_path, "depth-sweep", qubits=2, depths=[1], runs=2, iterations=200))
    assert summary["fit"]["status"] == "skipped"
    rows = read_csv(tmp_path / "depth-sweep" / "depth_sweep.csv")
    assert rows[0] == ["depth", "gates", "runs", "mean_cost", "sem"]
    assert rows[1][:3] == ["1.000000", "2", "2"]
    assert (tmp_path / "depth-sweep" / "fit.json").exists()


def test_depth_sweep_fixed_plateau(tmp_path):
    c = cfg(tmp_path, "depth-sweep", qubits=2, depths=[1, 4], runs=2, iterations=200, plateau=0.3,
            circuit_alphabet="single-qubit")
    summary = run_depth_sweep(c)
    assert summary["plateau"] == 0.3
    assert summary["fit"]["plateau_runs"] == 0
    assert len(summary["manifest"]["runs"]) == 4


def test_param_sweep_single_cell(tmp_path):
    c = cfg(tmp_path, "param-sweep", sweep_delta_betas=[0.1], sweep_p_appends=[0.5], runs=2, iterations=100)
    summary = run_param_sweep(c)
    rows = read_csv(tmp_path / "param-sweep" / "param_sweep.csv")
    assert len(rows) == 2
    assert rows[1][:3] == ["0.100000", "0.500000", "2"]
    assert summary["cells"][0]["runs"] == 2


@pytest.mark.parametrize(
    "experiment, kw",
    [
        ("cost-curves", {"preset": "ising2", "runs": 2, "iterations": 200}),
        ("path-compare", {"preset": "ising2", "runs": 1, "iterations": 200}),
        ("random-unitary", {"qubits": 2, "runs": 2, "iterations": 200}),
        ("depth-sweep", {"qubits": 2, "depths": [1, 3], "runs": 2, "iterations": 200}),
        ("param-sweep", {"sweep_delta_betas": [0.1], "sweep_p_appends": [0.2, 0.8], "runs": 2, "iterations": 100}),
    ],
)
def test_rerun_is_byte_identical(experiment, kw, tmp_path):
    outputs = []
    for name, jobs in (("a", 1), ("b", 1), ("c", 2)):
        out = tmp_path / name
        run_experiment(ExperimentConfig(experiment=experiment, out=str(out), jobs=jobs, **kw))
        outputs.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
    assert outputs[0] and outputs[0] == outputs[1] == outputs[2]


@pytest.mark.parametrize(
    "experiment, kw",
    [
        ("cost-curves", {"preset": "ising9"}),
        ("cost-curves", {}),
        ("cost-curves", {"preset": "ising2", "hamiltonian": "h.txt"}),
        ("cost-curves", {"hamiltonian": "/no/such/file"}),
        ("random-unitary", {"qubits": 2, "iterations": 0}),
        ("random-unitary", {"qubits": 2, "runs": 0}),
        ("random-unitary", {}),
        ("random-unitary", {"qubits": 8}),
        ("cost-curves", {"preset": "ising8"}),
        ("random-unitary", {"qubits": 2, "delta_beta": -1}),
        ("depth-sweep", {"qubits": 2, "depths": []}),
        ("depth-sweep", {"qubits": 2, "depths": [0.1]}),
        ("depth-sweep", {"qubits": 2, "circuit_alphabet": "clifford"}),
        ("param-sweep", {"sweep_p_appends": []}),
        ("bogus", {}),
    ],
)
def test_config_rejected(experiment, kw, tmp_path):
    with pytest.raises(ConfigError):
        run_experiment(cfg(tmp_path, experiment, **kw))


def test_from_dict_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": "cost-curves", "temperature": 3})


def test_fit_recovers_scale():
    depths = np.array([1, 5, 10, 20, 40])
    costs = exponential_saturation(depths, 0.8, 7.5)
    fit = fit_depth_curve(depths, costs, 0.8)
    assert fit["status"] == "ok"
    assert fit["scale"] == pytest.approx(7.5, rel=1e-6)
    assert fit["rss"] == pytest.approx(0, abs=1e-12)


def test_fit_reports_failure_without_raising():
    fit = fit_depth_curve([1, 2], [float("nan"), 0.5], 0.8)
    assert fit["status"] == "diverged"


def test_sem_uses_sample_deviation():
    assert sem([1.0, 2.0, 3.0, 4.0]) == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    assert np.isnan(sem([1.0]))
