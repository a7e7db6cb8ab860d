import json

import numpy as np
import pytest

from lpv_loewner.cli import main
from lpv_loewner.benchmark import benchmark_scheme, benchmark_system
from lpv_loewner.pencil import ReducedLpv
from lpv_loewner.system import LpvSsa
from lpv_loewner.transfer import SampleSet


def dump(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        "system": dump(tmp_path / "system.json", benchmark_system().to_dict()),
        "scheme": dump(tmp_path / "scheme.json", benchmark_scheme().to_dict()),
        "out": str(tmp_path / "out"),
    }


def load(path):
    with open(path) as fh:
        return json.load(fh)


def test_sample_writes_complete_set(files, tmp_path):
    target = tmp_path / "samples.json"
    assert main(["sample", "--system", files["system"], "--scheme", files["scheme"], "-o", str(target)]) == 0
    samples = SampleSet.from_list(load(target))
    assert len(samples) == 24
    first = target.read_bytes()
    assert main(["sample", "--system", files["system"], "--scheme", files["scheme"], "-o", str(target)]) == 0
    assert target.read_bytes() == first


def test_sample_N0_scheme(files, tmp_path):
    scheme = dump(tmp_path / "n0.json", {"mu": [[0, 1]], "lambda": [[0, 2]], "q_left": [], "q_right": []})
    assert main(["sample", "--system", files["system"], "--scheme", scheme, "--out", files["out"]]) == 0
    docs = load(tmp_path / "out" / "samples.json")
    assert sorted(len(d["word"]) for d in docs) == [0, 0, 1, 1]


def test_sample_disjointness_violation(files, tmp_path, capsys):
    bad = dump(tmp_path / "bad.json", {"mu": [[0, 2]], "lambda": [[0, 2]], "q_left": [], "q_right": []})
    assert main(["sample", "--system", files["system"], "--scheme", bad]) == 2
    assert "points must be disjoint" in capsys.readouterr().err


def test_missing_input_file(files, capsys):
    assert main(["sample", "--system", "/nonexistent.json", "--scheme", files["scheme"]]) == 2
    assert "not found" in capsys.readouterr().err


def test_sample_evaluation_failure(tmp_path, capsys):
    sys = dump(tmp_path / "s.json", LpvSsa([[[-1.0, 0.0], [0.0, -2.0]], [[1.0, 0.0], [0.0, 1.0]]],
                                           [1.0, 1.0], [1.0, 1.0]).to_dict())
    scheme = dump(tmp_path / "sc.json", {"mu": [-1.0], "lambda": [1.0], "q_left": [], "q_right": []})
    assert main(["sample", "--system", sys, "--scheme", scheme, "--out", str(tmp_path)]) == 3
    assert "failed" in capsys.readouterr().err


def test_usage_error_exit_code():
    assert main(["no-such-command"]) == 2


def test_reduce_full_order_strict(files):
    code = main(["reduce", "--system", files["system"], "--scheme", files["scheme"], "--orders", "1,2,3",
                 "--strict", "--out", files["out"]])
    assert code == 0
    report = load(f"{files['out']}/verification.json")
    full = report["orders"]["3"]
    assert full["passed"] and full["max_residual"] < 1e-9
    assert full["tol"] == 1e-9 and report["orders"]["2"]["tol"] is None
    model = ReducedLpv.from_dict(load(f"{files['out']}/model_r3.json"))
    assert model.n_x == 3 and model.provenance["mode"] == "data-driven"


def test_reduce_from_sample_file(files, tmp_path):
    samples = str(tmp_path / "samples.json")
    assert main(["sample", "--system", files["system"], "--scheme", files["scheme"], "-o", samples]) == 0
    assert main(["reduce", "--samples", samples, "--scheme", files["scheme"], "--strict",
                 "--out", files["out"]]) == 0
    assert load(f"{files['out']}/verification.json")["orders"]["3"]["passed"]


def test_reduce_order_too_large(files, capsys):
    assert main(["reduce", "--system", files["system"], "--scheme", files["scheme"], "--orders", "4"]) == 2
    assert "exceeds N+1" in capsys.readouterr().err


def test_reduce_reports_missing_sample(files, tmp_path, capsys):
    samples = tmp_path / "samples.json"
    assert main(["sample", "--system", files["system"], "--scheme", files["scheme"], "-o", str(samples)]) == 0
    docs = load(samples)
    gone = docs.pop(5)
    samples.write_text(json.dumps(docs))
    assert main(["reduce", "--samples", str(samples), "--scheme", files["scheme"], "--n-p", "2",
                 "--out", files["out"]]) == 3
    err = capsys.readouterr().err
    assert f"word={gone['word']}" in err


def test_reduce_singular_pencil(tmp_path, capsys):
    # one state cannot support a two-dimensional pencil
    sys = dump(tmp_path / "s.json", LpvSsa([[[-1.0]], [[2.0]]], [1.0], [1.0]).to_dict())
    scheme = dump(tmp_path / "sc.json", {"mu": [0, 1], "lambda": [2, 3], "q_left": [1], "q_right": [1]})
    assert main(["reduce", "--system", sys, "--scheme", scheme, "--mode", "intrusive",
                 "--out", str(tmp_path)]) == 4
    assert "singular" in capsys.readouterr().err


def test_strict_verification_failure(files, tmp_path):
    # a sample set from a different system makes the full-order check fail
    other = LpvSsa([benchmark_system().A[0] * 1.1, *benchmark_system().A[1:]], benchmark_system().B, benchmark_system().C)
    samples = str(tmp_path / "samples.json")
    other_path = dump(tmp_path / "other.json", other.to_dict())
    assert main(["sample", "--system", other_path, "--scheme", files["scheme"], "-o", samples]) == 0
    config = dump(tmp_path / "conf.json", {"system": "system.json", "samples": "samples.json",
                                           "scheme": "scheme.json"})
    assert main(["reduce", "--config", config, "--out", files["out"]]) == 0
    assert main(["reduce", "--config", config, "--strict", "--out", files["out"]]) == 5


def test_simulate_benchmark_system(files):
    code = main(["simulate", "--system", files["system"], "--scheme", files["scheme"], "--orders", "1,2,3",
                 "--steps", "5000", "--out", files["out"]])
    assert code == 0
    summary = load(f"{files['out']}/simulation_summary.json")
    assert summary["max_rel"]["3"] <= 1e-8
    assert summary["max_rel"]["3"] < summary["max_rel"]["2"] <= summary["max_rel"]["1"]
    data = np.loadtxt(f"{files['out']}/simulation.csv", delimiter=",", skiprows=1)
    assert data.shape == (5001, 8)
    assert np.max(data[:, 7]) <= 1e-8


def test_simulate_with_model_files(files):
    assert main(["reduce", "--system", files["system"], "--scheme", files["scheme"], "--orders", "2",
                 "--out", files["out"]]) == 0
    assert main(["simulate", "--system", files["system"], "--models", f"{files['out']}/model_r2.json",
                 "--steps", "2000", "--out", files["out"]]) == 0
    assert "2" in load(f"{files['out']}/simulation_summary.json")["max_rel"]


def test_simulate_zero_input(files, tmp_path):
    config = dump(tmp_path / "conf.json", {
        "system": "system.json", "scheme": "scheme.json",
        "simulation": {"u": {"kind": "constant", "a": 0.0}, "steps": 500,
                       "p": [{"kind": "sine", "a": 1.0, "omega": 2.0}, {"kind": "constant", "a": 0.5}]},
    })
    assert main(["simulate", "--config", config, "--out", files["out"]]) == 0
    data = np.loadtxt(f"{files['out']}/simulation.csv", delimiter=",", skiprows=1)
    assert np.all(data[:, 1:] == 0)


def test_simulate_signal_count_mismatch(files, tmp_path):
    config = dump(tmp_path / "conf.json", {"system": "system.json", "scheme": "scheme.json",
                                           "simulation": {"p": [{"kind": "constant", "a": 1.0}]}})
    assert main(["simulate", "--config", config, "--out", files["out"]]) == 2


def test_simulate_divergence(tmp_path, capsys):
    unstable = LpvSsa([[[1e200]]], [1.0], [1.0]).to_dict()
    sys = dump(tmp_path / "s.json", unstable)
    model = dump(tmp_path / "m.json", unstable)
    config = dump(tmp_path / "conf.json", {"simulation": {"p": [], "steps": 100, "t_end": 1.0,
                                                          "u": {"kind": "constant", "a": 1.0}}})
    assert main(["simulate", "--config", config, "--system", sys, "--models", model,
                 "--out", str(tmp_path)]) == 6
    assert "step" in capsys.readouterr().err


def test_paper_command(tmp_path):
    out = str(tmp_path / "paper")
    assert main(["paper", "--steps", "5000", "--out", out]) == 0
    summary = load(f"{out}/summary.json")
    assert summary["max_rel"]["3"] <= 1e-8
    assert summary["max_rel"]["3"] < summary["max_rel"]["2"] <= summary["max_rel"]["1"]
    assert summary["verification_passed"]


def test_paper_command_deterministic(tmp_path):
    for d in ("a", "b"):
        assert main(["paper", "--steps", "2000", "--out", str(tmp_path / d)]) == 0
    for name in ("simulation.csv", "outputs.csv", "errors.csv", "summary.json", "verification.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_paper_command_word_override(tmp_path):
    out = str(tmp_path / "w")
    assert main(["paper", "--q-left", "2,1", "--q-right", "2,1", "--out", out]) == 0
    assert load(f"{out}/summary.json")["max_rel"]["3"] <= 1e-8


def test_global_flags_after_subcommand(tmp_path):
    out = str(tmp_path / "late")
    assert main(["paper", "--steps", "1000", "--out", out, "--tol-interp", "1e-8"]) == 0
    assert load(f"{out}/verification.json")["tol"] == 1e-8


def test_env_overrides_config(tmp_path, monkeypatch):
    config = dump(tmp_path / "conf.json", {"out": str(tmp_path / "from_config"), "tolerances": {"interp": 1e-7}})
    monkeypatch.setenv("LPV_LOEWNER_OUT", str(tmp_path / "from_env"))
    assert main(["--config", config, "paper", "--steps", "1000"]) == 0
    assert load(tmp_path / "from_env" / "verification.json")["tol"] == 1e-7
    assert not (tmp_path / "from_config").exists()
    assert main(["--config", config, "--out", str(tmp_path / "from_flag"), "paper", "--steps", "1000"]) == 0
    assert (tmp_path / "from_flag" / "summary.json").exists()


def test_bad_env_value(monkeypatch):
    monkeypatch.setenv("LPV_LOEWNER_TOL_INTERP", "tight")
    assert main(["paper", "--steps", "100"]) == 2


def test_lti_random_order(tmp_path):
    out = str(tmp_path / "lti")
    assert main(["lti", "--random-order", "5", "--seed", "3", "--out", out]) == 0
    report = load(f"{out}/lti_report.json")
    assert report["rank"]["n"] == 5 and report["order"] == 5
    assert max(report["left_residuals"] + report["right_residuals"]) < 1e-9
    assert main(["lti", "--data", f"{out}/lti_data.json", "--order", "3", "--out", out]) == 0
    assert load(f"{out}/lti_report.json")["order"] == 3


def test_lti_needs_input():
    assert main(["lti"]) == 2


def test_system_round_trip(tmp_path):
    sys = benchmark_system()
    path = dump(tmp_path / "s.json", sys.to_dict())
    assert LpvSsa.from_dict(load(path)) == sys


def test_system_with_nonzero_D_rejected(tmp_path, files):
    doc = benchmark_system().to_dict()
    doc["D"] = [[1.0]]
    sys = dump(tmp_path / "d.json", doc)
    assert main(["sample", "--system", sys, "--scheme", files["scheme"]]) == 2
