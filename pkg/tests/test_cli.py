import json
import os
import subprocess
import sys

import numpy as np
import pytest

import odelearn as od
from odelearn.cli import main


@pytest.fixture(scope="module")
def short_csv(tmp_path_factory):
    ts = od.standard_dataset("oscillator").window(41)
    p = tmp_path_factory.mktemp("cli") / "short.csv"
    od.write_timeseries_csv(ts, str(p))
    return str(p)


@pytest.fixture(scope="module")
def trained(short_csv, tmp_path_factory):
    out = str(tmp_path_factory.mktemp("cli") / "model")
    code = main(
        ["train", "--data", short_csv, "--out", out, "--iters", "5",
         "--neurons", "8", "--log-every", "5"]
    )
    assert code == 0
    return out


def test_generate_matches_library_dataset(tmp_path, capsys, osc_data):
    out = str(tmp_path / "gen")
    assert main(["generate", "oscillator", "--out", out]) == 0
    printed = capsys.readouterr().out.strip()
    assert printed == os.path.join(out, "data.csv")
    assert od.read_timeseries_csv(printed) == osc_data
    cfg = json.loads(open(os.path.join(out, "config.json")).read())
    assert cfg["command"] == "generate"
    assert cfg["n_samples"] == [2501]


def test_generate_subsample_and_noise(tmp_path, capsys, osc_data):
    out = str(tmp_path / "gen")
    code = main(
        ["generate", "oscillator", "--dt-subsample", "10", "--noise", "1%",
         "--seed", "4", "--out", out]
    )
    assert code == 0
    capsys.readouterr()
    data = od.read_timeseries_csv(os.path.join(out, "data.csv"))
    clean = osc_data.subsample(10)
    assert data.n_samples == 251 and data.dt == pytest.approx(0.1)
    assert data != clean, "requested noise must actually be applied"
    assert data == od.add_noise(clean, 0.01, od.derive_seed(4, 0))
    cfg = json.loads(open(os.path.join(out, "config.json")).read())
    assert cfg["noise"] == pytest.approx(0.01)


def test_train_reports_loss_and_saves_model(short_csv, trained, capsys):
    model = od.load_model(os.path.join(trained, "model.json"))
    assert model.layer_dims == (2, 8, 2)
    assert os.path.exists(os.path.join(trained, "train_log.csv"))
    cfg = json.loads(open(os.path.join(trained, "config.json")).read())
    assert cfg["command"] == "train"
    assert cfg["n_params"] == 42
    assert cfg["final_loss"] > 0


def test_train_stdout_is_json(short_csv, tmp_path, capsys):
    out = str(tmp_path / "t")
    assert main(
        ["train", "--data", short_csv, "--out", out, "--iters", "3", "--neurons", "4"]
    ) == 0
    doc = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert doc["iterations"] == 3
    assert doc["final_loss"] > 0


def test_rollout_and_eval_chain(short_csv, trained, tmp_path, capsys):
    model_path = os.path.join(trained, "model.json")
    rout = str(tmp_path / "roll")
    assert main(
        ["rollout", "--model", model_path, "--data", short_csv,
         "--substeps", "1", "--out", rout]
    ) == 0
    rollout_path = capsys.readouterr().out.strip()
    pred = od.read_timeseries_csv(rollout_path)
    exact = od.read_timeseries_csv(short_csv)
    assert pred.n_samples == exact.n_samples and pred.dt == exact.dt
    assert np.array_equal(pred.states[0], exact.states[0])

    eout = str(tmp_path / "ev")
    assert main(
        ["eval", "--model", model_path, "--data", short_csv,
         "--substeps", "1", "--out", eout]
    ) == 0
    doc = json.loads(capsys.readouterr().out.strip())
    assert set(doc) == {"x1", "x2"}
    expected = od.component_errors(pred, exact)
    assert doc["x1"] == expected[0] and doc["x2"] == expected[1]
    rows = open(os.path.join(eout, "errors.csv")).read().splitlines()
    assert rows[0] == "component,relative_l2_error"
    assert float(rows[1].split(",")[1]) == doc["x1"]


def test_eval_without_out_dir(short_csv, trained, capsys):
    model_path = os.path.join(trained, "model.json")
    assert main(["eval", "--model", model_path, "--data", short_csv, "--substeps", "1"]) == 0
    doc = json.loads(capsys.readouterr().out.strip())
    assert doc["x1"] >= 0


def test_missing_file_gives_json_error(tmp_path, capsys):
    out = str(tmp_path / "x")
    code = main(["train", "--data", str(tmp_path / "nope.csv"), "--out", out])
    assert code == 1
    err_lines = capsys.readouterr().err.strip().splitlines()
    assert len(err_lines) == 1
    doc = json.loads(err_lines[0])
    assert doc["error"] == "FileNotFoundError"
    assert "nope.csv" in doc["message"]


def test_domain_errors_become_json(short_csv, tmp_path, capsys):
    out = str(tmp_path / "x")
    code = main(
        ["train", "--data", short_csv, "--out", out, "--iters", "0", "--neurons", "4"]
    )
    assert code == 1
    doc = json.loads(capsys.readouterr().err.strip())
    assert doc["error"] == "ValueError"

    code = main(["eval", "--model", short_csv, "--data", short_csv])
    assert code == 1
    doc = json.loads(capsys.readouterr().err.strip())
    assert doc["error"] == "ParseError"


def test_bad_arguments_exit_with_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["generate", "heat_equation", "--out", "/tmp/x"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["sweep", "everything", "--out", "/tmp/x"])
    with pytest.raises(SystemExit):
        main([])
    capsys.readouterr()


@pytest.mark.filterwarnings("ignore:.*overparameterized")
def test_sweep_cli_summary(short_csv, tmp_path, capsys):
    """Tiny data under the default width rightly warns; the sweep still runs."""
    out = str(tmp_path / "sw")
    code = main(
        ["sweep", "scheme", "--benchmark", short_csv, "--iters", "3", "--out", out]
    )
    assert code == 0
    doc = json.loads(capsys.readouterr().out.strip())
    assert set(doc) == {"x1", "x2"}
    for comp in doc.values():
        assert comp["failed_cells"] == 0
        assert 0 <= comp["min_error"] <= comp["max_error"]
    assert os.path.exists(os.path.join(out, "errors_x1.csv"))


def test_study_cli_on_csv(tmp_path, capsys):
    wake = od.cylinder_surrogate_dataset(dt=0.02, t_end=2.0)
    p = tmp_path / "wake.csv"
    od.write_timeseries_csv(wake, str(p))
    out = str(tmp_path / "study")
    code = main(
        ["study", "cylinder", "--data", str(p), "--iters", "10", "--out", out]
    )
    assert code == 0
    doc = json.loads(capsys.readouterr().out.strip())
    assert "terminal_orbit_drift" in doc
    assert len(doc["errors"]) == 3
    assert os.path.exists(os.path.join(out, "metrics.json"))


def test_console_script_end_to_end(short_csv, trained, tmp_path):
    model_path = os.path.join(trained, "model.json")
    ok = subprocess.run(
        ["odelearn", "eval", "--model", model_path, "--data", short_csv, "--substeps", "1"],
        capture_output=True, text=True,
    )
    assert ok.returncode == 0, ok.stderr
    doc = json.loads(ok.stdout.strip())
    assert set(doc) == {"x1", "x2"}

    bad = subprocess.run(
        ["odelearn", "eval", "--model", str(tmp_path / "no.json"), "--data", short_csv],
        capture_output=True, text=True,
    )
    assert bad.returncode == 1
    err = json.loads(bad.stderr.strip())
    assert err["error"] == "FileNotFoundError"
