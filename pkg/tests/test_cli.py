import csv
import io
import json
import math
from pathlib import Path

import pytest

from sme_correlate.cli.parsing import parse_grid, parse_request, parse_sharp, parse_window
from sme_correlate.errors import UsageError
from sme_correlate.main import main

MODEL_FILES = Path(__file__).resolve().parent.parent / "model_files"


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def _error(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_correlate_sharp_mean(capsys):
    code = main(["correlate", "--model", str(MODEL_FILES / "decay.json"), "--sharp", "d0@1.0"])
    assert code == 0
    (row,) = _rows(capsys.readouterr().out)
    assert row["method"] == "SharpInsertion"
    assert row["order"] == "1"
    assert float(row["value"]) == pytest.approx(0.05 + 0.8 * math.exp(-1.0), abs=1e-9)


def test_correlate_noise_windows(capsys):
    argv = ["correlate", "--model", str(MODEL_FILES / "noise.json"), "--window", "d0:0,1", "--window", "d0:0.5,1.5"]
    assert main(argv) == 0
    (row,) = _rows(capsys.readouterr().out)
    assert float(row["value"]) == pytest.approx(0.5, abs=1e-10)
    assert row["segments"] == "3"


def test_correlate_unit_normalization(capsys):
    argv = ["correlate", "--zoo", "qubit_homodyne_z", "--sharp", "d0@0.5", "--normalization", "unit"]
    assert main(argv) == 0
    (row,) = _rows(capsys.readouterr().out)
    # eta = 1, so the rescale leaves the value unchanged
    assert float(row["value"]) == pytest.approx(-2.0, abs=1e-10)


def test_correlate_writes_out_file(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["correlate", "--zoo", "pure_noise", "--window", "d0:0,1", "--out", str(out)]) == 0
    assert str(out) in capsys.readouterr().out
    assert _rows(out.read_text())[0]["request_id"] == "r0"


def test_missing_model_file_is_reported(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert main(["correlate", "--model", str(missing), "--sharp", "d0@1"]) == 1
    record = _error(capsys)
    assert record["module"] == "model"
    assert str(missing) in record["message"]


def test_unknown_detector_is_reported(capsys):
    assert main(["correlate", "--zoo", "decay_photodetect", "--sharp", "dx@1"]) == 1
    assert _error(capsys)["error"] == "AnalyticError"


def _model_file(tmp_path, hamiltonian=((0, 0), (0, 0)), operator=((0, 0), (0, 0)), theta=0.0):
    path = tmp_path / "model.json"
    path.write_text(
        json.dumps(
            {
                "dim": 2,
                "hamiltonian": hamiltonian,
                "detectors": [{"label": "d0", "kind": "jump", "operator": operator, "theta": theta}],
                "initial_state": {"basis": 0},
            }
        )
    )
    return str(path)


@pytest.mark.parametrize(
    "fields",
    [
        {"hamiltonian": [[0, 0], [0]]},
        {"hamiltonian": [[0, ["a", 0]], [0, 0]]},
        {"operator": {"product": 3}},
        {"operator": {"sum": {"op": "sigma_minus"}}},
    ],
)
def test_malformed_operators_are_reported(tmp_path, capsys, fields):
    path = _model_file(tmp_path, **fields)
    assert main(["correlate", "--model", path, "--sharp", "d0@1"]) == 1
    record = _error(capsys)
    assert record["module"] == "model"
    assert record["error"] == "ModelError"


def test_overflowing_value_is_reported(tmp_path, capsys):
    path = _model_file(tmp_path, theta=1e150)
    assert main(["correlate", "--model", path, "--sharp", "d0@0.2", "--sharp", "d0@0.5"]) == 0
    capsys.readouterr()
    assert main(["correlate", "--model", path, "--sharp", "d0@0.2", "--sharp", "d0@0.5", "--sharp", "d0@1"]) == 1
    record = _error(capsys)
    assert record["error"] == "AnalyticError"
    assert record["detail"]["order"] == 3


@pytest.mark.parametrize(
    "command",
    [
        ["correlate", "--zoo", "pure_noise", "--window", "d0:0,1"],
        ["compare", "--zoo", "pure_noise", "--grid", "0.1,1", "--n-traj", "5", "--window", "d0:0,1", "--z-threshold", "100"],
    ],
)
def test_unwritable_out_file_is_reported(tmp_path, capsys, command):
    out = tmp_path / "missing" / "result.txt"
    assert main(command + ["--out", str(out)]) == 1
    record = _error(capsys)
    assert record["error"] == "OutputError"
    assert record["module"] == "output"
    assert record["detail"]["path"] == str(out)


def test_unwritable_record_dir_is_reported(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    argv = ["simulate", "--zoo", "pure_noise", "--grid", "0.1,1", "--out", str(blocker / "records")]
    assert main(argv) == 1
    assert _error(capsys)["detail"]["path"] == str(blocker / "records")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["correlate", "--sharp", "d0@1"],
        ["correlate", "--zoo", "pure_noise"],
        ["correlate", "--zoo", "pure_noise", "--sharp", "d0@1", "--window", "d0:0,1"],
        ["correlate", "--zoo", "pure_noise", "--model", "x.json", "--sharp", "d0@1"],
        ["correlate", "--zoo", "pure_noise", "--sharp", "d0"],
        ["correlate", "--zoo", "pure_noise", "--sharp", "d0@1", "--log-level", "chatty"],
        ["simulate", "--zoo", "pure_noise"],
        ["compare", "--zoo", "pure_noise", "--grid", "0.1,1", "--n-traj", "1", "--window", "d0:0,1"],
        ["compare", "--zoo", "pure_noise", "--grid", "0.1,1"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert _error(capsys)["module"] == "cli"


def test_dump_and_replay_config(tmp_path, capsys):
    argv = ["correlate", "--zoo", "pure_noise", "--window", "d0:0,1", "--window", "d0:0.5,1.5", "--dump-config"]
    assert main(argv) == 0
    dumped = capsys.readouterr().out
    assert json.loads(dumped)["command"] == "correlate"
    path = tmp_path / "run.json"
    path.write_text(dumped)

    assert main(["correlate", "--config", str(path)]) == 0
    (row,) = _rows(capsys.readouterr().out)
    assert float(row["value"]) == pytest.approx(0.5, abs=1e-10)

    assert main(["simulate", "--config", str(path)]) == 2
    assert main(["correlate", "--config", str(tmp_path / "missing.json")]) == 2


def test_simulate_writes_records(tmp_path, capsys):
    out = tmp_path / "records"
    argv = ["simulate", "--model", str(MODEL_FILES / "decay_no_dark.json"), "--grid", "0.01,3", "--n-traj", "5"]
    assert main(argv + ["--seed", "3", "--out", str(out)]) == 0
    files = sorted(out.glob("trajectory_*.csv"))
    assert len(files) == 5
    for f in files:
        rows = _rows(f.read_text())
        assert len(rows) == 300
        # a single emitter without dark counts clicks at most once
        assert sum(float(r["increment"]) for r in rows) <= 1
    assert "5 record file(s)" in capsys.readouterr().out


def test_simulate_is_reproducible(tmp_path):
    for name in ("a", "b"):
        argv = ["simulate", "--zoo", "mixed_two_detector", "--grid", "0.01,0.2", "--n-traj", "2", "--out"]
        assert main(argv + [str(tmp_path / name), "--seed", "8"]) == 0
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


@pytest.mark.slow
def test_compare_passes_and_corruption_fails(tmp_path, capsys):
    base = ["compare", "--model", str(MODEL_FILES / "decay.json"), "--grid", "0.005,1", "--n-traj", "2000"]
    base += ["--window", "d0:0,1", "--seed", "5"]
    out = tmp_path / "report.json"
    assert main(base + ["--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["all_passed"] is True
    assert report["outcomes"][0]["id"] == "req0"
    assert "1/1 passed" in capsys.readouterr().err

    assert main(base + ["--corrupt-analytic-eta", "0.5"]) == 3
    report = json.loads(capsys.readouterr().out)
    assert report["all_passed"] is False
    assert abs(report["outcomes"][0]["z"]) > 5


def test_compare_requests(capsys):
    argv = ["compare", "--zoo", "pure_noise", "--grid", "0.1,1", "--n-traj", "20", "--z-threshold", "100"]
    argv += ["--request", "overlap=d0:0,1;d0:0.5,1.5", "--request", "d0:0,0.5"]
    assert main(argv) == 0
    report = json.loads(capsys.readouterr().out)
    assert [o["id"] for o in report["outcomes"]] == ["overlap", "req1"]
    # the grid is stretched to cover every window
    assert report["t_end"] == pytest.approx(1.5)


def test_parsers():
    assert parse_sharp("d0@1.5").time == 1.5
    assert parse_sharp("a@b@2").detector == "a@b"
    w = parse_window("d1:0.5,2")
    assert (w.detector, w.support) == ("d1", (0.5, 2.0))
    grid = parse_grid("1e-3,3")
    assert (grid.dt, grid.t_end) == (1e-3, 3.0)
    req = parse_request("d0:0,1;d0:1,2", "fallback")
    assert req.id == "fallback" and len(req.windows) == 2
    for bad in ("d0", "d0@x"):
        with pytest.raises(UsageError):
            parse_sharp(bad)
    for bad in ("d0:1", "d0:2,1", ":0,1"):
        with pytest.raises(UsageError):
            parse_window(bad)
    for bad in ("1", "0,1", "x,1"):
        with pytest.raises(UsageError):
            parse_grid(bad)
    with pytest.raises(UsageError):
        parse_request("id=", "x")
