import json
import subprocess
import sys

import numpy as np
import pytest

from kglab.fieldio import read_field
from kglab.harness.cli import EXIT_CONFIG, EXIT_ESTIMATE, EXIT_OK, EXIT_RUNTIME, main

BASE = {
    "estimate": "WL2_HOMO",
    "grid": {"n": 3, "L": 8.0, "N": 16},
    "time": {"T": 1.0, "dt": 0.125},
    "potential": {"family": "InverseSquare", "a": 0.05},
    "data": {"kind": "packets", "centers": [[0, 0, 0]], "widths": [1.0], "carriers": [[0, 0, 0]]},
    "solver": {"tol": 1e-10, "max_iter": 60},
}


@pytest.fixture
def config(tmp_path):
    def write(**over):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"scenario": {**BASE, **over}}))
        return str(path)

    return write


def test_check_passes_and_writes(config, tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["check", "WL2_HOMO", "--config", config(), "--out", str(out)]) == EXIT_OK
    assert {p.name for p in out.iterdir()} == {"report.json", "samples.csv", "series.csv", "series.png"}
    assert "WL2_HOMO" in capsys.readouterr().out


def test_check_estimate_overrides_config(config, tmp_path):
    out = tmp_path / "o"
    assert main(["check", "LS_FREE", "--config", config(), "--out", str(out), "--no-plot"]) == EXIT_OK
    assert json.loads((out / "report.json").read_text())["estimate"] == "LS_FREE"
    assert not (out / "series.png").exists()


def test_ratio_above_cap_exits_3(config, tmp_path):
    rc = main(["check", "WL2_HOMO", "--config", config(ratio_cap=1e-12), "--out", str(tmp_path / "o"), "--no-plot"])
    assert rc == EXIT_ESTIMATE


@pytest.mark.parametrize(
    "argv_tail, over",
    [
        (["check", "STRICHARTZ"], {}),
        (["check", "STRICHARTZ"], {"triple": {"q": 2, "r": 4, "theta": 0}}),
        (["fpnorm"], {"grid": {"n": 3, "L": 8.0, "N": 15}}),
        (["solve"], {"time": {"T": 1.0, "dt": 0.3}}),
    ],
)
def test_bad_config_exits_2(config, tmp_path, argv_tail, over, capsys):
    rc = main(argv_tail + ["--config", config(**over), "--out", str(tmp_path / "o")])
    assert rc == EXIT_CONFIG
    assert capsys.readouterr().err.startswith("error:")


def test_missing_files(tmp_path, capsys):
    # an unreadable config is a configuration problem; a missing report is a runtime one
    assert main(["fpnorm", "--config", str(tmp_path / "absent.json")]) == EXIT_CONFIG
    assert main(["report", str(tmp_path / "absent")]) == EXIT_RUNTIME


def test_solve_outputs(config, tmp_path, capsys):
    out = tmp_path / "s"
    assert main(["solve", "--config", config(), "--out", str(out)]) == EXIT_OK
    f, u = read_field(out / "f.kgf"), read_field(out / "u.kgf")
    assert u.slices.shape == (9, 16, 16, 16)
    assert np.allclose(u.slices[0], f.values)
    trace = json.loads((out / "trace.json").read_text())
    assert trace["converged"] and trace["sample"]


def test_solve_divergence_exits_1_with_trace(config, tmp_path):
    out = tmp_path / "s"
    rc = main(["solve", "--config", config(potential={"family": "InverseSquare", "a": 40.0}, time={"T": 3.0, "dt": 0.125}), "--out", str(out)])
    assert rc == EXIT_RUNTIME
    assert not json.loads((out / "trace.json").read_text())["converged"]


@pytest.mark.filterwarnings("ignore::kglab.potentials.FpBoundaryWarning")
def test_fpnorm_prints_value_first(config, capsys):
    assert main(["fpnorm", "--config", config(scan={"center_stride": 4, "radii": [2.0, 4.0, 8.0]})]) == EXIT_OK
    first, rest = capsys.readouterr().out.split("\n", 1)
    doc = json.loads(rest)
    assert float(first) == pytest.approx(doc["value"], rel=1e-9)
    assert doc["radii"] == [2.0, 4.0, 8.0]


def test_sweep_and_report(config, tmp_path, capsys):
    out = tmp_path / "w"
    argv = ["sweep", "--config", config(estimate="LS_FREE"), "--param", "data.carrier_scale", "--values", "0.5,1,2", "--out", str(out)]
    assert main(argv) == EXIT_OK
    for name in ("sweep.json", "series.csv", "series.png"):
        assert (out / name).exists()
    doc = json.loads((out / "sweep.json").read_text())
    assert doc["series"]["value"] == [0.5, 1, 2] and doc["passed"]
    capsys.readouterr()
    assert main(["report", str(out), "--no-plot"]) == EXIT_OK
    assert "sweep over data.carrier_scale" in capsys.readouterr().out
    sub = next(p for p in out.iterdir() if p.is_dir())
    (sub / "series.png").unlink(missing_ok=True)
    assert main(["report", str(sub / "report.json")]) == EXIT_OK
    assert (sub / "series.png").exists()


def test_console_entry_point(config, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "kglab.harness.cli", "fpnorm", "--config", config()],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and float(proc.stdout.split()[0]) > 0


def test_check_supplies_estimate_missing_from_file(tmp_path):
    cfg = tmp_path / "bare.json"
    cfg.write_text(json.dumps({"scenario": {k: v for k, v in BASE.items() if k != "estimate"}}))
    assert main(["check", "LS_FREE", "--config", str(cfg), "--out", str(tmp_path / "o"), "--no-plot"]) == EXIT_OK
