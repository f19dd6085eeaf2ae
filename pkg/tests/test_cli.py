"""CLI behaviour and golden outputs.

Regenerate goldens with ``FISHFID_UPDATE_GOLDEN=1 pytest tests/test_cli.py``
after an intentional output change, and review the diff.
"""

import json
import os
import shutil
from pathlib import Path

import pytest

from fishfid.cli import run

from .oracles import FID_ALPHA_09

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("FISHFID_UPDATE_GOLDEN") == "1"

TRUTH = {"l_control": 2.0, "l_hide": 1.0, "k": 1.0, "x0": 5.0, "abscissa_kind": "RobotDistance"}
CONFIG = {"altitude": 0.5, "speed": 0.5, "transect_half_length": 12.0, "wait_seconds": 60.0,
          "standoff_during_wait": 4.0, "n_transects": 2, "n_fish": 3, "noise_stddev": 0.0}


@pytest.fixture
def work(tmp_path):
    (tmp_path / "truth.json").write_text(json.dumps(TRUTH))
    (tmp_path / "config.json").write_text(json.dumps(CONFIG))
    return tmp_path


def cli(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def check_golden(name, data):
    path = GOLDEN / name
    if UPDATE:
        GOLDEN.mkdir(exist_ok=True)
        path.write_bytes(data)
    assert data == path.read_bytes(), name


def pipeline(work, capsys):
    """simulate -> ingest -> fit -> fid -> plan through files; returns fid output."""
    w = work
    assert cli(capsys, "simulate", "--truth", w / "truth.json", "--config", w / "config.json",
               "--seed", 7, "--cadence", 5, "--out", w / "ann.csv")[0] == 0
    assert cli(capsys, "ingest", "--input", w / "ann.csv", "--format", "csv",
               "--domain", "distance", "--out", w / "ds.json")[0] == 0
    assert cli(capsys, "fit", "--input", w / "ds.json", "--domain", "distance",
               "--out", w / "fit.json")[0] == 0
    code, fid_out, _ = cli(capsys, "fid", "--model", w / "fit.json", "--alpha", 0.9)
    assert code == 0
    assert cli(capsys, "plan", "--model", w / "fit.json", "--alpha", 0.9, "--sensor-range", 10,
               "--speed", 0.5, "--half-length", 4, "--out", w / "plan.json")[0] == 0
    return fid_out


def test_pipeline_goldens(work, capsys):
    fid_out = pipeline(work, capsys)
    check_golden("ann.csv", (work / "ann.csv").read_bytes())
    check_golden("ds.json", (work / "ds.json").read_bytes())
    check_golden("fit.json", (work / "fit.json").read_bytes())
    check_golden("fit.csv", (work / "fit.csv").read_bytes())
    check_golden("fid.json", fid_out.encode())
    check_golden("plan.json", (work / "plan.json").read_bytes())
    check_golden("plan.csv", (work / "plan.csv").read_bytes())
    assert abs(json.loads(fid_out)["fid"] - FID_ALPHA_09) < 1e-5


def test_ks_golden(work, capsys):
    pipeline(work, capsys)
    code, out, _ = cli(capsys, "ks", "--control", work / "ann.csv", "--transect", work / "ann.csv",
                       "--ecdf-out", work / "ecdf.csv")
    assert code == 0
    res = json.loads(out)
    assert res["d_statistic"] == 0.0 and res["p_value"] == 1.0
    check_golden("ks.json", out.encode())
    check_golden("ecdf.csv", (work / "ecdf.csv").read_bytes())


def test_fid_reference_model(work, capsys):
    code, out, _ = cli(capsys, "fid", "--model", work / "truth.json", "--alpha", 0.9)
    assert code == 0
    assert abs(json.loads(out)["fid"] - FID_ALPHA_09) < 1e-12


def test_ks_plain_distance_columns(tmp_path, capsys):
    (tmp_path / "a.csv").write_text("distance\n1\n2\n")
    (tmp_path / "b.csv").write_text("3\n4\n")
    code, out, _ = cli(capsys, "ks", "--control", tmp_path / "a.csv", "--transect", tmp_path / "b.csv")
    assert code == 0 and json.loads(out)["d_statistic"] == 1.0


def test_unknown_subcommand_exit_2(capsys):
    code, _, err = cli(capsys, "frobnicate")
    assert code == 2 and "usage" in err


def test_bad_alpha_is_usage_error(work, capsys):
    assert cli(capsys, "fid", "--model", work / "truth.json", "--alpha", 1.0)[0] == 2


def test_missing_input_is_usage_error(work, capsys):
    assert cli(capsys, "fid", "--model", work / "nope.json")[0] == 2


def test_domain_error_single_json_line(work, capsys):
    code, out, err = cli(capsys, "fid", "--model", work / "truth.json", "--alpha", 0.5)
    assert code == 1 and out == ""
    lines = err.strip().splitlines()
    assert len(lines) == 1
    assert json.loads(lines[0])["error"] == "ThresholdUnreachable"


def test_plan_infeasible_exit_1(work, capsys):
    code, _, err = cli(capsys, "plan", "--model", work / "truth.json", "--sensor-range", 5,
                       "--speed", 0.5, "--half-length", 4)
    assert code == 1 and json.loads(err)["error"] == "Infeasible"


def test_plan_standoff_only(work, capsys):
    code, out, _ = cli(capsys, "plan", "--model", work / "truth.json", "--sensor-range", 10)
    assert code == 0 and json.loads(out)["plan"]["feasible"] is True


def test_fit_directly_from_annotations_time_domain(work, capsys):
    cli(capsys, "simulate", "--truth", work / "truth.json", "--config", work / "config.json",
        "--out", work / "ann.csv")
    code, out, _ = cli(capsys, "fit", "--input", work / "ann.csv", "--domain", "time")
    assert code == 0
    assert json.loads(out)["model"]["abscissa_kind"] == "TimeAlongTransect"


def test_fit_domain_mismatch_with_dataset(work, capsys):
    cli(capsys, "simulate", "--truth", work / "truth.json", "--config", work / "config.json",
        "--out", work / "ann.csv")
    cli(capsys, "ingest", "--input", work / "ann.csv", "--out", work / "ds.json")
    assert cli(capsys, "fit", "--input", work / "ds.json", "--domain", "distance")[0] == 2


def test_pipeline_byte_identical_across_runs(tmp_path, capsys):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        d.mkdir()
        (d / "truth.json").write_text(json.dumps(TRUTH))
        (d / "config.json").write_text(json.dumps(CONFIG))
        fid_out = pipeline(d, capsys)
        outs.append([(d / f).read_bytes() for f in ("ann.csv", "ds.json", "fit.json", "plan.json")]
                    + [fid_out.encode()])
    assert outs[0] == outs[1]


def test_module_entry_point(work):
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "fishfid", "fid", "--model", str(work / "truth.json")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "fid" in r.stdout
