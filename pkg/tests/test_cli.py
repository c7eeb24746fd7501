import csv
import json
import subprocess
import sys

import pytest

from mecoffload.cli import main
from mecoffload.scenario import ScenarioConfig


def _rows(path):
    return list(csv.reader(open(path)))


def test_run_with_config_and_sweep(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(ScenarioConfig(num_cells=4, users_total=6, num_subbands=2).to_dict()))
    out = tmp_path / "o.csv"
    rc = main(["run", "--config", str(cfg), "--drops", "2", "--schemes", "hJTORA,GOJRA",
               "--sweep", "c_u", "--values", "1000,2000", "--out", str(out)])
    assert rc == 0
    rows = _rows(out)
    assert rows[0][0] == "sweep_value" and len(rows) == 5
    assert [r[1] for r in rows[1:]] == ["hJTORA", "GOJRA"] * 2


def test_preset_to_stdout(capsys):
    assert main(["table1", "--drops", "1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert [line.split(",")[1] for line in lines[1:]] == [
        "IOJRA", "GOJRA", "DORA", "hJTORA", "Exhaustive"]


def test_interference_flag(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["fig2", "--drops", "1", "--schemes", "GOJRA", "--interference", "both",
                 "--out", str(out)]) == 0
    assert [r[1] for r in _rows(out)[1:]] == ["GOJRA[approx]", "GOJRA[exact]"]


def test_config_errors_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"network": {"num_cells": 0}}))
    assert main(["run", "--config", str(bad)]) == 1
    assert "num_cells" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "nope.json")]) == 1
    assert main(["run", "--sweep", "c_u"]) == 1
    assert main(["run", "--schemes", "Oracle"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["fig7"])
    assert exc.value.code == 1


def test_runtime_error_exits_2(tmp_path):
    assert main(["table1", "--drops", "1", "--schemes", "IOJRA",
                 "--out", str(tmp_path / "missing" / "o.csv")]) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "mecoffload", "fig5", "--drops", "1",
                          "--panel", "a", "--config", "/does/not/exist.json"],
                         capture_output=True, text=True)
    assert res.returncode == 1


def test_no_timing_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["fig2", "--drops", "2", "--schemes", "hJTORA,IOJRA", "--no-timing",
                     "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert all(float(r[6]) == 0.0 for r in _rows(a)[1:])
