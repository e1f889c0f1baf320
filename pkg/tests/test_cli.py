import json
import math
import subprocess
import sys

import pytest

from nodal_lab.cli import build_parser, main


@pytest.fixture
def cfg(tmp_path):
    path = tmp_path / "lab.ini"
    path.write_text("[experiment]\nlambda_min = 50\nlambda_count = 3\nensemble_size = 2\n"
                    "[cascade]\nj = 2\n")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_parser_lists_all_commands():
    p = build_parser()
    for cmd in ("sweep", "cascade", "doubling", "nodal", "verify", "fit", "report"):
        assert p.parse_args([cmd]).command == cmd


def test_nodal_command(tmp_path, capsys):
    code, out = run(capsys, "nodal", "--function", "product:sin3,sin4", "--out", str(tmp_path),
                    "--resolution", "1024")
    assert code == 0
    rec = json.loads(out.out)
    assert rec["measure"] == pytest.approx(28 * math.pi, rel=0.01)
    assert (tmp_path / "nodal_Torus2_25.txt").exists()
    code, out = run(capsys, "nodal", "--function", "sectoral:5", "--out", str(tmp_path),
                    "--manifold", "Sphere2")
    assert code == 0 and json.loads(out.out)["measure"] == pytest.approx(10 * math.pi, rel=0.015)


def test_sweep_fit_report(tmp_path, capsys, cfg):
    out_dir = str(tmp_path / "o")
    code, out = run(capsys, "sweep", "--config", cfg, "--lambda-max", "200", "--out", out_dir)
    assert code == 0 and "records" in out.out
    code, out = run(capsys, "fit", "--config", cfg, "--out", out_dir)
    assert code == 0 and "slope" in json.loads(out.out)
    code, out = run(capsys, "report", "--out", out_dir)
    assert code == 0 and "nodal_measure n=6" in out.out


def test_cascade_and_doubling(tmp_path, capsys, cfg):
    code, out = run(capsys, "cascade", "--config", cfg, "--lambda-max", "100", "--out", str(tmp_path))
    assert code == 0 and out.out.count("goodFraction") == 2
    assert len(list(tmp_path.glob("cascade_*.jsonl"))) == 2
    code, out = run(capsys, "doubling", "--config", cfg, "--lambda-max", "200", "--out", str(tmp_path))
    assert code == 0 and "max/min" in out.out


def test_verify_exit_code(tmp_path, capsys, cfg):
    code, out = run(capsys, "verify", "--config", cfg, "--lambda-max", "500", "--balls", "20",
                    "--out", str(tmp_path))
    assert code == 0
    assert json.loads(out.out)["violations"] == 0


def test_errors_exit_2(tmp_path, capsys):
    code, out = run(capsys, "nodal", "--function", "bogus", "--out", str(tmp_path))
    assert code == 2 and "error" in out.err
    code, out = run(capsys, "cascade", "--manifold", "Sphere2", "--out", str(tmp_path))
    assert code == 2


def test_seed_env_override(tmp_path, monkeypatch, capsys, cfg):
    monkeypatch.setenv("NODAL_LAB_SEED", "7")
    run(capsys, "sweep", "--config", cfg, "--lambda-max", "100", "--out", str(tmp_path))
    recs = [json.loads(s) for s in (tmp_path / "sweep_Torus2.jsonl").read_text().splitlines()]
    assert {r["seed"] for r in recs} == {7}


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "nodal_lab.cli", "report", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "no record files" in proc.stdout
