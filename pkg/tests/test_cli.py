import io
import re
import subprocess
import sys

import numpy as np
import pytest

from optosteer.cli import main
from optosteer.gaussian import tmsv_cm, vacuum_cm
from optosteer.linalg import write_cm
from optosteer.model import PhysicalParams, steady_state_cm
from optosteer.sweep import read_csv


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def g_values(text):
    return [float(v) for v in re.findall(r"= ([-\d.e+]+) nats", text)]


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, cm in [("vac", vacuum_cm(2)), ("tmsv", tmsv_cm(0.5)),
                     ("model", steady_state_cm(PhysicalParams(r=0.85)))]:
        paths[name] = tmp_path / f"{name}.cm"
        write_cm(cm, paths[name])
    bad = steady_state_cm(PhysicalParams(r=0.85)).matrix.copy()
    bad[0, 0] *= 10
    bad[1, 1] /= 10
    paths["corrupt"] = tmp_path / "corrupt.cm"
    write_cm(bad, paths["corrupt"])
    return paths


def test_steer_vacuum(files):
    code, out = run("steer", str(files["vac"]), "-x", "0", "-y", "1")
    assert code == 0
    assert g_values(out) == [0.0, 0.0]
    assert "class: NoWay" in out


def test_steer_tmsv(files):
    code, out = run("steer", str(files["tmsv"]), "-x", "0", "-y", "1")
    assert code == 0
    for g in g_values(out):
        assert g == pytest.approx(0.433781, abs=1e-6)
    assert "class: TwoWay" in out


def test_steer_model_collective(files):
    code, out = run("steer", str(files["model"]), "-x", "0", "1", "-y", "2")
    assert code == 0
    assert g_values(out)[0] > 0


def test_steer_bad_partition(files):
    assert run("steer", str(files["model"]), "-x", "0", "-y", "0")[0] == 2
    assert run("steer", str(files["model"]), "-x", "0", "-y", "5")[0] == 2


def test_steer_parse_error_has_line_number(tmp_path, capsys):
    path = tmp_path / "broken.cm"
    path.write_text("1\n0.5 0\n0 oops\n")
    assert run("steer", str(path), "-x", "0", "-y", "1")[0] == 2
    assert f"{path}:3:" in capsys.readouterr().err


def test_steer_missing_file(tmp_path):
    assert run("steer", str(tmp_path / "nope.cm"), "-x", "0", "-y", "1")[0] == 4


def test_check_vacuum_file(files):
    code, out = run("check", str(files["vac"]))
    assert code == 0
    margin = float(re.search(r"= ([-\d.e+]+)", out.split("physicality")[1]).group(1))
    assert abs(margin) <= 1e-12
    spectrum = out.split("symplectic spectrum of 2s: ")[1].split("\n")[0].split()
    np.testing.assert_allclose([float(v) for v in spectrum], 1.0, atol=1e-12)
    assert "all checks passed" in out


def test_check_corrupted_file(files):
    code, out = run("check", str(files["corrupt"]))
    assert code == 3
    assert "Unphysical" in out
    margin = float(re.search(r"Omega/2\) = ([-\d.e+]+)", out).group(1))
    assert margin < -1e-3


def test_check_default_config():
    code, out = run("check")
    assert code == 0
    assert "stable" in out and "all checks passed" in out


def test_check_paper_literal_fails():
    code, out = run("check", "--noise-convention", "paper-literal", "--r", "0")
    assert code == 3 and "Unphysical" in out


def test_config_errors(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mu = heavy\n")
    assert run("check", "--config", str(cfg))[0] == 2
    assert run("check", "--config", str(tmp_path / "missing.cfg"))[0] == 4


def test_sweep_and_windows(tmp_path):
    csv_path = tmp_path / "s.csv"
    code, out = run("sweep", "--steps", "81", "--out", str(csv_path))
    assert code == 0
    assert (tmp_path / "plot_s.py").exists()
    assert len(read_csv(csv_path)) == 81
    code, out = run("windows", "--csv", str(csv_path), "--predicate", "genuine_tripartite",
                    "--predicate", "positive(g_ab_c)")
    assert code == 0
    assert out.startswith("genuine_tripartite: [0.")
    assert "positive(g_ab_c): [" in out


def test_sweep_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("sweep", "--steps", "41", "--out", str(a))[0] == 0
    assert run("sweep", "--steps", "41", "--out", str(b), "--workers", "3")[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_bad_grid_and_predicate(tmp_path):
    assert run("sweep", "--r-min", "1", "--r-max", "0.5", "--out", str(tmp_path / "x.csv"))[0] == 2
    assert run("windows", "--steps", "3", "--predicate", "never(ab)")[0] == 2


def test_sweep_unwritable_output(tmp_path):
    assert run("sweep", "--steps", "3", "--out", str(tmp_path / "no" / "x.csv"))[0] == 4


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "optosteer", "steer", str(files["tmsv"]),
                           "-x", "1", "-y", "0"], capture_output=True, text=True)
    assert proc.returncode == 0 and "TwoWay" in proc.stdout


def test_global_flags_before_or_after_subcommand(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("--steps", "5", "--out", str(a), "sweep")[0] == 0
    assert run("sweep", "--steps", "5", "--out", str(b))[0] == 0
    assert len(read_csv(a)) == 5 and a.read_bytes() == b.read_bytes()
