import csv
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from reynolds.cli import main
from reynolds.config import ConfigError, load_config

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def workdir(tmp_path):
    for f in CONFIGS.iterdir():
        if f.is_file():
            shutil.copy(f, tmp_path / f.name)
    return tmp_path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _write(path, text):
    path.write_text(text)
    return path


def test_solve_full_film_golden(workdir):
    assert main(["solve", str(workdir / "full_film_1d.toml")]) == 0
    out = workdir / "out" / "full_film_1d.csv"
    lines = out.read_text().splitlines()
    assert lines[0] == "index_i,x,p,active"
    assert lines[1] == "0,-3.0,0.0,false"
    rows = _rows(out)
    x = np.array([float(r["x"]) for r in rows])
    p = np.array([float(r["p"]) for r in rows])
    np.testing.assert_allclose(p, 9 - x**2, rtol=0, atol=1e-9)
    assert sum(r["active"] == "true" for r in rows) == 599
    summary = (workdir / "out" / "full_film_1d.txt").read_text()
    assert "converged: true" in summary and "active_nodes: 599" in summary


@pytest.mark.parametrize("solver", ["fast1d", "sor1d", "projected"])
def test_positive_source_gives_zero_pressure(workdir, solver):
    cfg = _write(workdir / "dry.toml", f"""
[problem]
dimension = 1
solver = "{solver}"
[grid]
x = [0.0, 1.0]
nx = 21
[coefficients]
f1 = 1.0
f3 = 1.0
""")
    assert main(["solve", str(cfg)]) == 0
    rows = _rows(workdir / "pressure.csv")
    assert len(rows) == 21
    assert all(float(r["p"]) == 0.0 and r["active"] == "false" for r in rows)


def test_2d_output_is_deterministic(workdir):
    cfg = str(workdir / "textured_2d.toml")
    out = workdir / "out" / "textured_2d.csv"
    assert main(["solve", cfg]) == 0
    first = out.read_bytes()
    assert main(["solve", cfg]) == 0
    assert out.read_bytes() == first
    rows = _rows(out)
    assert rows[0].keys() == {"index_i", "index_j", "x", "y", "p", "active"}
    active = [r["active"] == "true" for r in rows]
    assert any(active) and not all(active)


def test_physical_slider(workdir):
    assert main(["solve", str(workdir / "slider_physical_1d.toml")]) == 0
    rows = _rows(workdir / "out" / "slider_physical_1d.csv")
    p = np.array([float(r["p"]) for r in rows])
    assert p[0] == 0.0 and p[-1] == 0.0 and np.all(p[1:-1] > 0)


def test_oracle_solver_on_coarse_problem(workdir):
    assert main(["solve", str(workdir / "verify_small.toml")]) == 0
    p = [float(r["p"]) for r in _rows(workdir / "out" / "verify_small.csv")]
    np.testing.assert_allclose(p, [0, 5, 8, 9, 8, 5, 0], atol=1e-12)


def test_unknown_key_reports_line(workdir, capsys):
    cfg = _write(workdir / "bad.toml", "[problem]\ndimension = 1\n\n[grid]\nnx = 11\nnz = 4\n")
    assert main(["solve", str(cfg)]) == 1
    err = capsys.readouterr().err
    assert "bad.toml:6:" in err and "nz" in err


@pytest.mark.parametrize("body, line", [
    ("[problem]\ndimension = 3\n", 2),
    ("[problem]\ndimension = 1\n[grid]\nnx = 11\n[coefficients]\nmode = 'magic'\n", 6),
    ("[problem]\ndimension = 1\n[grid]\nnx = 11\n[solverz]\ntol = 1\n", 5),
    ("[problem]\ndimension = 1\n[grid]\nnx = 'many'\n", 4),
    ("[problem]\ndimension = 1\nsolver = 'fast1d\n", 3),
])
def test_malformed_configs(workdir, body, line):
    cfg = _write(workdir / "bad.toml", body)
    with pytest.raises(ConfigError) as exc:
        load_config(cfg)
    assert exc.value.line == line
    assert main(["solve", str(cfg)]) == 1


def test_missing_file_exits_1(tmp_path):
    assert main(["solve", str(tmp_path / "nope.toml")]) == 1


def test_nonconvergence_exits_2(workdir):
    cfg = str(workdir / "full_film_1d.toml")
    text = (workdir / "full_film_1d.toml").read_text().replace('"fast1d"', '"sor1d"')
    (workdir / "full_film_1d.toml").write_text(text)
    assert main(["solve", cfg, "--max-iter", "10"]) == 2
    assert "converged: false" in (workdir / "out" / "full_film_1d.txt").read_text()


def test_flag_overrides():
    cfg = load_config(CONFIGS / "textured_2d.toml", {"tol": 1e-6, "omega": 1.5, "max_iter": 7})
    assert (cfg.options.tol, cfg.options.omega, cfg.options.max_iter) == (1e-6, 1.5, 7)
    with pytest.raises(ConfigError):
        load_config(CONFIGS / "textured_2d.toml", {"omega": 2.5})


def test_bench_refuses_small_sizes(workdir, capsys):
    cfg = _write(workdir / "tiny.toml", """
[problem]
dimension = 1
[grid]
nx = 101
[coefficients]
mode = "wave"
f1 = 1.0
f3_amplitude = 1.0
wavelength = 1.0
[bench]
sizes = [32, 1000]
""")
    assert main(["bench", str(cfg)]) == 1
    assert "64" in capsys.readouterr().err


def test_bench_requires_section(workdir):
    assert main(["bench", str(workdir / "full_film_1d.toml")]) == 1


def test_bench_writes_table(workdir):
    cfg = _write(workdir / "quick.toml", """
[problem]
dimension = 1
[grid]
nx = 101
[coefficients]
mode = "wave"
f1 = 1.0
f3_mean = 0.3
f3_amplitude = 1.0
wavelength = 1.0
[bench]
sizes = [400, 800]
dx = 0.005
repeats = 1
omega = 1.9
[output]
bench = "bench.csv"
""")
    assert main(["bench", str(cfg)]) == 0
    rows = _rows(workdir / "bench.csv")
    assert [int(r["N"]) for r in rows] == [400, 800]
    assert list(rows[0]) == ["N", "t_fast", "t_sor", "speedup", "residual_fast", "residual_sor"]
    for r in rows:
        assert float(r["residual_sor"]) <= max(float(r["residual_fast"]), 1e-9)


def test_verify_is_seeded(workdir, monkeypatch, capsys):
    cfg = _write(workdir / "v.toml", (workdir / "verify_small.toml").read_text().replace("problems = 20", "problems = 4"))
    monkeypatch.setenv("REYNOLDS_SEED", "17")
    assert main(["verify", str(cfg)]) == 0
    first = capsys.readouterr().out
    assert main(["verify", str(cfg)]) == 0
    assert capsys.readouterr().out == first
    assert "FAIL" not in first and "seed 17" in first


def test_console_script(workdir):
    res = subprocess.run([sys.executable, "-m", "reynolds.cli", "solve", str(workdir / "verify_small.toml")],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    res = subprocess.run([sys.executable, "-m", "reynolds.cli", "frobnicate"], capture_output=True, text=True)
    assert res.returncode != 0
