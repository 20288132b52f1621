import os
import subprocess
import sys
from pathlib import Path

import pytest

from reynolds._backend import BACKEND, available_backends, get_kernels

ROOT = Path(__file__).resolve().parent.parent


def _selected(env_value):
    env = dict(os.environ)
    env.pop("REYNOLDS_PURE_PYTHON", None)
    if env_value is not None:
        env["REYNOLDS_PURE_PYTHON"] = env_value
    out = subprocess.run([sys.executable, "-c", "from reynolds._backend import BACKEND; print(BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    return out.stdout.strip()


def test_python_backend_always_available():
    assert "python" in available_backends()
    assert BACKEND in available_backends()
    assert get_kernels("python").__name__.endswith("_kernels_py")


def test_unknown_backend():
    with pytest.raises(ValueError):
        get_kernels("fortran")


def test_environment_forces_fallback():
    assert _selected("1") == "python"


@pytest.mark.skipif("cython" not in available_backends(), reason="compiled backend not built")
def test_compiled_backend_is_default():
    assert _selected(None) == "cython"
    assert _selected("0") == "cython"


def test_backend_benchmark_script_runs():
    out = subprocess.run([sys.executable, str(ROOT / "benchmarks" / "bench_backends.py"),
                          "--sizes", "300", "--repeats", "1", "--sor-sweeps", "2"],
                         capture_output=True, text=True, check=True)
    lines = out.stdout.strip().splitlines()
    assert "kernel,N,backend,seconds,speedup_vs_python" in lines
    assert any(line.startswith("fast1d,300,python") for line in lines)
