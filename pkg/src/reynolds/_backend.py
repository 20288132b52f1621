"""Kernel backend selection: compiled Cython module when importable, else pure Python."""

import os

from . import _kernels_py

try:
    from . import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

KernelError = _kernels_py.KernelError


def available_backends() -> list:
    return ["cython", "python"] if _kernels_c is not None else ["python"]


def get_kernels(name: str = None):
    """Return the kernel module for ``name`` ('cython' or 'python'); None picks the default."""
    if name is None:
        name = BACKEND
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _kernels_c is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _kernels_c
    raise ValueError(f"unknown backend {name!r}")


if os.environ.get("REYNOLDS_PURE_PYTHON", "") not in ("", "0") or _kernels_c is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

kernels = get_kernels(BACKEND)
