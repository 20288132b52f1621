"""TOML problem files.

Complete examples live in ``configs/`` at the repository root; every
key accepted here is listed in ``SCHEMA``.  Unknown keys are rejected so that
typos fail loudly.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .core import Grid1D, Grid2D, ReynoldsError
from .discretize import (
    CoefficientFields,
    PhysicalFields,
    build_reynolds_coefficients,
    build_stencil_2d,
    build_tridiagonal_1d,
)
from .solver2d import SolveOptions

SOLVERS = ("projected", "fast1d", "sor1d", "oracle")
MODES = ("constant", "wave", "file", "physical")

SCHEMA = {
    "problem": {"dimension", "solver", "backend"},
    "grid": {"x", "nx", "y", "ny"},
    "coefficients": {
        "mode", "f1", "f2", "f3", "f3_mean", "f3_amplitude", "wavelength",
        "path", "Vx", "Vy", "exponent", "divisor",
    },
    "solver": {"tol", "max_iter", "omega", "per_node_clamp"},
    "output": {"pressure", "summary", "bench"},
    "bench": {"sizes", "dx", "repeats", "omega", "max_iter"},
    "verify": {"problems", "max_interior"},
}


class ConfigError(ReynoldsError):
    def __init__(self, message: str, line: Optional[int] = None, path: Optional[Path] = None):
        where = f"{path}:" if path is not None else ""
        where += f"{line}: " if line is not None else (" " if where else "")
        super().__init__(f"{where}{message}")
        self.line = line


@dataclass
class BenchSpec:
    sizes: list = field(default_factory=lambda: [25_000, 50_000, 100_000, 200_000, 400_000])
    dx: float = 0.005
    repeats: int = 5
    omega: float = 1.9
    max_iter: int = 2_000_000


@dataclass
class ProblemConfig:
    path: Path
    dimension: int
    solver: str
    grid: Any
    coefficients: dict
    options: SolveOptions
    backend: Optional[str] = None
    outputs: dict = field(default_factory=dict)
    bench: Optional[BenchSpec] = None
    verify: dict = field(default_factory=dict)

    def output_path(self, key: str, default: str) -> Path:
        return self.path.parent / self.outputs.get(key, default)

    def coefficient_fields(self, grid=None) -> CoefficientFields:
        return _coefficient_fields(self, grid or self.grid)

    def build(self, grid=None):
        """Stencil for this problem: ``Tridiag1D`` in 1D, ``CoefficientGrid2D`` in 2D."""
        grid = grid or self.grid
        coef = self.coefficient_fields(grid)
        if self.dimension == 1:
            return build_tridiagonal_1d(coef, grid)
        return build_stencil_2d(coef, grid)


def _line_of(text: str, section: str, key: Optional[str] = None) -> Optional[int]:
    lines = text.splitlines()
    in_section = False
    for no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if re.match(r"^\[\s*" + re.escape(section) + r"\s*\]", stripped):
            if key is None:
                return no
            in_section = True
            continue
        if stripped.startswith("["):
            in_section = False
        if in_section and key is not None and re.match(r"^" + re.escape(key) + r"\s*=", stripped):
            return no
    return None


def load_config(path, overrides: Optional[dict] = None) -> ProblemConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", path=path) from exc
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        line = int(m.group(1)) if m else (len(text.splitlines()) if "end of document" in str(exc) else None)
        raise ConfigError(f"TOML syntax error: {exc}", line, path) from exc

    def fail(msg, section, key=None):
        raise ConfigError(msg, _line_of(text, section, key), path)

    for section, body in raw.items():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", _line_of(text, section), path)
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table", None, path)
        for key in body:
            if key not in SCHEMA[section]:
                fail(f"unknown key '{key}' in [{section}]", section, key)

    def get(section, key, default=None, kind=None):
        value = raw.get(section, {}).get(key, default)
        if value is None:
            fail(f"missing required key '{key}' in [{section}]", section)
        if kind is not None:
            try:
                if kind is int and (isinstance(value, bool) or int(value) != value):
                    raise ValueError
                value = kind(value)
            except (TypeError, ValueError):
                fail(f"'{key}' in [{section}] must be {kind.__name__}", section, key)
        return value

    dimension = get("problem", "dimension", 1, int)
    if dimension not in (1, 2):
        fail("dimension must be 1 or 2", "problem", "dimension")
    solver = get("problem", "solver", "projected" if dimension == 2 else "fast1d", str)
    if solver not in SOLVERS:
        fail(f"solver must be one of {SOLVERS}", "problem", "solver")
    if solver in ("fast1d", "sor1d") and dimension != 1:
        fail(f"solver '{solver}' requires dimension = 1", "problem", "solver")
    backend = raw.get("problem", {}).get("backend")

    try:
        if dimension == 1:
            xa, xb = (float(v) for v in get("grid", "x", [0.0, 1.0]))
            grid = Grid1D.from_extent(xa, xb, get("grid", "nx", None, int))
        else:
            xa, xb = (float(v) for v in get("grid", "x", [0.0, 1.0]))
            ya, yb = (float(v) for v in get("grid", "y", [0.0, 1.0]))
            grid = Grid2D.from_extent((xa, xb), (ya, yb), get("grid", "nx", None, int), get("grid", "ny", None, int))
    except (ReynoldsError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        fail(f"invalid grid: {exc}", "grid")

    coef = dict(raw.get("coefficients", {}))
    mode = coef.get("mode", "constant")
    if mode not in MODES:
        fail(f"coefficients.mode must be one of {MODES}", "coefficients", "mode")
    required = {"constant": ("f1", "f3"), "wave": ("f1", "f3_amplitude", "wavelength"),
                "file": ("path",), "physical": ("path",)}[mode]
    for key in required:
        if key not in coef:
            fail(f"mode '{mode}' needs key '{key}'", "coefficients")
    coef["mode"] = mode

    solver_raw = raw.get("solver", {})
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    try:
        options = SolveOptions(
            tol=float(overrides.get("tol", solver_raw.get("tol", 1e-10))),
            max_iter=int(overrides.get("max_iter", solver_raw.get("max_iter", 100_000))),
            omega=float(overrides.get("omega", solver_raw.get("omega", 1.0))),
            per_node_clamp=bool(solver_raw.get("per_node_clamp", True)),
        )
    except (ReynoldsError, ValueError, TypeError) as exc:
        fail(f"invalid solver options: {exc}", "solver")

    bench = BenchSpec(**raw["bench"]) if "bench" in raw else None

    cfg = ProblemConfig(
        path=path, dimension=dimension, solver=solver, grid=grid, coefficients=coef,
        options=options, backend=backend, outputs=dict(raw.get("output", {})),
        bench=bench, verify=dict(raw.get("verify", {})),
    )
    try:
        cfg.build()
    except ConfigError:
        raise
    except (ReynoldsError, ValueError, OSError, KeyError) as exc:
        fail(f"invalid coefficients: {exc}", "coefficients")
    return cfg


def _read_columns(path: Path, names, optional=()) -> dict:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        header = reader.fieldnames or []
    out = {}
    for name in list(names) + list(optional):
        if name not in header:
            if name in optional:
                continue
            raise KeyError(f"column '{name}' missing from {path}")
        out[name] = np.array([float(r[name]) for r in rows])
    return out


def _coefficient_fields(cfg: ProblemConfig, grid) -> CoefficientFields:
    c = cfg.coefficients
    mode = c["mode"]
    if mode == "constant":
        return CoefficientFields.from_nodal(grid, c["f1"], c["f3"], c.get("f2"))
    if mode == "wave":
        x = grid.x if grid.ndim == 1 else grid.mesh()[0]
        f3 = c.get("f3_mean", 0.0) + c["f3_amplitude"] * np.cos(2 * np.pi * x / c["wavelength"])
        return CoefficientFields.from_nodal(grid, c["f1"], f3, c.get("f2"))
    data_path = cfg.path.parent / c["path"]
    if mode == "file":
        cols = _read_columns(data_path, ("f1", "f3"), ("f2",) if grid.ndim == 2 else ())
        shaped = {k: v.reshape(grid.shape) for k, v in cols.items()}
        return CoefficientFields.from_nodal(grid, shaped["f1"], shaped["f3"], shaped.get("f2"))
    cols = _read_columns(data_path, ("h", "rho", "eta"), ("d_rho_h_dt",))
    shaped = {k: v.reshape(grid.shape) for k, v in cols.items()}
    phys = PhysicalFields(
        shaped["h"], shaped["rho"], shaped["eta"], c.get("Vx", 0.0), c.get("Vy", 0.0),
        shaped.get("d_rho_h_dt", 0.0),
    )
    return build_reynolds_coefficients(phys, grid, c.get("exponent", 2.0), c.get("divisor", 1.0))
