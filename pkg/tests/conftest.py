import numpy as np
import pytest

from reynolds._backend import available_backends
from reynolds.core import Grid1D, Grid2D
from reynolds.discretize import CoefficientFields, build_stencil_2d, build_tridiagonal_1d


def full_film_tri(n_nodes=601):
    """d2p/dx2 = -2 on [-3, 3]; exact discrete solution 9 - x^2."""
    grid = Grid1D.from_extent(-3.0, 3.0, n_nodes)
    return build_tridiagonal_1d(CoefficientFields.from_nodal(grid, 1.0, -2.0), grid)


def unit_laplacian(nx, ny, D=0.0):
    grid = Grid2D(nx, ny)
    return build_stencil_2d(CoefficientFields.from_nodal(grid, 1.0, D), grid)


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria: one PASS/FAIL line each in the terminal summary
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    _CRITERIA[number] = (title, rep.passed and rep.when == "call", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[number]
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
