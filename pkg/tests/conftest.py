import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mwekit.kernels import _numpy  # noqa: E402

try:
    from mwekit.kernels import _numba
except ImportError:  # pragma: no cover
    _numba = None

TOY = Path(__file__).resolve().parents[1] / "src" / "mwekit" / "data" / "toy"
GOLDEN = Path(__file__).parent / "golden"

BACKENDS = [pytest.param(_numpy, id="numpy")]
if _numba is not None:
    BACKENDS.append(pytest.param(_numba, id="numba"))

ACCEPTANCE_RESULTS = {}


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def use_backend(backend, monkeypatch):
    """Route library calls through one backend for the duration of a test."""
    import mwekit.kernels as k

    for name in k.__all__:
        if name != "BACKEND":
            monkeypatch.setattr(k, name, getattr(backend, name))
    return backend


@pytest.fixture
def toy_dir(tmp_path):
    dst = tmp_path / "toy"
    shutil.copytree(TOY, dst)
    return dst


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        ACCEPTANCE_RESULTS[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for name, status in ACCEPTANCE_RESULTS.items():
            terminalreporter.write_line(f"{status}  {name}")
