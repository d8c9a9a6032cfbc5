import pytest

from psiclass.cache import MemoCache
from psiclass.correlator import CorrelatorEngine
from psiclass.kernel import CEvaluator

BACKENDS = ["python"] + (["cython"] if CEvaluator is not None else [])


@pytest.fixture(scope="session")
def shared_engine():
    """One warm engine for read-only value checks across the session."""
    return CorrelatorEngine(MemoCache())


@pytest.fixture(params=BACKENDS)
def fresh_engine(request):
    return CorrelatorEngine(MemoCache(), pure_python=request.param == "python")


_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion" in report.nodeid:
        if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
            _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, duration in sorted(_ACCEPTANCE):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}  ({duration:.1f}s)")
