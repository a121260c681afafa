import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from graphon_spectra.experiments import s3_model

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    config._criteria = {}


def pytest_collection_modifyitems(config, items):
    config._criterion_of = {}
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            config._criterion_of[item.nodeid] = mark.args[0]


def pytest_runtest_logreport(report):
    config = pytest_runtest_logreport.config
    num = getattr(config, "_criterion_of", {}).get(report.nodeid)
    if num is None:
        return
    state = config._criteria.setdefault(num, {"passed": True, "ran": False})
    if report.when == "call":
        state["ran"] = True
    if report.failed or (report.when == "call" and report.skipped):
        state["passed"] = False


def pytest_sessionstart(session):
    pytest_runtest_logreport.config = session.config


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    crit = getattr(config, "_criteria", {})
    if not crit:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(crit):
        st = crit[num]
        status = "PASS" if st["passed"] and st["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}: {status}")


@pytest.fixture(scope="session")
def s3():
    return s3_model()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

