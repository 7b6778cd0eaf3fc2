import numpy as np
import pytest

from netpoa.network import validate_network

# 0-based observation sets of the five-agent example network
FIG1_OBS = [{0, 1, 2, 3, 4}, {0, 1, 2, 4}, {0, 1, 2, 4}, {0, 3}, {0, 1, 2, 3, 4}]


@pytest.fixture
def fig1():
    return validate_network(FIG1_OBS)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_criteria: dict[int, dict] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when != "call" and report.outcome == "passed":
        return
    num = int(report.nodeid.split("test_criterion_")[1].split("_")[0])
    name = report.nodeid.split("::")[-1].split("[")[0]
    entry = _criteria.setdefault(num, {"name": name, "cases": 0, "failed": 0})
    entry["cases"] += 1
    entry["failed"] += report.outcome != "passed"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        e = _criteria[num]
        status = "FAIL" if e["failed"] else "PASS"
        cases = f" ({e['cases'] - e['failed']}/{e['cases']} cases)" if e["cases"] > 1 else ""
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {e['name']}{cases}")
