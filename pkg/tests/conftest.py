import warnings

import numpy as np
import pytest

ACCEPTANCE = {}


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(autouse=True)
def _quiet_model_warnings():
    # the 50%-of-A warning is informational; tests that need it re-enable it
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.nodeid.split("::")[-1]
    if "test_acceptance.py" in report.nodeid and name.startswith("test_criterion_"):
        key = int(name.split("_")[2])
        ACCEPTANCE.setdefault(key, []).append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        results = ACCEPTANCE[key]
        ok = all(outcome == "passed" for _, outcome in results)
        failed = [n for n, o in results if o != "passed"]
        line = f"criterion {key}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += f" ({', '.join(failed)})"
        terminalreporter.write_line(line)
