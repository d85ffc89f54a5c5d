import sys

import pytest

from robustmech import Beta, Empirical, TruncatedExponential, Uniform


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo one pass/fail line per acceptance criterion after the run."""
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None) if mod else None
    if results:
        terminalreporter.section("acceptance criteria")
        for number, description, status in sorted(results):
            terminalreporter.write_line(
                f"criterion {number:02d} [{status}] {description}"
            )


@pytest.fixture(scope="session")
def uniform():
    return Uniform()


@pytest.fixture(scope="session")
def two_point():
    return Empirical(((0.3, 0.5), (0.7, 0.5)))


@pytest.fixture(scope="session")
def beta25():
    return Beta(2.0, 5.0)


@pytest.fixture(scope="session")
def exp1():
    return TruncatedExponential(1.0)
