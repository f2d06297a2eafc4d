import pytest

from polylog_periods.config import reset_settings


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: mark test as a long-running numerical check"
    )


def pytest_runtest_setup(item):
    if item.get_closest_marker("slow", False) and not item.config.getvalue("--slow"):
        pytest.skip("Skipping slow test (use --slow to run)")


def pytest_addoption(parser):
    parser.addoption(
        "--slow",
        action="store_true",
        default=False,
        help="Run long-running numerical checks",
    )


@pytest.fixture(autouse=True)
def default_settings():
    """Restore the package-wide defaults around every test."""

    reset_settings()
    yield
    reset_settings()
