import pytest


def pytest_addoption(parser):
    parser.addoption(
        "--no-slow", action="store_true", default=False, help="Skip slow tests"
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: mark test as taking more than a few seconds")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--no-slow"):
        skip_slow = pytest.mark.skip(reason="Slow test and --no-slow specified")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_slow)
