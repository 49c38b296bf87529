"""
Pytest configuration: shared precision and quadrature settings
"""
import logging

import pytest

from pyborel import PrecisionConfig, QuadratureConfig


@pytest.fixture(scope="session")
def config():
    """The default 60-digit working precision."""
    return PrecisionConfig()


@pytest.fixture(scope="session")
def fast_config():
    """30 digits, enough for the coarser numerical checks."""
    return PrecisionConfig(digits=30)


@pytest.fixture(scope="session")
def quad():
    return QuadratureConfig()


@pytest.fixture
def pyborel_info(caplog):
    """Capture pyborel records at INFO; the package logger defaults to WARNING."""
    with caplog.at_level(logging.INFO, logger="pyborel"):
        yield caplog


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale run taking more than a few seconds")
