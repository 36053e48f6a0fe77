"""
Shared fixtures for the root-dynamics test suite
File: conftest.py
"""

import logging

import pytest

from exactcore import make_angle
from oracle import MethodSpec
from rootdyn.config import Config, reload_config, set_config


@pytest.fixture(autouse=True)
def default_config():
    """Every test starts from the built-in defaults"""
    config = set_config(Config())
    yield config
    reload_config()


@pytest.fixture(autouse=True)
def detach_log_handlers():
    """run() installs root handlers bound to the captured streams"""
    root = logging.getLogger()
    before = set(root.handlers)
    yield
    added = [h for h in root.handlers if h not in before and not type(h).__module__.startswith("_pytest")]
    for handler in added:
        root.removeHandler(handler)
        handler.close()


@pytest.fixture
def newton():
    return MethodSpec.newton()


@pytest.fixture
def halley():
    return MethodSpec.halley()


@pytest.fixture
def secant():
    return MethodSpec.secant()


@pytest.fixture
def angle():
    """Shorthand: angle(1, 7) is the exact angle π/7"""
    return make_angle
