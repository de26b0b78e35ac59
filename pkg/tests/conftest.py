"""
Shared fixtures for the kdet test suite.
"""

import random
from pathlib import Path

import pytest

from kdet.config import get_settings
from kdet.rings import DualNumbers, Integers, PrimeField, Rationals

SAMPLES = Path(__file__).resolve().parent.parent / "samples"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(autouse=True)
def clear_settings_cache():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def zz():
    return Integers()


@pytest.fixture
def qq():
    return Rationals()


@pytest.fixture
def f2():
    return PrimeField(2)


@pytest.fixture
def f3():
    return PrimeField(3)


@pytest.fixture
def dual3():
    return DualNumbers(3)


@pytest.fixture
def rng():
    return random.Random(0)


@pytest.fixture
def samples():
    return SAMPLES


@pytest.fixture
def golden():
    return GOLDEN


@pytest.fixture
def write_input(tmp_path):
    """Write text to a file under tmp_path and return its path as a string."""
    def _write(text: str, name: str = "input.cx") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write
