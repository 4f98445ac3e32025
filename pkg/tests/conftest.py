import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))  # for oracles.py

from gcdcluster import build_prime_table  # noqa: E402

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def table():
    """One big table for the whole run: pi queries to 1e7, SPF to 1e7."""
    return build_prime_table(10_000_000)


@pytest.fixture(scope="session")
def small_table():
    return build_prime_table(10_000)


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR
