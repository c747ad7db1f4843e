"""Pytest configuration: import path, shared keys and the slow marker."""

from pathlib import Path
import os
import random
import sys

import pytest


PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from src.schemes import DebugScheme, PaillierScheme, keypair_from_primes  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale check, run with CHEM_RUN_SLOW=1")


def pytest_collection_modifyitems(config, items):
    if os.getenv("CHEM_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set CHEM_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture(scope="session")
def debug_keypair():
    return DebugScheme().keygen(64, random.Random(7))


@pytest.fixture(scope="session")
def paillier_keypair():
    return PaillierScheme().keygen(256, random.Random(11))


@pytest.fixture(scope="session")
def toy_paillier_keypair():
    """64-bit key: large enough for B <= 16 and fast enough for exhaustive loops."""
    return PaillierScheme().keygen(64, random.Random(13))


@pytest.fixture(scope="session")
def tiny_paillier_keypair():
    return keypair_from_primes(5, 7)


@pytest.fixture(scope="session")
def paillier_1024_keypair():
    return PaillierScheme().keygen(1024, random.Random(17))
