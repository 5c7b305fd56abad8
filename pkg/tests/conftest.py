"""Shared fixtures: corpus systems are built once per session."""

import pytest

from core.duplication import offset_dup_map, parity_dup_map
from zoo.corpus import config_dir, load_corpus, load_entry


@pytest.fixture(scope="session")
def toy4():
    return load_entry("toy4")


@pytest.fixture(scope="session")
def mulmul4():
    return load_entry("mulmul4")


@pytest.fixture(scope="session")
def stomp4():
    return load_entry("stomp4")


@pytest.fixture(scope="session")
def both4():
    return load_entry("both4")


@pytest.fixture(scope="session")
def fwd4():
    return load_entry("fwd4")


@pytest.fixture(scope="session")
def single4():
    return load_entry("single4")


@pytest.fixture(scope="session")
def deep4():
    return load_entry("deep4")


@pytest.fixture(scope="session")
def ridecore():
    return load_entry("ridecore-lite")


@pytest.fixture(scope="session")
def ridecore_ordered():
    return load_entry("ridecore-lite-ordered")


@pytest.fixture(scope="session")
def corrupted_toy4():
    return load_entry(str(config_dir() / "controls" / "toy4-corrupted-spec.json"))


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def offset32():
    return offset_dup_map(32, 16)


@pytest.fixture(scope="session")
def parity32():
    return parity_dup_map(32)


@pytest.fixture(scope="session")
def example2(ridecore):
    """Instructions of the back-to-back MUL example: (ADD l12, (l4, l15)) and (MUL l15, (l12, l12))."""
    sys_ = ridecore.system
    return sys_.parse_instruction("ADD 12 4 15"), sys_.parse_instruction("MUL 15 12 12")
