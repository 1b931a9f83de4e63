from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
FIXTURES = TESTS_DIR / "fixtures"
SKILLS = FIXTURES / "skills"

# Make sibling test helpers (smartlights.py) importable regardless of rootdir.
if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))


@pytest.fixture(scope="session")
def myskill_dir() -> Path:
    return SKILLS / "myskill"


@pytest.fixture(scope="session")
def light_skill_dir() -> Path:
    return SKILLS / "light_control"


@pytest.fixture(scope="session")
def weather_skill_dir() -> Path:
    return SKILLS / "weather"


@pytest.fixture(scope="session")
def smalltalk_skill_dir() -> Path:
    return SKILLS / "smalltalk"


@pytest.fixture
def broker():
    from corvid.bus import BrokerConfig, broker_start

    b = broker_start(BrokerConfig(listen="127.0.0.1:0"))
    yield b
    b.close()


@pytest.fixture(scope="session")
def myskill_bundle(myskill_dir):
    from corvid.dsl import load_bundle

    return load_bundle(myskill_dir)


@pytest.fixture(scope="session")
def light_bundle(light_skill_dir):
    from corvid.dsl import load_bundle

    return load_bundle(light_skill_dir)
