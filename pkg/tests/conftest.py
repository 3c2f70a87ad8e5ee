from pathlib import Path

import pytest

from staballoc.params import VehicleParams

REPO_ROOT = Path(__file__).resolve().parents[1]
SCENARIO_DIR = REPO_ROOT / "scenarios"


@pytest.fixture(scope="session")
def params() -> VehicleParams:
    return VehicleParams()


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    return SCENARIO_DIR
