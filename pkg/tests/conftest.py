import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from binloc import Environment, Polygon, PriorRegion  # noqa: E402


@pytest.fixture
def paper_env():
    """Physical constants used for all three field trials, with dataset-1 wind."""
    return Environment(
        diffusivity=1.0,
        particle_lifetime=1000.0,
        sensor_radius=0.2,
        sensing_interval=1.0,
        wind_direction=195.0,
        wind_mean=0.28,
        wind_sd=0.2,
    )


@pytest.fixture
def aligned_env():
    return Environment(wind_direction=0.0, wind_mean=0.28, wind_sd=0.2)


@pytest.fixture
def unit_square():
    return Polygon.from_coords([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture
def unit_region(unit_square):
    return PriorRegion((unit_square,))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
