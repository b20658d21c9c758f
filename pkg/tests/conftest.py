import numpy as np
import pytest

from bayesrrdt.cspace import PlanarArm, World


def rect(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def empty_world():
    return World(bounds=[[0, 10], [0, 10]], motion_check_resolution=0.05)


@pytest.fixture
def wall_world():
    # vertical wall from x=4 to x=6 spanning the full height
    return World(bounds=[[0, 10], [0, 10]], obstacles=[rect(4, 0, 6, 10)],
                 motion_check_resolution=0.05)


@pytest.fixture
def arm_world():
    return World(bounds=None, robot=PlanarArm((1.0, 1.0, 1.0)), motion_check_resolution=0.02,
                 obstacles=[rect(1.2, 0.5, 1.6, 0.9)])


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split("-")[0]), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
