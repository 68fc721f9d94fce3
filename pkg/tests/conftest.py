import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from revolute.meridian import CurveFamily, build_family, disc_curve  # noqa: E402

HEMI = CurveFamily("spherical_cap", {"radius": 1.0, "angle": math.pi / 2})
CONE = CurveFamily("cone", {"R": 1.0, "L": 2.0})
TAIL_BUMP = CurveFamily("bumped_disc", {"R": 1.0, "amplitude": 0.3, "center": 0.86, "width": 0.12})


@pytest.fixture(scope="session")
def disc():
    return disc_curve(1.0, 4096)


@pytest.fixture(scope="session")
def hemisphere():
    return build_family(HEMI, 4097)


@pytest.fixture(scope="session")
def cone():
    return build_family(CONE, 4097)


@pytest.fixture(scope="session")
def tail_bump():
    return build_family(TAIL_BUMP, 4097)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
