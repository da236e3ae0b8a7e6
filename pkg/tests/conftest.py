import cmath
import math
import re

import pytest

from sectorexp.cornerseries import AnalyticRHS, RadialStepRHS
from sectorexp.geometry import BoundaryCurve, SectorScene
from sectorexp.twoscale import build_two_scale


def quarter_disk_scene() -> SectorScene:
    hole = BoundaryCurve.circle(0.5 * cmath.exp(1j * math.pi / 4), 0.1)
    return SectorScene("pi/2", 1.0, [hole])


@pytest.fixture(scope="session")
def quarter_scene():
    return quarter_disk_scene()


@pytest.fixture(scope="session")
def quarter_two_scale(quarter_scene):
    return build_two_scale(quarter_scene, AnalyticRHS.constant(1.0), cutoff=8.0, gamma_high=14.0)


@pytest.fixture(scope="session")
def step_two_scale(quarter_scene):
    return build_two_scale(quarter_scene, RadialStepRHS(1.0, 0.7), cutoff=8.0, gamma_high=14.0)


# one summary line per acceptance criterion ---------------------------------------------

_CRITERIA: dict[int, tuple[str, str]] = {}
_CRITERION_TEST = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    match = _CRITERION_TEST.search(report.nodeid)
    if not match:
        return
    number, title = int(match.group(1)), match.group(2).replace("_", " ")
    if report.when == "call" or report.failed:
        outcome = "PASS" if report.passed else "FAIL"
        if _CRITERIA.get(number, ("", "PASS"))[1] == "PASS":
            _CRITERIA[number] = (title, outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcome = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}  {outcome}  {title}")
