import numpy as np
import pytest

from maxwell_elliptic import DomainSpec, build_grid

UNIT = ((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
CENTRE = ((0.25, 0.25, 0.25), (0.75, 0.75, 0.75))
SMALL_INNER = ((2 / 6,) * 3, (4 / 6,) * 3)


def unit_grid(n):
    return build_grid(DomainSpec(UNIT, CENTRE, n))


def small_grid():
    return build_grid(DomainSpec(UNIT, SMALL_INNER, 6))


def face(grid, surface, axis, sign):
    for f in grid.surface_faces(surface):
        if f.axis == axis and f.sign == sign:
            return f
    raise LookupError((surface, axis, sign))


def face_index(grid, surface, axis, sign):
    faces = grid.surface_faces(surface)
    return faces.index(face(grid, surface, axis, sign))


def orders(errors, ratio=2.0):
    e = np.asarray(errors, dtype=float)
    return np.log(e[:-1] / e[1:]) / np.log(ratio)


@pytest.fixture(scope="session")
def grid8():
    return unit_grid(8)


@pytest.fixture(scope="session")
def grid6():
    return small_grid()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
