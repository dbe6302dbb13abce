import numpy as np
import pytest

from densint.rng import RngStream


@pytest.fixture
def rng():
    return RngStream(20261016, 0)


def lens_ratio(delta):
    """Fraction of the disk B(x, delta) inside the unit disk when |x| = 1 (circular segments)."""
    r1, r2, d = 1.0, delta, 1.0
    area = (r1**2 * np.arccos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
            + r2**2 * np.arccos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
            - 0.5 * np.sqrt((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)))
    return area / (np.pi * delta**2)


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
