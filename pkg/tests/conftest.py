import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail=""):
    ACCEPTANCE_LINES.append((number, title, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_LINES):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {title} {detail}".rstrip())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def line_1x5():
    return np.ones((1, 5), dtype=np.uint8)


def plus_shape():
    img = np.zeros((3, 3), dtype=np.uint8)
    img[1, :] = 1
    img[:, 1] = 1
    return img


def ring_8():
    """Eight pixels forming a pure cycle: every pixel has exactly two 8-neighbours."""
    img = np.zeros((4, 4), dtype=np.uint8)
    for r, c in [(0, 1), (0, 2), (1, 3), (2, 3), (3, 2), (3, 1), (2, 0), (1, 0)]:
        img[r, c] = 1
    return img


def diagonal_cross():
    """Five-pixel cross turned 45 degrees; its tips are not mutually adjacent."""
    img = np.zeros((3, 3), dtype=np.uint8)
    for r, c in [(0, 0), (0, 2), (1, 1), (2, 0), (2, 2)]:
        img[r, c] = 1
    return img
