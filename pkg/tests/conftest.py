import numpy as np
import pytest

from rosenblatt_lab import ExponentPair

VERDICTS: list[str] = []


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    VERDICTS.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS):
            terminalreporter.write_line(line)


def interior_points(n: int, margin: float, seed: int) -> list[ExponentPair]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        p = ExponentPair(*(float(x) for x in rng.uniform(-1.0, -0.5, 2)))
        if p.interior and p.boundary_distance() > margin:
            out.append(p)
    return out


@pytest.fixture
def verdict():
    return record
