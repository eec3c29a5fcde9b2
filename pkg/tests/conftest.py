import csv
from pathlib import Path

import pytest

from vilentropy import _accel

DATA = Path(__file__).parent / "data"
BACKENDS = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])


def read_csv(name):
    with open(DATA / name, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(params=BACKENDS)
def kernel_backend(request):
    old = _accel.backend()
    _accel.set_backend(request.param)
    yield request.param
    _accel.set_backend(old)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when == "call" and "test_acceptance" in rep.nodeid:
                lines.append(f"{rep.nodeid.split('::')[-1]}: {'PASS' if outcome == 'passed' else 'FAIL'}")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("_")[1][1:])):
            terminalreporter.write_line(line)
