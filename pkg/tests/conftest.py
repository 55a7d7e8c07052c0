import math
import re

import numpy as np
import pytest

from su2control.su2 import SU2Element

_CRITERIA: dict[str, list[str]] = {}
_TITLES: dict[str, str] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_su2(rng) -> SU2Element:
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    return SU2Element(complex(v[0], v[1]), complex(v[2], v[3]))


def element_with_point(z: complex, phase: float = 0.0) -> SU2Element:
    r = abs(z)
    return SU2Element.normalized(z, math.sqrt(max(0.0, 1 - r * r)) * complex(math.cos(phase), math.sin(phase)))


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+|curves)_(\w+)", report.nodeid)
    if not m:
        return
    k = m.group(1)
    _TITLES.setdefault(k, m.group(2).replace("_", " "))
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA.setdefault(k, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA, key=lambda s: (not s.isdigit(), int(s) if s.isdigit() else 0)):
        ok = all(o == "passed" for o in _CRITERIA[k])
        terminalreporter.write_line(f"criterion {k:>6} [{'PASS' if ok else 'FAIL'}] {_TITLES[k]}")
