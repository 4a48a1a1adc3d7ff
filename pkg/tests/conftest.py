import datetime as dt
import importlib

import numpy as np
import pytest

from histent import _pycore


def _backends():
    mods = [_pycore]
    try:
        mods.append(importlib.import_module("histent._core"))
    except ImportError:  # extension not built
        pass
    return mods


BACKENDS = _backends()


@pytest.fixture(params=BACKENDS, ids=lambda m: m.NAME)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def weekdays(start: dt.date, n: int):
    out = []
    d = start
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def numpy_overlap(alphas):
    a = np.asarray(alphas, dtype=float)
    return np.exp(-0.5 * (a[:, None] - a[None, :]) ** 2) / a.size


# acceptance results, printed as one line per criterion at the end of the run
ACCEPTANCE: list = []


def report(criterion: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: s.split("criterion ")[1]):
            terminalreporter.write_line(line)
