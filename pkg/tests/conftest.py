import numpy as np
import pytest

from spinal.core import SpinalGroup
from spinal.presets import grigorchuk2, grigorchukP, holt
from spinal.words import Word, invert


@pytest.fixture(scope="session")
def G2():
    return SpinalGroup(*grigorchuk2("012"))


@pytest.fixture(scope="session")
def G3():
    return SpinalGroup(*grigorchukP(3))


@pytest.fixture(scope="session")
def holt_data():
    return holt()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def mul(G, u: Word, v: Word) -> Word:
    return Word(G.reduce(u.letters + v.letters), u.offset)


def inv(G, w: Word) -> Word:
    return invert(w, G.alpha)


def power(G, w: Word, k: int) -> Word:
    return Word(G.reduce(w.letters * k), w.offset)


# -- acceptance report -------------------------------------------------------

_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Record one PASS/FAIL line per acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def rec(n: int, ok: bool, detail: str, elapsed: float, limit: float | None = None) -> bool:
        timed = limit is None or elapsed < limit
        status = "PASS" if ok and timed else "FAIL"
        budget = f" < {limit:g}s" if limit is not None else ""
        line = f"criterion {n:2d}: {status}  {detail}  [{elapsed:.2f}s{budget}]"
        lines.append(line)
        print(line)
        return ok and timed

    return rec


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
