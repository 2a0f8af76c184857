import numpy as np
import pytest

from diversetours import Population, Tour


def one_based(*labels):
    return Tour(tuple(v - 1 for v in labels))


# worked example on K5, written with 1-based labels
T1 = one_based(1, 3, 5, 4, 2)
T2 = one_based(1, 5, 4, 3, 2)
T3 = one_based(1, 2, 5, 3, 4)
T4 = one_based(1, 5, 2, 3, 4)


def edge(u, v):
    """1-based labels to a canonical 0-based edge."""
    return tuple(sorted((u - 1, v - 1)))


@pytest.fixture
def p1():
    return Population([T1, T2, T3])


@pytest.fixture
def p2():
    return Population([T1, T2, T4])


def random_population(rng, n, mu):
    return Population([rng.permutation(n) for _ in range(mu)], n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# --------------------------------------------------------------------------
# acceptance summary: one line per criterion at the end of the run

_OUTCOMES = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when not in ("setup", "call"):
        return
    if rep.when == "setup" and rep.passed:
        return
    number, title = mark.args
    if rep.passed and not hasattr(rep, "wasxfail"):
        status = "PASS"
    elif rep.skipped and not hasattr(rep, "wasxfail"):
        status = "SKIP"
    else:
        status = "FAIL"
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _OUTCOMES[number] = (status, title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        status, title, detail = _OUTCOMES[number]
        line = f"[{status}] criterion {number:>2}: {title}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
