import numpy as np
import pytest


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def dense_synthesis(m, bins):
    """Independent M x k inverse-DFT submatrix built entry by entry."""
    out = np.empty((m, len(bins)), dtype=complex)
    for t in range(m):
        for q, j in enumerate(bins):
            out[t, q] = np.exp(2j * np.pi * j * t / m) / np.sqrt(m)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance reporting: tests marked ``acceptance(n, title)`` get one PASS/FAIL
# line each in the terminal summary; ``criterion_detail`` adds measured values


def pytest_configure(config):
    config._acceptance_lines = {}


@pytest.fixture
def criterion_detail(request):
    details = []
    request.node._acceptance_detail = details
    return details


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    n, title = mark.args
    detail = "; ".join(getattr(item, "_acceptance_detail", []))
    status = "PASS" if rep.passed else "FAIL"
    line = f"criterion {n} [{status}] {title}" + (f" ({detail})" if detail else "")
    item.config._acceptance_lines[n] = line


def pytest_terminal_summary(terminalreporter, config):
    lines = config._acceptance_lines
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
