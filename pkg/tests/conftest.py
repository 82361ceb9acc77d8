import numpy as np
import pytest

from stiffelm import ElmConfig, build_basis

_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, echoed in the terminal summary."""
    def record(label, ok, detail=""):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=[("none", "tanh"), ("none", "sine"), ("gaussian", "tanh"), ("gaussian", "sine")],
                ids=lambda p: f"{p[0]}-{p[1]}")
def small_basis(request):
    encoding, activation = request.param
    return build_basis(ElmConfig(nodes=12, encoding=encoding, filter_width=0.05, activation=activation, seed=7))
