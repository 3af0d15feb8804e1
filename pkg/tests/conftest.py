import time
from contextlib import contextmanager
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("lab", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def frac():
    return Fraction


@pytest.fixture
def criterion():
    """Context manager that prints and records one PASS/FAIL line per acceptance criterion."""

    @contextmanager
    def run(number: int, title: str, budget_s: float):
        notes: list[str] = []
        start = time.perf_counter()
        ok = False
        try:
            yield notes
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            within = elapsed <= budget_s
            verdict = "PASS" if ok and within else "FAIL"
            detail = "; ".join(notes)
            line = f"criterion {number:>2} {verdict}: {title} [{elapsed:.1f}s of {budget_s:.0f}s]"
            if detail:
                line += f" ({detail})"
            print(line)
            _ACCEPTANCE_LINES.append(line)
            if ok:
                assert within, f"over time budget: {elapsed:.1f}s > {budget_s}s"

    return run


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
