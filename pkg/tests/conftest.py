import os

import hypothesis
import pytest

from fairaudit import GroupRates

hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

# (prevalence, tpr, tnr); every metric is defined and non-degenerate on each
SCENARIOS = [
    (0.50, 0.50, 0.50),
    (0.50, 0.80, 0.60),
    (0.10, 0.70, 0.95),
    (0.20, 0.75, 0.80),
    (0.30, 0.79, 0.88),
    (0.22, 0.68, 0.91),
    (0.65, 0.55, 0.70),
    (0.80, 0.92, 0.40),
    (0.05, 0.60, 0.99),
    (0.40, 0.30, 0.85),
    (0.35, 0.95, 0.65),
    (0.15, 0.85, 0.50),
]


@pytest.fixture(params=SCENARIOS, ids=lambda s: "P{}-tpr{}-tnr{}".format(*s))
def rates(request):
    return GroupRates(*request.param)


@pytest.fixture
def income_rates():
    """Positive-prediction rates of the two groups in the income-model example."""
    return GroupRates.for_positive_rate(0.3478), GroupRates.for_positive_rate(0.4404)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(label: str, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
