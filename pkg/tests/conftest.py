import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# filled by test_acceptance, printed at the end of the run:
# criterion number -> (title, [(part, passed, detail), ...])
ACCEPTANCE: dict[int, tuple[str, list]] = {}


def record(criterion: int, title: str, part: str, passed: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(criterion, (title, []))[1].append((part, bool(passed), detail))


def acceptance_lines() -> list[str]:
    lines = []
    for k in sorted(ACCEPTANCE):
        title, parts = ACCEPTANCE[k]
        ok = all(p for _, p, _ in parts)
        body = "; ".join(f"{name}: {'pass' if p else 'FAIL'} ({detail})" for name, p, detail in parts)
        lines.append(f"[{'PASS' if ok else 'FAIL'}] {k}. {title}: {body}")
    return lines


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines():
            terminalreporter.write_line(line)
