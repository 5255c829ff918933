import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "biadmm", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("biadmm")


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


def random_spd_pair(rng, n, p, shift_m=1.0):
    """M >= I (shifted Gram) and N >= 0 (Gram), both symmetric."""
    B = rng.standard_normal((n, n))
    C = rng.standard_normal((p, max(1, p - 1)))
    M = shift_m * np.eye(n) + B @ B.T / n
    N = C @ C.T / p
    return M, N


ACCEPTANCE_LINES = []


def record_acceptance(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
