import hypothesis
import numpy as np
import pytest

from lotto_prealloc import validate_instance

np.seterr(all="warn", under="ignore")

hypothesis.settings.register_profile("default", max_examples=200, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.load_profile("default")

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}: {detail}")


@pytest.fixture
def strong_a():
    """Regime I worked instance."""
    return validate_instance([0.5, 0.5], 1, 0.5, 1, 1)


@pytest.fixture
def weak_a():
    """Regime II worked instance."""
    return validate_instance([0.5, 0.5], 1, 0.2, 1, 2)


@pytest.fixture
def mixed():
    """Instance whose pre-allocation (0.5, 0) splits the battlefields."""
    return validate_instance([0.5, 0.5], 1, 0.5, 0.5, 1.2)
