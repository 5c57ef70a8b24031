import numpy as np
import pytest

_ACCEPTANCE = {}


@pytest.fixture
def record_acceptance(request):
    """Store ``(passed, detail)`` for an acceptance criterion under its id."""

    def record(ac_id, passed, detail):
        _ACCEPTANCE[ac_id] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for ac_id in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[ac_id]
        terminalreporter.write_line(f"{ac_id} {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
