import pytest
from hypothesis import settings

from .oracles import REF

settings.register_profile("default", deadline=None)
settings.load_profile("default")


@pytest.fixture
def ref():
    return REF


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    results = test_acceptance.RESULTS
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, title, secs = results[number]
        terminalreporter.write_line(
            f"AC{number} {'PASS' if ok else 'FAIL'} ({secs:.2f} s) {title}"
        )
