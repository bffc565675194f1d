import pytest
from hypothesis import settings

# first calls into jitted kernels compile, which would trip per-example deadlines
settings.register_profile("tailsort", deadline=None)
settings.load_profile("tailsort")

_criteria = []


@pytest.fixture
def record_criterion():
    def record(ident, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] {ident}: {detail}"
        _criteria.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for line in _criteria:
            terminalreporter.write_line(line)
