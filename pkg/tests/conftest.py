import pytest

ACCEPTANCE = {}


@pytest.fixture
def verdict(request):
    """Record a PASS/FAIL line for an acceptance criterion.

    Usage: ``verdict(number, ok, detail)``; the line is printed immediately
    and again in the terminal summary.
    """

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
