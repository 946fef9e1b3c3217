import pytest

CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion: call with (number, title, ok, detail)."""

    def record(num, title, ok, detail=""):
        CRITERIA[num] = (title, bool(ok), detail)
        line = "ACCEPTANCE %2d %s: %s%s" % (num, "PASS" if ok else "FAIL", title, " (%s)" % detail if detail else "")
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        title, ok, detail = CRITERIA[num]
        terminalreporter.write_line(
            "ACCEPTANCE %2d %s: %s%s" % (num, "PASS" if ok else "FAIL", title, " (%s)" % detail if detail else "")
        )
    passed = sum(ok for _, ok, _ in CRITERIA.values())
    terminalreporter.write_line("%d of %d acceptance criteria passed" % (passed, len(CRITERIA)))
