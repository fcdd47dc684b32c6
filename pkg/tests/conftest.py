import pytest

# criterion id -> (passed, detail lines), filled by test_acceptance
ACCEPTANCE: dict = {}


def record(criterion: int, title: str, checks: list[tuple[str, bool]]) -> bool:
    ok = all(passed for _, passed in checks)
    ACCEPTANCE[criterion] = (title, ok, checks)
    print(f"criterion {criterion} [{title}]: {'PASS' if ok else 'FAIL'}")
    for line, passed in checks:
        print(f"    {'ok  ' if passed else 'FAIL'} {line}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        title, ok, checks = ACCEPTANCE[c]
        tr.write_line(f"criterion {c} [{title}]: {'PASS' if ok else 'FAIL'}")
        for line, passed in checks:
            if not passed:
                tr.write_line(f"    FAIL {line}")
