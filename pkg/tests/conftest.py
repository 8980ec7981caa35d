from contextlib import contextmanager

import pytest

_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion.

    Usage: ``with criterion(3, "text") as note: ...``; ``note(msg)`` appends
    detail shown after the verdict.
    """

    @contextmanager
    def record(number, title):
        details = []
        try:
            yield details.append
        except BaseException as exc:
            line = f"FAIL  criterion {number:>2}: {title}  [{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}]"
            _LINES.append(line)
            print(line)
            raise
        line = f"PASS  criterion {number:>2}: {title}" + (f"  ({'; '.join(details)})" if details else "")
        _LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
