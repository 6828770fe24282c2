import pytest

_VERDICTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record ``(passed, detail)`` for the acceptance summary."""

    def record(passed, detail):
        _VERDICTS[request.node.name] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_VERDICTS):
        passed, detail = _VERDICTS[name]
        number = int(name.split("_")[1][1:])
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
