import pytest

ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    """Store a criterion verdict for the end-of-run summary."""
    def put(n: int, ok: bool, detail: str) -> None:
        ACCEPTANCE[n] = (ok, detail)
    return put


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
