import pytest

from pathoperad.hatgen import HatOracle, generate

_LINES: list[str] = []


@pytest.fixture(scope="session")
def tables():
    """generate(m, 10) for m = 1..4, built once."""
    cache = {}

    def get(m, budget=10):
        if (m, budget) not in cache:
            cache[m, budget] = generate(m, budget)
        return cache[m, budget]

    return get


@pytest.fixture(scope="session")
def oracle():
    cache = {}

    def get(m, strict=False):
        if (m, strict) not in cache:
            cache[m, strict] = HatOracle(m, strict_unary=strict)
        return cache[m, strict]

    return get


@pytest.fixture
def record():
    """record(n, ok, detail) -> one summary line per acceptance criterion."""

    def add(n, ok, detail=""):
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        _LINES.append(line)
        print(line)

    return add


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
        terminalreporter.write_line(line)
