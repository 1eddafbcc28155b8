import pytest
from hypothesis import strategies as st

from ostshuffle.group import GroupElement, GroupParams

ACCEPTANCE_LINES: list[str] = []


@st.composite
def elements(draw, params: GroupParams):
    colors = draw(st.lists(st.integers(0, params.m - 1), min_size=params.n, max_size=params.n))
    perm = draw(st.permutations(range(params.n)))
    return GroupElement(params, tuple(colors), tuple(perm))


@pytest.fixture
def acceptance_report():
    def record(number: int, passed: bool, detail: str):
        ACCEPTANCE_LINES.append(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
