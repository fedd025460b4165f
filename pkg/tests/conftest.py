from fractions import Fraction

import pytest
from hypothesis import strategies as st

from extmod.grading import GroupElement, WeightSpec

WEIGHT_LISTS = [(2, 3, 7), (2, 4, 5), (3, 3, 4), (2, 2, 2, 3)]

# filled by the acceptance tests, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)


def oracle_normal_form(p, c, e):
    """Normal form by repeated subtraction, independent of divmod."""
    c, e = int(c), [int(x) for x in e]
    for i, pi in enumerate(p):
        while e[i] >= pi:
            e[i] -= pi
            c += 1
        while e[i] < 0:
            e[i] += pi
            c -= 1
    return c, tuple(e)


def degree(x: GroupElement) -> Fraction:
    """The rational degree with deg x_i = 1/p_i; a group homomorphism to Q."""
    return x.a + sum(Fraction(a, p) for a, p in zip(x.coeffs, x.spec.p))


@pytest.fixture
def s237():
    return WeightSpec.make((2, 3, 7))


@pytest.fixture
def s2223():
    return WeightSpec.make((2, 2, 2, 3))


specs = st.sampled_from([WeightSpec.make(p) for p in WEIGHT_LISTS])


@st.composite
def elements(draw, spec=None, lo=-3, hi=3):
    spec = draw(specs) if spec is None else spec
    a = draw(st.integers(lo, hi))
    coeffs = tuple(draw(st.integers(0, p - 1)) for p in spec.p)
    return GroupElement(spec, a, coeffs)


@st.composite
def element_triples(draw):
    spec = draw(specs)
    return tuple(draw(elements(spec)) for _ in range(3))
