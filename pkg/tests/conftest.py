from fractions import Fraction
from itertools import combinations

from hypothesis import strategies as st

from polyformality.algebra import Polynomial, PolyDiffOp, Polyvector, multi_index

VARS = 3

coefficients = st.fractions(min_value=-4, max_value=4, max_denominator=4)

monomials = st.lists(st.integers(1, VARS), max_size=3).map(lambda vs: multi_index((v, 1) for v in vs))

polynomials = st.dictionaries(monomials, coefficients, max_size=4).map(Polynomial)


@st.composite
def polyvectors(draw, degree=None, max_degree=3):
    k = draw(st.integers(0, max_degree)) if degree is None else degree
    keys = list(combinations(range(1, VARS + 1), k))
    chosen = draw(st.lists(st.sampled_from(keys), unique=True, max_size=len(keys))) if keys else []
    return Polyvector(k, {key: draw(polynomials) for key in chosen})


derivs = st.lists(st.integers(1, VARS), max_size=2).map(lambda vs: multi_index((v, 1) for v in vs))


@st.composite
def operators(draw, arity=None, max_arity=3):
    m = draw(st.integers(0, max_arity)) if arity is None else arity
    terms = draw(st.lists(st.tuples(polynomials, st.tuples(*[derivs] * m)), max_size=4))
    return PolyDiffOp(m, terms)


ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
