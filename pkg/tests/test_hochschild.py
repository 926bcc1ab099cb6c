from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from polyformality.algebra import ONE, ZERO, PolyDiffOp, Polynomial, Polyvector, mi_var, x
from polyformality.hochschild import cup, hkr, hochschild_d, hochschild_d_extensional

from conftest import operators, polynomials, polyvectors

IDENTITY = PolyDiffOp(1, [(ONE, ((),))])


def test_cup_evaluates_blockwise():
    a = PolyDiffOp(1, [(ONE, (mi_var(1),))])
    b = PolyDiffOp(1, [(ONE, (mi_var(2),))])
    assert cup(a, b).evaluate([x(1), x(2)]) == ONE


def test_cup_with_arity_zero_scales():
    theta = PolyDiffOp(2, [(x(1), (mi_var(2), ())), (ONE, (mi_var(1), mi_var(1)))])
    p = x(2) + 3
    assert cup(PolyDiffOp.constant(p), theta) == theta.multiply(p)
    assert cup(theta, PolyDiffOp.constant(p)) == theta.multiply(p)


def test_d_of_identity_is_product():
    # f*id(g) - id(f*g) + id(f)*g = f*g
    f, g = x(1) + 2, x(2, 2) - x(1)
    assert hochschild_d(IDENTITY).evaluate([f, g]) == f * g
    assert hochschild_d_extensional(IDENTITY, [x(1), x(2)]) == x(1) * x(2)


def test_d_of_constant_vanishes():
    c = PolyDiffOp.constant(x(1) + Fraction(1, 2))
    assert hochschild_d(c).is_zero()
    assert hochschild_d_extensional(c, [x(1)]) == ZERO


def test_d_squared_on_bidifferential():
    theta = PolyDiffOp(2, [(ONE, (mi_var(1), mi_var(2)))])
    assert hochschild_d(hochschild_d(theta)).is_zero()


def test_extensional_arity_check():
    with pytest.raises(ValueError):
        hochschild_d_extensional(IDENTITY, [x(1)])


def test_hkr_examples():
    assert hkr(Polyvector.basis(1)).evaluate([x(1, 2)]) == x(1).scale(2)
    assert hkr(Polyvector.basis(1, 2)).evaluate([x(1), x(2)]) == Polynomial.const(Fraction(1, 2))
    p = x(1) * x(3)
    assert hkr(Polyvector.function(p)) == PolyDiffOp.constant(p)


def test_hkr_matches_alternation_formula():
    # (1/2) Alt xi_1(f_1) xi_2(f_2) for xi_1 = x2 d1, xi_2 = d3
    xi1, xi2 = Polyvector.basis(1, coef=x(2)), Polyvector.basis(3)
    f, g = x(1) * x(3), x(1, 2) + x(3)
    expected = (x(2) * f.partial(mi_var(1)) * g.partial(mi_var(3))
                - x(2) * g.partial(mi_var(1)) * f.partial(mi_var(3))).scale(Fraction(1, 2))
    assert hkr(xi1.wedge(xi2)).evaluate([f, g]) == expected


@settings(max_examples=100, deadline=None)
@given(operators(max_arity=3))
def test_d_squared_zero(op):
    assert hochschild_d(hochschild_d(op)).is_zero()


@settings(max_examples=100, deadline=None)
@given(operators(max_arity=2), operators(max_arity=2))
def test_graded_leibniz(a, b):
    sign = -1 if a.arity % 2 else 1
    assert hochschild_d(cup(a, b)) == cup(hochschild_d(a), b) + cup(a, hochschild_d(b)).scale(sign)


@given(operators(max_arity=2), operators(max_arity=2), operators(max_arity=2))
def test_cup_associative(a, b, c):
    assert cup(cup(a, b), c) == cup(a, cup(b, c))


@settings(max_examples=100, deadline=None)
@given(polyvectors(max_degree=3))
def test_hkr_image_is_cocycle(g):
    assert hochschild_d(hkr(g)).is_zero()


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_extensional_matches_symbolic(data):
    op = data.draw(operators(max_arity=3))
    args = data.draw(st.lists(polynomials, min_size=op.arity + 1, max_size=op.arity + 1))
    assert hochschild_d_extensional(op, args) == hochschild_d(op).evaluate(args)
