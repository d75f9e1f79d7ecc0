from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psde.errors import InvalidCoefficient
from psde.gaussian import GaussianExpr
from psde.operators import (
    DiffOperator,
    build_general_L,
    build_psde_L,
    op_apply,
    op_commutator,
    op_compose,
    t_power,
)
from psde.scalar import ONE, P, ScalarExpr, T, X
from psde.solutions import kernel, standard_operator, unscaled_operator
from psde.symmetry import make_generator_A

from strategies import gaussians, scalars

Dx, Dp, Dt = DiffOperator.d("x"), DiffOperator.d("p"), DiffOperator.d("t")
L = build_psde_L()


def test_heisenberg_relation():
    assert op_compose(Dx, DiffOperator.multiplication(X)) == DiffOperator.from_terms([((0, 1, 0), X), ((0, 0, 0), ONE)])


def test_second_derivative_product_rule():
    f = X * X
    lhs = op_compose(DiffOperator.d("x", 2), DiffOperator.multiplication(f))
    rhs = DiffOperator.from_terms([((0, 2, 0), f), ((0, 1, 0), f.diff("x").scale(2)), ((0, 0, 0), f.diff("x").diff("x"))])
    assert lhs == rhs
    # the displayed identity [Dxx, f] psi = f_xx psi + 2 f_x psi_x with psi = x^3
    psi = X * X * X
    comm = op_commutator(DiffOperator.d("x", 2), DiffOperator.multiplication(f))
    expected = f.diff("x").diff("x") * psi + (f.diff("x") * psi.diff("x")).scale(2)
    assert op_apply(comm, psi) == expected


def test_L_t_commutator_is_identity():
    assert op_commutator(L, DiffOperator.multiplication(T)) == DiffOperator.identity()


@pytest.mark.parametrize("n", [-2, -1, 0, 1, 2, 3])
def test_L_tn_commutator(n):
    got = op_commutator(L, DiffOperator.multiplication(t_power(n)))
    want = DiffOperator.multiplication(t_power(n - 1).scale(n)) if n else DiffOperator.from_terms([])
    assert got == want


def test_table_entries():
    A = {i: make_generator_A(i) for i in range(1, 10)}
    assert op_commutator(A[2], A[1]) == A[1].scale(-2)
    assert op_commutator(A[7], A[5]) == DiffOperator.identity().scale(2)
    assert op_commutator(A[4], A[2]).is_zero()


def test_apply_examples():
    assert op_apply(L, ONE).is_zero()
    assert op_apply(L, X * X + T) == ScalarExpr.const(Fraction(1, 2))
    assert op_apply(L, (X * X).scale(4) + T.scale(2)).is_zero()
    assert op_apply(L, P * P + ScalarExpr.factor(0, -1).scale(Fraction(1, 2))).is_zero()
    e = GaussianExpr.exp(X.scale(2) + T)
    assert op_apply(Dx, e) == e * GaussianExpr.from_scalar(ScalarExpr.const(2))
    assert GaussianExpr.coerce(op_apply(L, kernel("x_side"))).is_zero()
    g = kernel("two_sided", 0, -1, 0, 1)
    assert op_apply(DiffOperator.identity(), g) == g


def test_general_L_constructors():
    assert build_general_L(1, -1) == standard_operator()
    assert build_general_L(1, -ScalarExpr.factor(0, -2)) == unscaled_operator()
    assert build_general_L(Fraction(1, 4), -ScalarExpr.factor(0, -2).scale(Fraction(1, 4))) == L
    with pytest.raises(InvalidCoefficient):
        build_general_L(1, X)


def test_parse_round_trip():
    A3 = make_generator_A(3)
    assert DiffOperator.parse(A3.to_text()) == A3


# -- properties ------------------------------------------------------------


@st.composite
def operators(draw):
    pairs = []
    for key in draw(st.lists(st.sampled_from([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 2, 0), (0, 1, 1)]), min_size=1, max_size=3, unique=True)):
        pairs.append((key, draw(scalars(depth=1))))
    return DiffOperator.from_terms(pairs)


@settings(max_examples=60)
@given(operators(), operators(), operators())
def test_composition_associative(P1, P2, P3):
    assert op_compose(op_compose(P1, P2), P3) == op_compose(P1, op_compose(P2, P3))


@settings(max_examples=100)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(1, 9))
def test_jacobi_on_generators(i, j, k):
    A, B, C = (make_generator_A(n) for n in (i, j, k))
    total = op_commutator(A, op_commutator(B, C)) + op_commutator(B, op_commutator(C, A)) + op_commutator(C, op_commutator(A, B))
    assert total.is_zero()


@settings(max_examples=60)
@given(operators(), operators(), gaussians())
def test_apply_compose_coherence(P1, P2, psi):
    assert GaussianExpr.coerce(op_apply(op_compose(P1, P2), psi)) == GaussianExpr.coerce(op_apply(P1, op_apply(P2, psi)))
