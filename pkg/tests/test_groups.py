import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psde.errors import IndexOutOfRange, InvalidParameter, PreconditionViolated, SingularFlow
from psde.gaussian import GaussianExpr
from psde.groups import (
    apply_group,
    closed_form_flow,
    compose_params,
    conformal_kernel_identity,
    flow_grid_check,
    flow_integrate,
    group_action,
    group_law_check,
    hyperbola_point,
    identity_param,
    infinitesimal_check,
    conformal_G3,
    transformed_heat_poly,
)
from psde.numeric import quadrature
from psde.scalar import ONE, Mobius, P, ScalarExpr, Substitution, T, X, linear_power, to_mpf
from psde.solutions import heat_polynomial, kernel, residual, thermal

half = Fraction(1, 2)

# solutions regular on a window containing t = 1/2
SOLUTIONS = [
    GaussianExpr.from_scalar(ONE),
    heat_polynomial(3),
    GaussianExpr.from_scalar(X * P + X * X + T.scale(half)),
    kernel("x_side", 0, -1),
    kernel("p_side", 0, 0, 1, 2),
    thermal(1),
]


def _param(i, q):
    if i == 2:
        return 1 + abs(q)
    if i == 4:
        return hyperbola_point(q / 4)
    return q


@settings(max_examples=60)
@given(st.integers(1, 9), st.fractions(min_value=Fraction(-1, 5), max_value=Fraction(1, 5), max_denominator=10), st.sampled_from(SOLUTIONS))
def test_solution_preservation(i, q, psi):
    out = apply_group(i, _param(i, q), psi, t_ref=half, check=True)
    assert residual(out).is_zero()


@pytest.mark.parametrize("i", range(1, 10))
def test_identity_at_zero(i):
    act = group_action(i, identity_param(i))
    assert act.multiplier == GaussianExpr.from_scalar(ONE)
    assert act.images() == (X, P, T)
    for psi in SOLUTIONS:
        assert apply_group(i, identity_param(i), psi, half) == psi


def test_apply_examples():
    lam = Fraction(2, 3)
    assert apply_group(5, lam, 1) == GaussianExpr.exp(X.scale(2 * lam) + T.scale(lam * lam))
    Q = GaussianExpr.exp(-(X * X) + P * T, X + P)
    assert apply_group(7, lam, Q) == Q.subst(Substitution(x=X + lam))
    assert apply_group(9, lam, Q).evaluate(1, 2, 1) == pytest.approx(math.exp(float(lam)) * float(Q.evaluate(1, 2, 1)))


def test_conformal_example_sign_convention():
    g = Fraction(1, 3)
    expected = GaussianExpr.exp(-(X * X) * linear_power(g, 1, -1).scale(g), linear_power(g, 1, -half))
    assert conformal_G3(g, 1) == expected
    assert apply_group(3, -g, 1) == expected
    # the true exponential with +g has the opposite signs
    assert apply_group(3, g, 1, Fraction(1, 2)) == GaussianExpr.exp((X * X) * linear_power(-g, 1, -1).scale(g), linear_power(-g, 1, -half))


def test_invalid_params():
    with pytest.raises(IndexOutOfRange):
        group_action(10, 0)
    with pytest.raises(InvalidParameter):
        group_action(2, 0)
    with pytest.raises(InvalidParameter):
        group_action(4, (Fraction(2), Fraction(1)))
    with pytest.raises(InvalidParameter):
        hyperbola_point(1)


def test_check_flag_rejects_nonsolution_image():
    # psi solves the PSDE, so the check passes; a non-solution is not checked
    apply_group(3, Fraction(1, 5), heat_polynomial(2), half, check=True)
    out = apply_group(3, Fraction(1, 5), GaussianExpr.from_scalar(X * X), half, check=True)
    assert not residual(out).is_zero()


def test_group_law_examples():
    assert group_law_check(7, Fraction(1, 2), Fraction(-3, 4))["holds"]
    assert group_law_check(3, Fraction(1, 5), Fraction(1, 7))["holds"]
    a, b = hyperbola_point(Fraction(1, 3)), hyperbola_point(Fraction(-1, 5))
    rep = group_law_check(4, a, b)
    assert rep["holds"]
    assert compose_params(4, a, b) == (a[0] * b[0] + a[1] * b[1], a[0] * b[1] + a[1] * b[0])


@settings(max_examples=40)
@given(st.integers(1, 9), st.fractions(min_value=Fraction(-1, 5), max_value=Fraction(1, 5), max_denominator=8),
       st.fractions(min_value=Fraction(-1, 5), max_value=Fraction(1, 5), max_denominator=8))
def test_group_law_property(i, a, b):
    assert group_law_check(i, _param(i, a), _param(i, b))["holds"]


def test_flow_pseudo_rotation():
    x, p, t = 0.5, -0.3, 0.75
    st_ = flow_integrate(4, 1.0, (x, p, t))
    sh, ch = math.sinh(1.0), math.cosh(1.0)
    assert abs(st_.X - (x * ch + t * p * sh)) < 1e-8
    sigma = math.exp(sh * sh * (x * x / t + p * p * t) + x * p * math.sinh(2.0))
    assert abs(st_.sigma - sigma) < 1e-8 * max(1, sigma)


def test_flow_phase():
    st_ = flow_integrate(9, 1.0, (0.3, 0.2, 0.5))
    assert (st_.X, st_.P, st_.T) == (0.3, 0.2, 0.5)
    assert abs(st_.sigma - math.e) < 1e-10


def test_flow_records_trajectory():
    st_ = flow_integrate(7, 0.5, (0.0, 0.0, 1.0), step=0.01, record_every=10)
    assert len(st_.trajectory) >= 5
    assert st_.as_row()[1] == pytest.approx(0.5)


def test_flow_singular():
    with pytest.raises(SingularFlow):
        flow_integrate(1, -2.0, (0.0, 0.0, 1.0))


def test_flow_grid_agreement():
    rep = flow_grid_check(1.0, 1e-3)
    assert rep["points"] == 27
    assert rep["worst"] <= 1e-8, rep["max_error"]


@settings(max_examples=10)
@given(st.integers(1, 9), st.floats(-0.5, 0.5), st.floats(-1, 1), st.floats(-1, 1), st.floats(0.25, 0.75))
def test_flow_matches_closed_form_random(i, lam, x, p, t):
    st_ = flow_integrate(i, lam, (x, p, t), step=2e-3)
    ref = closed_form_flow(i, lam, x, p, t)
    got = (st_.X, st_.P, st_.T, st_.sigma)
    for a, b in zip(got, ref):
        assert abs(a - float(b)) <= 1e-8 * max(1.0, abs(float(b)))


def test_exact_map_matches_closed_form_flow():
    lam = Fraction(1, 3)
    for i in (1, 3, 5, 6):
        act = group_action(i, lam, half)
        Xi, Pi, Ti = act.images()
        ref = closed_form_flow(i, float(lam), 0.3, -0.4, 0.5)
        assert float(Xi.evaluate(0.3, -0.4, 0.5)) == pytest.approx(float(ref[0]))
        assert float(Pi.evaluate(0.3, -0.4, 0.5)) == pytest.approx(float(ref[1]))
        assert float(Ti.evaluate(0.3, -0.4, 0.5)) == pytest.approx(float(ref[2]))


_PROBE = GaussianExpr.exp(-(X * X) - P * P * T, ONE + X * P + T)


@pytest.mark.parametrize("i", range(1, 10))
def test_infinitesimal_consistency(i):
    rep = infinitesimal_check(i, _PROBE)
    assert rep["errors"][-1] < 1e-2
    # a probe invariant under the flow gives rounding-level errors and no order
    if rep["errors"][0] > 1e-12:
        assert all(o > 1.8 for o in rep["orders"]), rep


def test_conformal_kernel_identity():
    rep = conformal_kernel_identity()
    assert rep["x_kernel_shape"] and rep["p_kernel_shape"]
    assert rep["p_kernel_constant_is_sqrt_t1_over_pi"]
    assert rep["thermal_product_times_2gamma"] and rep["all_pass"]
    assert conformal_kernel_identity(Fraction(-1, 2), 3, Fraction(1, 5))["all_pass"]


def _g3h_oracle(gamma, n, x, t):
    # closed form of the conformal image, written out directly
    g, x, t = to_mpf(gamma), to_mpf(x), to_mpf(t)
    d = 1 + g * t
    xs, ts = 2 * x / d, t / d
    v = sum(mpmath.factorial(n) / (mpmath.factorial(n - 2 * k) * mpmath.factorial(k)) * xs ** (n - 2 * k) * ts**k for k in range(n // 2 + 1))
    return d ** -0.5 * mpmath.exp(-g * x * x / d) * v


@pytest.mark.parametrize("gamma,n", [(1, 2), (Fraction(1, 3), 4), (2, 1)])
def test_transformed_heat_poly(gamma, n):
    F = transformed_heat_poly(gamma, n)
    assert residual(F).is_zero()
    with mpmath.workprec(120):
        for x, t in ((Fraction(1, 2), 1), (Fraction(-3, 2), Fraction(1, 4))):
            assert abs(F.evaluate(x, 0, t) - _g3h_oracle(gamma, n, x, t)) < mpmath.mpf(10) ** -25


def test_transformed_heat_poly_edges():
    assert transformed_heat_poly(Fraction(1, 2), 0) == conformal_G3(Fraction(1, 2), 1)
    with pytest.raises(InvalidParameter):
        transformed_heat_poly(0, 2)
    F = transformed_heat_poly(1, 2)
    val = quadrature(lambda y: F.evaluate(y, 0, 1), (-math.inf, math.inf), 1e-20, 128, 0, 1)
    assert mpmath.isfinite(val) and val > 0
