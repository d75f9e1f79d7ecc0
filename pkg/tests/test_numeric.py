import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psde.errors import EvaluationFailure, InvalidParameter, NonConvergent
from psde.numeric import (
    GridSpec,
    delta_limit_test,
    fd_residual,
    integral_invariance,
    quadrature,
    thermal_mass,
)
from psde.scalar import to_mpf
from psde.solutions import heat_polynomial, kernel, thermal

INF = math.inf
SMALL = GridSpec(x=(-0.5, 0.5), p=(0.3,), t=(0.5, 1.5))


def test_fd_heat_kernel_order_two():
    K = kernel("x_side", 0, -1)
    rep = fd_residual(K.to_callable(128), SMALL)
    assert rep.max_residual < 1e-4
    assert rep.order == pytest.approx(2, abs=0.1)
    assert rep.per_step[0] > rep.per_step[-1]


def test_fd_linear_and_quadratic():
    rep = fd_residual(lambda x, p, t: x, SMALL)
    assert rep.max_residual < 1e-25
    rep = fd_residual(lambda x, p, t: x * x, SMALL)
    assert rep.limit == pytest.approx(-0.5, abs=1e-12)


def test_fd_evaluation_failure():
    with pytest.raises(EvaluationFailure):
        fd_residual(lambda x, p, t: 1 / (x - x), SMALL)
    with pytest.raises(EvaluationFailure):
        fd_residual(lambda x, p, t: mpmath.inf, SMALL)


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(h=0)
    with pytest.raises(ValueError):
        GridSpec(refinements=2)


_EXACT = [heat_polynomial(3), kernel("two_sided", 0, -1, 0, 3), thermal(Fraction(1, 2))]


@settings(max_examples=6)
@given(st.sampled_from(_EXACT))
def test_exact_numeric_coherence(psi):
    rep = fd_residual(psi.to_callable(128), SMALL)
    assert rep.max_residual < 1e-3
    # polynomials of low degree are differenced exactly, leaving only rounding
    if rep.per_step[0] > 1e-25:
        assert rep.order > 1.8


def test_quadrature_examples():
    val = quadrature(lambda y: mpmath.exp(-y * y), (-INF, INF), 1e-12, 128, 0, 1)
    assert abs(val - mpmath.sqrt(mpmath.pi)) < 1e-12
    assert thermal_mass(1)["pass"]
    with pytest.raises(NonConvergent):
        quadrature(lambda y: 1 / y, (-1, 2), 1e-12)


@pytest.mark.parametrize("t", [Fraction(1, 4), Fraction(1), Fraction(4)])
def test_x_kernel_mass(t):
    K = kernel("x_side")
    val = quadrature(lambda y: K.evaluate(y, 0, t), (-INF, INF), 1e-12, 128, 0, math.sqrt(float(t)))
    assert abs(val - 1) < 1e-12


@settings(max_examples=10)
@given(st.fractions(min_value=Fraction(1, 10), max_value=Fraction(9, 10), max_denominator=10),
       st.fractions(min_value=-1, max_value=1, max_denominator=4))
def test_p_kernel_mass(frac, p0):
    t1 = Fraction(2)
    t = frac * t1
    K = kernel("p_side", 0, 0, p0, t1)
    width = mpmath.sqrt(to_mpf(t1 - t) / (2 * to_mpf(t) * to_mpf(t1)))
    val = quadrature(lambda y: K.evaluate(0, y, t), (-INF, INF), 1e-12, 128, to_mpf(p0), width)
    assert abs(val - 1) < 1e-12


@pytest.mark.parametrize("phi", ["gauss", "lorentz", "cos"])
@pytest.mark.parametrize("kind,edge", [("x_side", 0), ("p_side", 1)])
def test_delta_limits(kind, phi, edge):
    rep = delta_limit_test(kind, phi, t_edge=edge)
    assert rep["first_order"], rep["rows"]
    errs = [r["error"] for r in rep["rows"]]
    assert errs[0] > errs[1] > errs[2]


def test_delta_unit_function():
    rep = delta_limit_test("x_side", "one")
    assert rep["first_order"]
    assert all(abs(r["integral"] - 1) < 1e-15 for r in rep["rows"])


def test_delta_errors():
    with pytest.raises(InvalidParameter):
        delta_limit_test("p_side", "gauss", t_edge=0)
    with pytest.raises(ValueError):
        delta_limit_test("x_side", "sinc")


def test_integral_invariance_gamma_one():
    rep = integral_invariance(1)
    assert rep["equals_sqrt_pi"] and rep["independent_of_t"]
    assert rep["sqrt_pi"] == pytest.approx(1.7724538509)


def test_integral_invariance_general_gamma():
    # the value is sqrt(pi / gamma); it is independent of t for every gamma
    rep = integral_invariance(Fraction(1, 2))
    assert rep["independent_of_t"]
    assert rep["rows"][0]["x_integral"] == pytest.approx(rep["closed_form_sqrt_pi_over_gamma"], abs=1e-12)
    with pytest.raises(InvalidParameter):
        integral_invariance(0)


@settings(max_examples=8)
@given(st.fractions(min_value=0, max_value=5, max_denominator=4))
def test_thermal_mass_property(nbar):
    assert thermal_mass(nbar, Fraction(3, 2))["pass"]
