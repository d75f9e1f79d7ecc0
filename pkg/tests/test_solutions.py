from fractions import Fraction
from math import comb, factorial

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psde.errors import InvalidParameter, InvalidWindow, PreconditionViolated
from psde.gaussian import GaussianExpr
from psde.operators import op_apply
from psde.scalar import Mobius, P, ScalarExpr, Substitution, T, to_mpf
from psde.solutions import (
    dual,
    generalized_hermite,
    generating_series_residual,
    heat_polynomial,
    heat_polynomial_by_operator,
    hermite,
    kernel,
    lift_standard,
    operator_power,
    p_operator,
    product,
    residual,
    thermal,
    x_operator,
)
from psde.symmetry import make_generator_A

G = GaussianExpr.parse
half = Fraction(1, 2)


def poly(text):
    return GaussianExpr.from_scalar(ScalarExpr.parse(text))


def test_heat_polynomial_examples():
    assert heat_polynomial(2) == poly("4*x^2 + 2*t")
    assert heat_polynomial(0) == poly("1")
    assert heat_polynomial(4) == poly("16*x^4 + 48*x^2*t + 12*t^2")
    assert heat_polynomial(3, scaled=False) == poly("x^3 + 6*x*t")
    with pytest.raises(ValueError):
        heat_polynomial(65)


def test_hermite_examples():
    assert hermite(3) == poly("8*x^3 - 12*x")
    assert hermite(0) == poly("1")
    assert hermite(2) == poly("4*x^2 - 2")


def _hermite_oracle(n, x):
    # three-term recurrence, independent of the closed sum
    h0, h1 = 1, 2 * x
    if n == 0:
        return h0
    for k in range(1, n):
        h0, h1 = h1, 2 * x * h1 - 2 * k * h0
    return h1


@pytest.mark.parametrize("n", range(0, 12))
def test_hermite_against_recurrence(n):
    for x in (Fraction(-3, 2), Fraction(1, 3), Fraction(2)):
        assert hermite(n).as_scalar().evaluate(x, 0, 1) == pytest.approx(float(_hermite_oracle(n, x)), rel=1e-12)


def test_generalized_hermite_examples():
    assert generalized_hermite(2, 1, 1) == poly("x^2 - 2")
    assert generalized_hermite(5, 1, 1) == poly("x^5 - 20*x^3 + 60*x")
    assert generalized_hermite(1, 3, 7) == poly("3*x")


@pytest.mark.parametrize("n", range(0, 10))
def test_generalized_hermite_special_cases(n):
    assert generalized_hermite(n, 2, 1) == hermite(n)
    assert generalized_hermite(n, 1, -T) == heat_polynomial(n, scaled=False)
    assert generalized_hermite(n, 2, -T) == heat_polynomial(n)
    # raising-operator rows: beta = 0 gives simple powers
    assert generalized_hermite(n, 3, 0) == poly(f"{3**n}*x^{n}") if n else poly("1")


@settings(max_examples=25)
@given(st.integers(0, 7), st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(lambda a: a != 0),
       st.fractions(min_value=-3, max_value=3, max_denominator=4))
def test_generalized_hermite_operator_form(n, alpha, beta):
    assert generalized_hermite(n, alpha, beta) == operator_power(n, alpha, 2 * beta / alpha)
    # at alpha = 2 the literal operator form coincides
    assert generalized_hermite(n, 2, beta) == operator_power(n, 2, beta)


@pytest.mark.parametrize("n", range(0, 21))
def test_heat_recurrence_and_operator(n):
    A5 = make_generator_A(5)
    assert heat_polynomial_by_operator(n) == heat_polynomial(n)
    assert GaussianExpr.coerce(op_apply(A5, heat_polynomial(n))) == heat_polynomial(n + 1)
    assert residual(heat_polynomial(n)).is_zero()


def test_heat_closed_sum_oracle():
    # v_n(2x, t) coefficients against binomial-style counting
    n = 6
    v = heat_polynomial(n, scaled=False).as_scalar()
    for x, t in ((Fraction(1, 2), Fraction(3)), (Fraction(-2), Fraction(1, 5))):
        ref = sum(factorial(n) // (factorial(n - 2 * k) * factorial(k)) * x ** (n - 2 * k) * t**k for k in range(n // 2 + 1))
        assert v.evaluate(x, 0, t) == pytest.approx(float(ref))


def test_x_kernel_closed_form():
    K = kernel("x_side")
    with mpmath.workprec(100):
        for x, t in ((0, Fraction(1, 3)), (Fraction(1, 2), 2)):
            ref = mpmath.exp(-to_mpf(x) ** 2 / to_mpf(t)) / mpmath.sqrt(mpmath.pi * to_mpf(t))
            assert abs(K.evaluate(x, 0, t) - ref) < mpmath.mpf(10) ** -25
    assert "pi" in K.to_text()


@settings(max_examples=25)
@given(st.fractions(min_value=-2, max_value=2, max_denominator=5), st.fractions(min_value=-3, max_value=0, max_denominator=4),
       st.fractions(min_value=-2, max_value=2, max_denominator=5), st.fractions(min_value=Fraction(1, 4), max_value=3, max_denominator=4))
def test_kernel_residuals(x0, t0, p0, t1):
    Kx, Kp, K = kernel("x_side", x0, t0), kernel("p_side", 0, 0, p0, t1), kernel("two_sided", x0, t0, p0, t1)
    assert residual(Kx, x_operator()).is_zero()
    assert residual(Kp, p_operator()).is_zero()
    assert residual(K).is_zero()
    assert K == Kx * Kp


def test_p_kernel_positive_and_window():
    Kp = kernel("p_side", 0, 0, Fraction(1, 2), 2)
    for t in (Fraction(1, 10), 1, Fraction(19, 10)):
        assert Kp.evaluate(Fraction(1, 3), Fraction(1, 4), t) > 0
    with pytest.raises(InvalidWindow):
        kernel("two_sided", 0, 2, 0, 1)
    with pytest.raises(InvalidWindow):
        kernel("p_side", 0, 0, 0, -1)
    with pytest.raises(ValueError):
        kernel("both")


def test_thermal():
    Q0 = thermal(0).subst(Substitution(t=Mobius.constant(1)))
    assert Q0 == G("exp(-1/2*x^2 - 1/2*p^2)")
    for nbar in (0, Fraction(1, 2), 3):
        assert residual(thermal(nbar)).is_zero()
    with pytest.raises(InvalidParameter):
        thermal(-1)


def test_thermal_at_t1_general():
    nbar = Fraction(3, 2)
    a = 2 * nbar + 1
    Q1 = thermal(nbar).subst(Substitution(t=Mobius.constant(1)))
    with mpmath.workprec(100):
        for x, p in ((0, 0), (1, -2)):
            ref = 2 / (a + 1) * mpmath.exp(-mpmath.mpf(x * x + p * p) / (a + 1))
            assert abs(Q1.evaluate(x, p, 1) - ref) < mpmath.mpf(10) ** -25


def test_dual_examples():
    assert dual(poly("x")) == poly("p")
    Kx = kernel("x_side")
    assert residual(dual(Kx), p_operator()).is_zero()
    for psi in (poly("x*p + t"), heat_polynomial(3), Kx, thermal(1)):
        assert dual(dual(psi)) == psi


_SOLUTIONS = [
    heat_polynomial(2),
    heat_polynomial(5),
    kernel("x_side", 1, -1),
    kernel("p_side", 0, 0, 1, 2),
    thermal(0),
    thermal(Fraction(1, 3)),
    product(heat_polynomial(1), kernel("p_side", 0, 0, -1, 3)),
]


@settings(max_examples=30)
@given(st.sampled_from(_SOLUTIONS), st.fractions(min_value=-2, max_value=2, max_denominator=3))
def test_dual_preserves_solutions(psi, c):
    psi = psi * GaussianExpr.from_scalar(ScalarExpr.const(c))
    assert residual(psi).is_zero()
    assert residual(dual(psi)).is_zero()


@settings(max_examples=25)
@given(st.fractions(min_value=-2, max_value=2, max_denominator=5), st.fractions(min_value=Fraction(1, 5), max_value=1, max_denominator=5),
       st.fractions(min_value=-2, max_value=2, max_denominator=5), st.fractions(min_value=Fraction(1, 2), max_value=4, max_denominator=4))
def test_two_sided_kernel_duality(x0, t0, p0, dt):
    t1 = t0 + dt
    K = kernel("two_sided", x0, t0, p0, t1)
    # the reference point lies in the image window (1/t1, 1/t0)
    t_ref = 2 / (t0 + t1)
    assert dual(K, t_ref) == kernel("two_sided", p0, 1 / t1, x0, 1 / t0)


def test_product_examples():
    assert product(heat_polynomial(2), poly("1")) == heat_polynomial(2)
    assert residual(product(heat_polynomial(2), poly("1"))).is_zero()
    Kx, Kp = kernel("x_side", 0, -1), kernel("p_side", 0, 0, 0, 1)
    assert product(Kx, Kp) == kernel("two_sided", 0, -1, 0, 1)
    assert product(poly("1"), poly("1")) == poly("1")


def test_product_preconditions():
    with pytest.raises(PreconditionViolated):
        product(poly("x*p"), poly("1"))
    with pytest.raises(PreconditionViolated):
        product(poly("1"), poly("x"))
    with pytest.raises(PreconditionViolated) as info:
        product(poly("x^2"), poly("1"))
    assert info.value.residual


def test_lift_examples():
    Q, d = lift_standard(poly("1"))
    assert Q == GaussianExpr.exp((P * P * T).scale(Fraction(-1, 4)), ScalarExpr.factor(0, half))
    assert d["matched"] == "unscaled" and d["scale_relation_holds"]
    Qx, dx = lift_standard(poly("x"))
    assert Qx == Q * poly("x") and dx["matched"] == "unscaled"
    Q2, d2 = lift_standard(poly("x^2 + 2*t"))
    assert d2["scale_relation_holds"]
    with pytest.raises(PreconditionViolated):
        lift_standard(poly("x^2"))


def test_generating_series():
    rep = generating_series_residual(3, Fraction(1, 2), "heat")
    assert rep["coefficients_exact"] and rep["partial_sum_zero"] == "1"
    assert heat_polynomial(3) == poly("8*x^3 + 12*x*t")
    rep = generating_series_residual(8, Fraction(1, 2), "hermite")
    assert rep["coefficients_exact"]
    row = rep["numeric"][0]
    assert row["bounded_by_first_omitted"] and row["abs_error"] > 0 and row["tail_mismatch"] < 1e-40
    rep = generating_series_residual(0, Fraction(1, 3), "heat")
    assert rep["partial_sum_zero"] == "1"


@settings(max_examples=15)
@given(st.integers(0, 10), st.fractions(min_value=-1, max_value=1, max_denominator=4),
       st.fractions(min_value=Fraction(1, 2), max_value=3, max_denominator=2), st.fractions(min_value=-2, max_value=2, max_denominator=3))
def test_generating_series_ghp(N, lam, alpha, beta):
    rep = generating_series_residual(N, lam, "ghp", alpha, beta)
    assert rep["coefficients_exact"]
    assert all(r["tail_mismatch"] < 1e-40 for r in rep["numeric"])
