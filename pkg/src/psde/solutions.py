"""Closed-form solutions: polynomial families, kernels, thermal states, lifts."""

from __future__ import annotations

from fractions import Fraction
from math import factorial

import mpmath

from .errors import (
    InvalidParameter,
    InvalidWindow,
    NoOperatorMatched,
    PreconditionViolated,
)
from .gaussian import GaussianExpr
from .operators import DiffOperator, build_general_L, build_psde_L, op_apply
from .scalar import ONE, ZERO, P, ScalarExpr, Substitution, T, X, linear_power, to_mpf

__all__ = [
    "HEAT_BOUND",
    "heat_polynomial",
    "heat_polynomial_by_operator",
    "hermite",
    "generalized_hermite",
    "operator_power",
    "x_operator",
    "p_operator",
    "standard_operator",
    "unscaled_operator",
    "kernel",
    "thermal",
    "dual",
    "product",
    "lift_standard",
    "generating_series_residual",
    "residual",
]

HEAT_BOUND = 64
_HALF = Fraction(1, 2)


def residual(psi, op: DiffOperator | None = None) -> GaussianExpr:
    """op(psi) (default: the phase-space operator) as a GaussianExpr."""
    op = build_psde_L() if op is None else op
    return GaussianExpr.coerce(op_apply(op, GaussianExpr.coerce(psi)))


# ---------------------------------------------------------------------------
# polynomial families


def _heat_sum(n: int, xscale, tval) -> ScalarExpr:
    """sum_k n!/((n-2k)! k!) (xscale x)^(n-2k) tval^k."""
    out = ZERO
    xs = X.scale(xscale)
    for k in range(n // 2 + 1):
        c = Fraction(factorial(n), factorial(n - 2 * k) * factorial(k))
        out = out + (xs ** (n - 2 * k) * tval**k).scale(c)
    return out


def heat_polynomial(n: int, scaled: bool = True, bound: int = HEAT_BOUND) -> GaussianExpr:
    """Heat polynomial v_n(x, t) from the closed sum; ``scaled`` gives v_n(2x, t)."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    if n > bound:
        raise ValueError(f"degree {n} exceeds the configured bound {bound}")
    return GaussianExpr.from_scalar(_heat_sum(n, 2 if scaled else 1, T))


def heat_polynomial_by_operator(n: int) -> GaussianExpr:
    """(2x + t d/dx)^n applied to 1."""
    from .symmetry import make_generator_A

    A5 = make_generator_A(5)
    psi = ONE
    for _ in range(n):
        psi = op_apply(A5, psi)
    return GaussianExpr.coerce(psi)


def hermite(n: int) -> GaussianExpr:
    """Physicists' Hermite polynomial H_n(x) = v_n(2x, -1)."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    return GaussianExpr.from_scalar(_heat_sum(n, 2, ScalarExpr.const(-1)))


def operator_power(n: int, alpha, beta) -> GaussianExpr:
    """(alpha x - beta d/dx)^n applied to 1; alpha, beta may depend on t."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    alpha, beta = ScalarExpr.coerce(alpha), ScalarExpr.coerce(beta)
    R = DiffOperator.from_terms([((0, 0, 0), alpha * X), ((0, 1, 0), -beta)])
    psi = ONE
    for _ in range(n):
        psi = op_apply(R, psi)
    return GaussianExpr.coerce(psi)


def generalized_hermite(n: int, alpha, beta) -> GaussianExpr:
    """Generalized Hermite polynomial v_n(alpha x, -beta).

    This is the family generated by exp(lam alpha x - beta lam^2); it equals
    operator_power(n, alpha, 2 beta / alpha), so the two agree at alpha = 2.
    ``alpha`` must be a rational constant; ``beta`` may depend on t.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    alpha, beta = Fraction(alpha), ScalarExpr.coerce(beta)
    out = ZERO
    ax = X.scale(alpha)
    for k in range(n // 2 + 1):
        c = Fraction(factorial(n), factorial(n - 2 * k) * factorial(k))
        out = out + (ax ** (n - 2 * k) * (-beta) ** k).scale(c)
    return GaussianExpr.from_scalar(out)


# ---------------------------------------------------------------------------
# one-variable operators


def x_operator() -> DiffOperator:
    """Dt - (1/4) Dx^2."""
    return DiffOperator.from_terms([((1, 0, 0), ONE), ((0, 2, 0), Fraction(-1, 4))])


def p_operator() -> DiffOperator:
    """Dt + 1/(4 t^2) Dp^2 (the backward equation)."""
    return DiffOperator.from_terms(
        [((1, 0, 0), ONE), ((0, 0, 2), ScalarExpr.factor(0, -2).scale(Fraction(1, 4)))]
    )


def standard_operator() -> DiffOperator:
    """Dt - Dxx + Dyy with y in the p slot."""
    return build_general_L(1, -1)


def unscaled_operator() -> DiffOperator:
    """Dt - Dxx + t^-2 Dpp."""
    return build_general_L(1, -ScalarExpr.factor(0, -2))


# ---------------------------------------------------------------------------
# kernels


def _x_kernel(x0, t0) -> GaussianExpr:
    dx = X - x0
    pre = ScalarExpr.pi_power(-1) * ScalarExpr.factor(-t0, -_HALF)
    return GaussianExpr.exp(-(dx * dx) * ScalarExpr.factor(-t0, -1), pre)


def _p_kernel(p0, t1) -> GaussianExpr:
    if t1 <= 0:
        raise InvalidWindow("the p-side kernel needs t1 > 0")
    dp = P - p0
    # sqrt(t t1 / (pi (t1 - t))), real and positive for 0 < t < t1
    pre = (
        ScalarExpr.pi_power(-1)
        * ScalarExpr.sqrt_const(t1)
        * ScalarExpr.factor(0, _HALF)
        * ScalarExpr.factor(-t1, -_HALF, -1)
    )
    # -t t1 (p - p0)^2 / (t1 - t) = t1 t (p - p0)^2 / (t - t1)
    arg = (dp * dp * T).scale(t1) * ScalarExpr.factor(-t1, -1)
    return GaussianExpr.exp(arg, pre)


def kernel(kind: str, x0=0, t0=0, p0=0, t1=1) -> GaussianExpr:
    """Gaussian kernels: ``x_side`` (t > t0), ``p_side`` (0 < t < t1) and their
    product ``two_sided`` on t0 < t < t1."""
    x0, t0, p0, t1 = (Fraction(v) for v in (x0, t0, p0, t1))
    if kind == "x_side":
        return _x_kernel(x0, t0)
    if kind == "p_side":
        return _p_kernel(p0, t1)
    if kind == "two_sided":
        if t0 >= t1:
            raise InvalidWindow(f"two-sided kernel needs t0 < t1, got t0={t0}, t1={t1}")
        return _x_kernel(x0, t0) * _p_kernel(p0, t1)
    raise ValueError(f"unknown kernel kind {kind!r}")


# ---------------------------------------------------------------------------
# thermal distributions


def thermal(nbar) -> GaussianExpr:
    """Squeezed thermal distribution with a = 2 nbar + 1:

    2 / sqrt((a + t)(a + 1/t)) exp(-x^2/(a + t) - p^2/(a + 1/t))."""
    nbar = Fraction(nbar)
    a = 2 * nbar + 1
    if a <= 0:
        raise InvalidParameter(f"2*nbar + 1 must be positive, got {a}")
    # sqrt((a+t)(a+1/t)) = sqrt(t + a) sqrt(a t + 1) / sqrt(t)
    pre = (
        ScalarExpr.factor(0, _HALF)
        * ScalarExpr.factor(a, -_HALF)
        * linear_power(a, 1, -_HALF)
    ).scale(2)
    arg = -(X * X) * ScalarExpr.factor(a, -1) - (P * P * T) * linear_power(a, 1, -1)
    return GaussianExpr.exp(arg, pre)


# ---------------------------------------------------------------------------
# duality, products, lifts


def dual(psi, t_ref=Fraction(1)) -> GaussianExpr:
    """psi(p, x, 1/t)."""
    return GaussianExpr.coerce(psi).subst(Substitution.exchange(t_ref))


def product(f, g) -> GaussianExpr:
    """f(x, t) g(p, t) for solutions f of the x-equation and g of the
    backward p-equation."""
    f, g = GaussianExpr.coerce(f), GaussianExpr.coerce(g)
    if f.depends_on("p"):
        raise PreconditionViolated("f must not depend on p")
    if g.depends_on("x"):
        raise PreconditionViolated("g must not depend on x")
    rf = residual(f, x_operator())
    if not rf.is_zero():
        raise PreconditionViolated("f does not solve the x-equation", residual=rf.to_text())
    rg = residual(g, p_operator())
    if not rg.is_zero():
        raise PreconditionViolated("g does not solve the backward p-equation", residual=rg.to_text())
    return f * g


def lift_standard(u, t_ref=Fraction(1)):
    """Map a solution u(x, y, t) of u_t = u_xx - u_yy to
    Q = t^(1/2) exp(-t p^2/4) u(x, p t, t).

    Returns (Q, descriptor); the descriptor names the operator annihilating Q
    and records the rescaling Q(2x, 2p, t) that solves the phase-space equation.
    """
    u = GaussianExpr.coerce(u)
    ru = residual(u, standard_operator())
    if not ru.is_zero():
        raise PreconditionViolated("u does not solve u_t = u_xx - u_yy", residual=ru.to_text())
    sub = Substitution(p=P * T, t_ref=Fraction(t_ref))
    Q = GaussianExpr.exp((P * P * T).scale(Fraction(-1, 4)), ScalarExpr.factor(0, _HALF)) * u.subst(sub)
    candidates = {
        "psd": build_psde_L(),
        "unscaled": unscaled_operator(),
    }
    res = {name: residual(Q, op) for name, op in candidates.items()}
    matched = [name for name, r in res.items() if r.is_zero()]
    if not matched:
        raise NoOperatorMatched("neither candidate operator annihilates the lifted function")
    rescaled = Q.subst(Substitution(x=X.scale(2), p=P.scale(2)))
    descriptor = {
        "matched": matched[0],
        "operator": candidates[matched[0]].to_text(),
        "residual_zero": {name: r.is_zero() for name, r in res.items()},
        "scale_relation": "Q(2x, 2p, t) solves Dt - 1/4 Dx^2 + 1/(4 t^2) Dp^2",
        "scale_relation_holds": residual(rescaled).is_zero(),
    }
    return Q, descriptor


# ---------------------------------------------------------------------------
# generating functions


def _family_params(family, alpha, beta):
    if family == "heat":
        return Fraction(2), -T
    if family == "hermite":
        return Fraction(2), ScalarExpr.const(1)
    if family == "ghp":
        if alpha is None or beta is None:
            raise ValueError("ghp family needs alpha and beta")
        return Fraction(alpha), ScalarExpr.coerce(beta)
    raise ValueError(f"unknown family {family!r}")


def generating_series_residual(
    N: int, lam, family: str = "heat", alpha=None, beta=None, points=None, bound: int = HEAT_BOUND
) -> dict:
    """Check exp(lam a x - b lam^2) = sum lam^n/n! P_n term by term.

    Exact part: the n-th polynomial (built by iterating the operator
    a x - (2b/a) d/dx on 1) equals n! times the lam^n Taylor coefficient of
    the generating function, for n <= N.  Numeric part: the truncated sum is
    compared with the generating function at sample points; the error is
    reported next to the first omitted term and to the summed tail.
    """
    if N < 0 or N > bound:
        raise ValueError(f"N must be in 0..{bound}")
    a, b = _family_params(family, alpha, beta)
    lam = Fraction(lam)
    ax = X.scale(a)
    # Taylor coefficients of exp(lam a x) exp(-b lam^2) by Cauchy product
    exact_ok = []
    polys = []
    for n in range(N + 1):
        c = ZERO
        for k in range(n // 2 + 1):
            c = c + (ax ** (n - 2 * k) * (-b) ** k).scale(
                Fraction(1, factorial(n - 2 * k) * factorial(k))
            )
        if a != 0:
            poly = operator_power(n, a, b.scale(2 / a)).as_scalar()
        else:
            poly = generalized_hermite(n, a, b).as_scalar()
        polys.append(poly)
        exact_ok.append((poly - c.scale(factorial(n))).is_zero())
    if points is None:
        points = [(1, 0, 1)] if family == "hermite" else [(1, 0, Fraction(1, 2))]
    numeric = []
    with mpmath.workprec(200):
        lam_mp = to_mpf(lam)
        eps = mpmath.mpf(2) ** -190
        for x, p, t in points:
            gen = (ax.scale(lam) - b.scale(lam * lam)).evaluate(x, p, t)
            exact_val = mpmath.exp(gen)
            partial = mpmath.mpf(0)
            for n in range(N + 1):
                partial += lam_mp**n * polys[n].evaluate(x, p, t) / factorial(n)
            # tail from v_{n+1}(y, s) = y v_n + 2 n s v_{n-1}, y = a x, s = -b
            y, s = ax.evaluate(x, p, t), -b.evaluate(x, p, t)
            v_prev, v = mpmath.mpf(0), mpmath.mpf(1)
            for n in range(N + 1):
                v_prev, v = v, y * v + 2 * n * s * v_prev
            tail = mpmath.mpf(0)
            first = None
            n, scale = N + 1, lam_mp ** (N + 1) / factorial(N + 1)
            small = 0
            while n < 5000:
                term = scale * v
                if first is None:
                    first = term
                tail += term
                small = small + 1 if abs(term) <= eps * (1 + abs(tail)) else 0
                if small >= 4:
                    break
                v_prev, v = v, y * v + 2 * n * s * v_prev
                n += 1
                scale *= lam_mp / n
            err = exact_val - partial
            numeric.append(
                {
                    "point": [str(x), str(p), str(t)],
                    "abs_error": float(abs(err)),
                    "first_omitted": float(abs(first)),
                    "bounded_by_first_omitted": bool(abs(err) <= abs(first)),
                    "tail_mismatch": float(abs(err - tail)),
                }
            )
    return {
        "family": family,
        "N": N,
        "lambda": str(lam),
        "coefficients_exact": all(exact_ok),
        "per_degree": exact_ok,
        "numeric": numeric,
        "partial_sum_zero": polys[0].to_text(),
    }
