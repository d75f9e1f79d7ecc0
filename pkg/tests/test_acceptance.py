"""Acceptance suite: one PASS/FAIL line per criterion.

Run ``python3 tests/test_acceptance.py`` for the bare report, or pytest, which
prints the same lines in its terminal summary.
"""

import math
import random
import time
from fractions import Fraction

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from psde.gaussian import GaussianExpr
from psde.groups import apply_group, flow_grid_check, group_law_check, hyperbola_point
from psde.numeric import delta_limit_test, integral_invariance, thermal_mass
from psde.operators import build_psde_L
from psde.scalar import ONE, Mobius, P, ScalarExpr, Substitution, T, X, linear_power
from psde.solutions import (
    generalized_hermite,
    heat_polynomial,
    heat_polynomial_by_operator,
    hermite,
    kernel,
    lift_standard,
    operator_power,
    p_operator,
    residual,
    thermal,
    x_operator,
)
from psde.symmetry import (
    A_NAMES,
    check_determining_equations,
    check_symmetry,
    classify_b,
    commutator_table,
    contraction_check,
    expected_A_table,
    general_symmetry_family,
    make_generator_A,
    make_generator_X,
    virasoro_check,
)

RESULTS = {}
SEED = 20240601
_TR = standard_transformations + (convert_xor,)
x_s, t_s, a_s, b_s = sympy.symbols("x t alpha beta")


def record(n, ok, detail):
    RESULTS[n] = (bool(ok), detail)
    print(f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def _sym(g: GaussianExpr):
    return sympy.expand(parse_expr(g.to_text(), transformations=_TR, local_dict={"x": x_s, "t": t_s}))


def test_criterion_01_commutator_table():
    start = time.perf_counter()
    tab = commutator_table([make_generator_A(i) for i in range(1, 10)], A_NAMES)
    ok_table = tab.same_as(expected_A_table())
    elapsed = time.perf_counter() - start
    nonzero = sum(1 for i in range(9) for j in range(i + 1, 9) if tab.bracket(i, j)[0])
    ok = ok_table and elapsed < 5
    assert record(1, ok, f"81 brackets exact, {nonzero} nonzero pairs, {elapsed:.2f}s (< 5s)")


def test_criterion_02_symmetry_criterion():
    L = build_psde_L()
    xis = [check_symmetry(L, make_generator_A(i)) for i in range(1, 10)]
    expect = [ScalarExpr.const(2) if i == 2 else T.scale(2) if i == 3 else ScalarExpr.const(0) for i in range(1, 10)]
    ok = all(a is not None and a == b for a, b in zip(xis, expect))
    assert record(2, ok, "xi = " + ", ".join(x.to_text() if x is not None else "None" for x in xis))


def test_criterion_03_determining_equations():
    rng = random.Random(SEED)
    basis_ok = all(check_determining_equations(make_generator_X(i))["all_pass"] for i in range(1, 10))
    fam_ok = True
    for _ in range(5):
        c = [Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(9)]
        fam_ok &= check_determining_equations(general_symmetry_family(c))["all_pass"]
    assert record(3, basis_ok and fam_ok, f"X1..X9 {basis_ok}; 5 random family members {fam_ok} (seed {SEED})")


_SOLUTIONS = [
    GaussianExpr.from_scalar(ONE),
    heat_polynomial(4),
    kernel("x_side", Fraction(1, 2), -1),
    kernel("p_side", 0, 0, -1, 2),
    thermal(2),
]


def _param(i, q):
    if i == 2:
        return 1 + abs(q)
    if i == 4:
        return hyperbola_point(q / 2)
    return q


def test_criterion_04_group_actions():
    half = Fraction(1, 2)
    bad = []
    for i in range(1, 10):
        for k, psi in enumerate(_SOLUTIONS):
            out = apply_group(i, _param(i, Fraction(1, 7)), psi, t_ref=half)
            if not residual(out).is_zero():
                bad.append(f"A{i}/sol{k}")
    pairs = [(Fraction(1, 5), Fraction(1, 9)), (Fraction(-1, 6), Fraction(1, 4)), (Fraction(1, 8), Fraction(-1, 3))]
    law_ok = all(group_law_check(i, _param(i, a), _param(i, b))["holds"] for i in range(1, 10) for a, b in pairs)
    assert record(4, not bad and law_ok, f"45 images residual-free {not bad}; 27 group-law checks {law_ok}")


def test_criterion_05_flow_cross_check():
    start = time.perf_counter()
    rep = flow_grid_check(1.0, 1e-3)
    elapsed = time.perf_counter() - start
    ok = rep["worst"] <= 1e-8 and rep["points"] == 27 and elapsed < 10
    assert record(5, ok, f"worst |RK4 - closed form| = {rep['worst']:.2e} over 27 points x 9 generators, {elapsed:.2f}s (< 10s)")


def test_criterion_06_polynomial_families():
    ok = True
    # listed values
    ok &= heat_polynomial(2) == GaussianExpr.from_scalar(X * X.scale(4) + T.scale(2))
    ok &= _sym(heat_polynomial(3)) == sympy.expand(8 * x_s**3 + 12 * x_s * t_s)
    ok &= _sym(hermite(2)) == 4 * x_s**2 - 2 and _sym(hermite(3)) == 8 * x_s**3 - 12 * x_s
    for al, be in ((Fraction(1), Fraction(1)), (Fraction(2, 3), Fraction(-5, 2)), (Fraction(3), Fraction(1, 4))):
        sub = {a_s: sympy.Rational(al.numerator, al.denominator), b_s: sympy.Rational(be.numerator, be.denominator)}
        ok &= _sym(generalized_hermite(2, al, be)) == sympy.expand((a_s**2 * x_s**2 - 2 * b_s).subs(sub))
        listed5 = a_s**5 * x_s**5 - 20 * a_s**3 * b_s * x_s**3 + 60 * a_s * b_s**2 * x_s
        ok &= _sym(generalized_hermite(5, al, be)) == sympy.expand(listed5.subs(sub))
    # closed sums for n <= 12 against independent sympy oracles
    for n in range(13):
        vn = sum(sympy.factorial(n) / (sympy.factorial(n - 2 * k) * sympy.factorial(k)) * (2 * x_s) ** (n - 2 * k) * t_s**k for k in range(n // 2 + 1))
        ok &= _sym(heat_polynomial(n)) == sympy.expand(vn)
        ok &= _sym(hermite(n)) == sympy.expand(sympy.hermite(n, x_s))
        al, be = Fraction(3, 2), Fraction(-2, 5)
        gn = sympy.expand(vn.subs({x_s: sympy.Rational(3, 4) * x_s, t_s: sympy.Rational(2, 5)}))
        ok &= _sym(generalized_hermite(n, al, be)) == gn
    # operator powers for n <= 20
    for n in range(21):
        ok &= heat_polynomial_by_operator(n) == heat_polynomial(n)
        ok &= operator_power(n, 2, 1) == hermite(n)
        ok &= operator_power(n, Fraction(3, 2), Fraction(2, 3) * 2 * Fraction(-2, 5)) == generalized_hermite(n, Fraction(3, 2), Fraction(-2, 5))
    assert record(6, ok, "listed values, closed sums n <= 12, operator powers n <= 20")


def test_criterion_07_kernels():
    x0, t0, p0, t1 = Fraction(1, 3), Fraction(-1, 2), Fraction(-1, 4), Fraction(2)
    res_ok = (
        residual(kernel("x_side", x0, t0), x_operator()).is_zero()
        and residual(kernel("p_side", 0, 0, p0, t1), p_operator()).is_zero()
        and residual(kernel("x_side", x0, t0)).is_zero()
        and residual(kernel("two_sided", x0, t0, p0, t1)).is_zero()
    )
    ratios = []
    delta_ok = True
    for kind, edge in (("x_side", 0), ("p_side", 1)):
        for phi in ("gauss", "lorentz", "cos"):
            rep = delta_limit_test(kind, phi, t_edge=edge)
            delta_ok &= rep["first_order"]
            ratios += [r["ratio"] for r in rep["rows"][1:]]
    detail = f"residuals zero {res_ok}; delta ratios per decade in [{min(ratios):.1f}, {max(ratios):.1f}]"
    assert record(7, res_ok and delta_ok, detail)


def test_criterion_08_thermal():
    res_ok = all(residual(thermal(n)).is_zero() for n in (0, 1, 5, Fraction(1, 3)))
    Q1 = thermal(0).subst(Substitution(t=Mobius.constant(1)))
    red_ok = Q1 == GaussianExpr.exp(-(X * X + P * P).scale(Fraction(1, 2)))
    masses = [thermal_mass(n) for n in (0, 1, 5)]
    mass_ok = all(m["pass"] for m in masses)
    worst = max(m["deviation_from_2pi"] for m in masses)
    assert record(8, res_ok and red_ok and mass_ok, f"residual zero {res_ok}; t=1 reduction {red_ok}; |mass - 2pi| <= {worst:.1e}")


def test_criterion_09_integral_invariance():
    reps = {g: integral_invariance(g, tol=1e-10) for g in (Fraction(1, 2), Fraction(1))}
    ok = all(r["equals_sqrt_pi"] and r["independent_of_t"] for r in reps.values())
    parts = [
        f"gamma={g}: value {r['rows'][0]['x_integral']:.10f}, t-spread {r['spread_over_t']:.1e}"
        for g, r in reps.items()
    ]
    note = "" if ok else " (the integrals equal sqrt(pi/gamma), so sqrt(pi) holds only at gamma=1)"
    assert record(9, ok, "; ".join(parts) + note)


def test_criterion_10_virasoro():
    rep = virasoro_check(4)
    ok = rep["virasoro_pass"] and rep["virasoro_pairs"] == 81 and rep["triple_pass"]
    ok = ok and rep["family_range"] == 3 and all(rep["families"].values())
    assert record(10, ok, f"{rep['virasoro_pairs']} pairs, triple {rep['triple_pass']}, families m in -3..3 {all(rep['families'].values())}")


def test_criterion_11_contraction():
    rep = contraction_check()
    ok = rep["polynomial_in_gamma"] and rep["limit_equals_listed_relations"]
    detail = (
        f"polynomial in gamma {rep['polynomial_in_gamma']}; limit equals operator algebra "
        f"{rep['limit_equals_operator_algebra']}; equals listed relations {rep['limit_equals_listed_relations']}"
    )
    if not ok:
        detail += (
            f" (mismatch {rep['listed_relation_mismatches']}; the listed set fails Jacobi at "
            f"{rep['listed_relations_jacobi_violations'][0]})"
        )
    assert record(11, ok, detail)


def test_criterion_12_classification():
    ok = True
    for b in (ONE, ScalarExpr.const(3), ScalarExpr.const(Fraction(-1, 2))):
        r = classify_b(b)
        ok &= r["class"] == "standard-reducible" and r["all_pass"]
    for b1, b0 in ((2, 1), (1, 3), (Fraction(1, 2), Fraction(5, 2))):
        r = classify_b(linear_power(b1, b0, -2))
        ok &= r["class"] == "standard-reducible" and r["checks"].get("standard_form_residuals_zero") is True and r["all_pass"]
    for alpha in (1, 3, 5):
        r = classify_b((T**alpha).scale(Fraction(2, 3)))
        ok &= r["class"] == "power-law" and r["dimension"] == 6 and r["checks"]["X6"]
    r = classify_b(T * T + 1)
    h2 = [r["checks"].get(f"h2_X{k}") for k in range(1, 6)]
    ok &= r["class"] == "generic" and r["dimension"] == 5 and all(h2)
    assert record(12, ok, "6 standard-reducible, 3 power-law with X6, t^2+1 generic with 5 fields")


def test_criterion_13_point_transformation():
    sols = [
        GaussianExpr.from_scalar(ONE),
        GaussianExpr.from_scalar(X),
        GaussianExpr.from_scalar(X * X + T.scale(2)),
        GaussianExpr.from_scalar(P * P - T.scale(2)),
        GaussianExpr.exp(X + P.scale(2) - T.scale(3)),
    ]
    ok = True
    for u in sols:
        Q, d = lift_standard(u)
        ok &= d["matched"] == "unscaled" and d["residual_zero"]["unscaled"] and d["scale_relation_holds"]
    assert record(13, ok, "5 lifts annihilated by Dt - Dxx + t^-2 Dpp; Q(2x,2p,t) solves the phase-space equation")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    print(f"{sum(ok for ok, _ in RESULTS.values())}/{len(RESULTS)} criteria pass")
