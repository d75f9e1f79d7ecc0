"""Symmetry generators of the phase-space equation and the checks on them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    BasisNotClosed,
    IndexOutOfRange,
    InvalidCoefficient,
    NonIntegrableInFamily,
    SingularContraction,
)
from .lie import LieAlgebraTable, rref
from .operators import (
    DiffOperator,
    build_general_L,
    build_psde_L,
    op_commutator,
    op_compose,
    t_power,
)
from .scalar import ONE, ZERO, P, ScalarExpr, Substitution, T, X

__all__ = [
    "VectorField",
    "SIGNS",
    "make_generator_A",
    "make_generator_X",
    "vf_to_operator",
    "vf_bracket",
    "check_symmetry",
    "check_determining_equations",
    "general_symmetry_family",
    "commutator_table",
    "vf_commutator_table",
    "expected_A_table",
    "expected_X_table",
    "x_table_from_a_table",
    "determining_residuals",
    "exchange_involution",
    "classify_b",
    "h2_basis_for_b",
    "standard_form_conditions",
    "virasoro_check",
    "contraction_check",
    "A_NAMES",
    "X_NAMES",
]

A_NAMES = [f"A{i}" for i in range(1, 10)]
X_NAMES = [f"X{i}" for i in range(1, 10)]

# A_i = SIGNS[i-1] * vf_to_operator(X_i)
SIGNS = (1, 1, 1, 1, 1, -1, 1, 1, -1)


@dataclass(frozen=True)
class VectorField:
    """alpha Dt + beta Dx + gamma Dp + eta u Du (the second variable sits in p)."""

    alpha: ScalarExpr = ZERO
    beta: ScalarExpr = ZERO
    gamma: ScalarExpr = ZERO
    eta: ScalarExpr = ZERO

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "eta"):
            object.__setattr__(self, name, ScalarExpr.coerce(getattr(self, name)))
        if not self.alpha.is_t_only():
            raise InvalidCoefficient("alpha must depend on t only")

    def __add__(self, other):
        return VectorField(
            self.alpha + other.alpha,
            self.beta + other.beta,
            self.gamma + other.gamma,
            self.eta + other.eta,
        )

    def scale(self, c) -> "VectorField":
        return VectorField(
            self.alpha.scale(c), self.beta.scale(c), self.gamma.scale(c), self.eta.scale(c)
        )

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in (self.alpha, self.beta, self.gamma, self.eta))

    def components(self):
        return (self.alpha, self.beta, self.gamma, self.eta)

    def to_text(self, second="p") -> str:
        parts = []
        for c, mark in zip(self.components(), ("Dt", "Dx", "D" + second, "u*Du")):
            if c:
                parts.append(mark if c == ONE else f"({c.to_text()}) * {mark}")
        return " + ".join(parts) if parts else "0"

    def __str__(self):
        return self.to_text()


def _inv_t(n=1):
    return t_power(-n)


_HALF = Fraction(1, 2)


def make_generator_X(i: int) -> VectorField:
    """Basis vector field X_i, i = 1..9."""
    if not isinstance(i, int) or not 1 <= i <= 9:
        raise IndexOutOfRange(f"generator index must be in 1..9, got {i!r}")
    x, p, t = X, P, T
    fields = {
        1: (ONE, ZERO, -p * _inv_t(), p * p + _inv_t().scale(_HALF)),
        2: (t.scale(2), x, -p, ZERO),
        3: (t * t, x * t, ZERO, -(x * x + t.scale(_HALF))),
        4: (ZERO, t * p, x * _inv_t(), (x * p).scale(-2)),
        5: (ZERO, t, ZERO, x.scale(-2)),
        6: (ZERO, ZERO, -_inv_t(), p.scale(2)),
        7: (ZERO, ONE, ZERO, ZERO),
        8: (ZERO, ZERO, ONE, ZERO),
        9: (ZERO, ZERO, ZERO, ONE),
    }
    return VectorField(*fields[i])


def make_generator_A(i: int) -> DiffOperator:
    """Symmetry operator A_i, i = 1..9, written out directly."""
    if not isinstance(i, int) or not 1 <= i <= 9:
        raise IndexOutOfRange(f"generator index must be in 1..9, got {i!r}")
    x, p, t = X, P, T
    Dt, Dx, Dp = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    one = (0, 0, 0)
    terms = {
        1: [(Dt, ONE), (Dp, -p * _inv_t()), (one, -(p * p) - _inv_t().scale(_HALF))],
        2: [(Dt, t.scale(2)), (Dx, x), (Dp, -p)],
        3: [(Dt, t * t), (Dx, t * x), (one, x * x + t.scale(_HALF))],
        4: [(Dx, p * t), (Dp, x * _inv_t()), (one, (x * p).scale(2))],
        5: [(Dx, t), (one, x.scale(2))],
        6: [(Dp, _inv_t()), (one, p.scale(2))],
        7: [(Dx, ONE)],
        8: [(Dp, ONE)],
        9: [(one, ONE)],
    }
    return DiffOperator.from_terms(terms[i])


def vf_to_operator(V: VectorField) -> DiffOperator:
    """alpha Dt + beta Dx + gamma Dp - eta: u Du is replaced by -1."""
    return DiffOperator.from_terms(
        [((1, 0, 0), V.alpha), ((0, 1, 0), V.beta), ((0, 0, 1), V.gamma), ((0, 0, 0), -V.eta)]
    )


def _vf_apply(V: VectorField, f: ScalarExpr) -> ScalarExpr:
    return V.alpha * f.diff("t") + V.beta * f.diff("x") + V.gamma * f.diff("p")


def vf_bracket(V: VectorField, W: VectorField) -> VectorField:
    """Lie bracket of vector fields on (t, x, p, u) with linear u-components."""
    return VectorField(
        _vf_apply(V, W.alpha) - _vf_apply(W, V.alpha),
        _vf_apply(V, W.beta) - _vf_apply(W, V.beta),
        _vf_apply(V, W.gamma) - _vf_apply(W, V.gamma),
        _vf_apply(V, W.eta) - _vf_apply(W, V.eta),
    )


# ---------------------------------------------------------------------------
# symmetry criterion and determining equations


def check_symmetry(Lop: DiffOperator, A: DiffOperator) -> Optional[ScalarExpr]:
    """Return xi with [L, A] = xi L exactly, or None if no such xi exists."""
    if A.order() > 1:
        raise ValueError("check_symmetry expects a first-order operator")
    C = op_commutator(Lop, A)
    lead = Lop.coeff((1, 0, 0))
    if lead.is_zero():
        raise ValueError("L has no Dt term")
    try:
        xi = C.coeff((1, 0, 0)) * lead.inverse()
    except ZeroDivisionError:
        return None
    if (C - Lop.scale(xi)).is_zero():
        return xi
    return None


DETERMINING_EQUATIONS = ("od1", "od2", "od3", "od4", "od5", "od6")


def determining_residuals(V: VectorField) -> dict:
    a, b, g, e = V.components()
    t2 = T * T

    def d(f, *vs):
        for v in vs:
            f = f.diff(v)
        return f

    return {
        "od1": t2 * d(g, "x") - d(b, "p"),
        "od2": T * (d(b, "x") - d(g, "p")) - a,
        "od3": t2 * d(g, "x", "x") - d(g, "p", "p") - (t2 * d(g, "t")).scale(4) + d(e, "p").scale(2),
        "od4": t2 * d(b, "x", "x") - d(b, "p", "p") - (t2 * d(e, "x")).scale(2) - (t2 * d(b, "t")).scale(4),
        "od5": d(b, "x").scale(2) - d(a, "t"),
        "od6": d(e, "p", "p") - t2 * d(e, "x", "x") + (t2 * d(e, "t")).scale(4),
    }


def check_determining_equations(V: VectorField) -> dict:
    """Per-equation report {name: {"pass": bool, "residual": text}}."""
    res = determining_residuals(V)
    report = {k: {"pass": r.is_zero(), "residual": r.to_text()} for k, r in res.items()}
    report["all_pass"] = all(v["pass"] for k, v in report.items() if k != "all_pass")
    return report


def general_symmetry_family(c: Sequence) -> VectorField:
    """Nine-parameter symmetry field from the integrated determining system.

    The coefficients are those of sum c_i A_i written as a vector field, so the
    result equals sum c_i * SIGNS[i] * X_i."""
    if len(c) != 9:
        raise ValueError("need nine parameters")
    c1, c2, c3, c4, c5, c6, c7, c8, c9 = (Fraction(v) for v in c)
    t, x, p = T, X, P
    it = _inv_t()
    alpha = (t * t).scale(c3) + t.scale(2 * c2) + c1
    beta = (x * t).scale(c3) + x.scale(c2) + (t * p).scale(c4) + t.scale(c5) + c7
    gamma = (
        -p.scale(c2)
        - (p * it).scale(c1)
        + (x * it).scale(c4)
        + it.scale(c6)
        + c8
    )
    eta_A = (
        (x * x + t.scale(_HALF)).scale(c3)
        - (p * p + it.scale(_HALF)).scale(c1)
        + (x * p).scale(2 * c4)
        + x.scale(2 * c5)
        + p.scale(2 * c6)
        + c9
    )
    return VectorField(alpha, beta, gamma, -eta_A)


# ---------------------------------------------------------------------------
# commutator tables


def _op_coords(Pop: DiffOperator) -> dict:
    """Linear coordinates of an operator: partial-fraction pieces of each
    (derivative key, monomial) coefficient."""
    out = {}
    for key, coef in Pop.terms:
        for mono, rf in coef.terms:
            poly, parts = rf.partial_fractions()
            for k, v in enumerate(poly):
                if v:
                    out[(key, mono, "poly", k)] = v
            for (b, j), v in parts.items():
                out[(key, mono, b, j)] = v
    return out


def _solve_in_span(vec_coords, target_coords):
    """Rational coefficients a with sum a_i vec_i = target, or None."""
    atoms = sorted(
        set().union(*[set(v) for v in vec_coords], set(target_coords)), key=repr
    )
    n = len(vec_coords)
    rows = [[v.get(a, Fraction(0)) for v in vec_coords] + [target_coords.get(a, Fraction(0))] for a in atoms]
    if not rows:
        return [Fraction(0)] * n
    red, pivots = rref(rows)
    if n in pivots:
        return None
    sol = [Fraction(0)] * n
    for r, pc in zip(red, pivots):
        sol[pc] = r[n]
    return sol


def commutator_table(basis: Sequence[DiffOperator], names: Optional[Sequence[str]] = None) -> LieAlgebraTable:
    """Structure constants of the span of ``basis`` plus an identity slot."""
    basis = list(basis)
    names = list(names) if names is not None else [f"B{i + 1}" for i in range(len(basis))]
    coords = [_op_coords(b) for b in basis]
    ident = _op_coords(DiffOperator.identity())
    central_needed = _solve_in_span(coords, ident) is None
    cols = coords + ([ident] if central_needed else [])
    n = len(basis)
    br = {}
    for i in range(n):
        for j in range(i + 1, n):
            C = op_commutator(basis[i], basis[j])
            sol = _solve_in_span(cols, _op_coords(C))
            if sol is None:
                raise BasisNotClosed(
                    f"[{names[i]}, {names[j]}] leaves the span", residual=C.to_text()
                )
            vec = {k: sol[k] for k in range(n) if sol[k] != 0}
            cen = sol[n] if central_needed else 0
            br[(i, j)] = (vec, cen)
    return LieAlgebraTable.from_brackets(names, br)


def _vf_coords(V: VectorField) -> dict:
    out = {}
    for slot, coef in enumerate(V.components()):
        for k, v in _op_coords(DiffOperator.multiplication(coef)).items():
            out[(slot,) + k] = v
    return out


def vf_commutator_table(fields: Sequence[VectorField], names=None) -> LieAlgebraTable:
    """Structure constants of a span of vector fields under vf_bracket."""
    fields = list(fields)
    names = list(names) if names is not None else [f"V{i + 1}" for i in range(len(fields))]
    coords = [_vf_coords(v) for v in fields]
    n = len(fields)
    br = {}
    for i in range(n):
        for j in range(i + 1, n):
            W = vf_bracket(fields[i], fields[j])
            sol = _solve_in_span(coords, _vf_coords(W))
            if sol is None:
                raise BasisNotClosed(f"[{names[i]}, {names[j]}] leaves the span", residual=W.to_text())
            br[(i, j)] = ({k: sol[k] for k in range(n) if sol[k] != 0}, 0)
    return LieAlgebraTable.from_brackets(names, br)


# Expected A-basis relations, one row per table row: [row, column] = value.
# Keys are generator numbers; value maps generator number -> coefficient,
# with the bare number 2 of the table written as 2 * A9.
_EXPECTED_A = {
    (2, 1): {1: -2}, (2, 3): {3: 2}, (2, 4): {}, (2, 7): {7: -1}, (2, 5): {5: 1},
    (2, 8): {8: 1}, (2, 6): {6: -1},
    (1, 3): {2: 1}, (1, 4): {}, (1, 7): {}, (1, 5): {7: 1}, (1, 8): {6: 1}, (1, 6): {},
    (3, 4): {}, (3, 7): {5: -1}, (3, 5): {}, (3, 8): {}, (3, 6): {8: -1},
    (4, 7): {6: -1}, (4, 5): {8: -1}, (4, 8): {5: -1}, (4, 6): {7: -1},
    (7, 5): {9: 2}, (7, 8): {}, (7, 6): {},
    (5, 8): {}, (5, 6): {},
    (8, 6): {9: 2},
}

# Expected X-basis relations; unlisted brackets vanish.
_EXPECTED_X = {
    (1, 2): {1: 2}, (1, 3): {2: 1}, (1, 5): {7: 1}, (1, 8): {6: -1},
    (2, 3): {3: 2}, (2, 5): {5: 1}, (2, 6): {6: -1}, (2, 7): {7: -1},
    (2, 8): {8: 1}, (3, 6): {8: 1}, (3, 7): {5: -1}, (4, 5): {8: -1},
    (4, 6): {7: 1}, (4, 7): {6: 1}, (4, 8): {5: -1}, (5, 7): {9: 2},
    (6, 8): {9: -2},
}


def _table_from_relations(rel, names) -> LieAlgebraTable:
    br = {}
    for (i, j), vec in rel.items():
        br[(i - 1, j - 1)] = ({k - 1: v for k, v in vec.items()}, 0)
    return LieAlgebraTable.from_brackets(names, br)


def expected_A_table() -> LieAlgebraTable:
    """Transcribed A-basis commutator table (all 36 pairs)."""
    return _table_from_relations(_EXPECTED_A, A_NAMES)


def expected_X_table() -> LieAlgebraTable:
    """Transcribed X-basis commutation relations."""
    return _table_from_relations(_EXPECTED_X, X_NAMES)


def x_table_from_a_table(tab: LieAlgebraTable) -> LieAlgebraTable:
    """Apply the sign vector: c^X_ij^k = s_i s_j s_k c^A_ij^k."""
    br = {}
    for i in range(tab.dim):
        for j in range(i + 1, tab.dim):
            vec, cen = tab.bracket(i, j)
            br[(i, j)] = ({k: v * (SIGNS[i] * SIGNS[j] * SIGNS[k]) for k, v in vec.items()}, cen)
    return LieAlgebraTable.from_brackets(X_NAMES, br)


# ---------------------------------------------------------------------------
# discrete symmetry


def exchange_involution(Pop: DiffOperator, t_ref=Fraction(1)) -> DiffOperator:
    """Image of an operator under x <-> p, t -> 1/t.

    Coefficients are substituted; Dx and Dp swap and Dt becomes -t^2 Dt."""
    sub = Substitution.exchange(t_ref)
    dt_new = DiffOperator.from_terms([((1, 0, 0), -(T * T))])
    dx_new = DiffOperator.d("p")
    dp_new = DiffOperator.d("x")
    out = DiffOperator.from_terms([])
    for (a, b, c), coef in Pop.terms:
        term = DiffOperator.multiplication(coef.subst(sub))
        for _ in range(a):
            term = op_compose(term, dt_new)
        for _ in range(b):
            term = op_compose(term, dx_new)
        for _ in range(c):
            term = op_compose(term, dp_new)
        out = out + term
    return out


# ---------------------------------------------------------------------------
# classification of the generalized equation


def standard_form_conditions(b: ScalarExpr, K: ScalarExpr):
    """Residuals (4 b K' + K b', 2 b b'' - 3 b'^2)."""
    b, K = ScalarExpr.coerce(b), ScalarExpr.coerce(K)
    for name, c in (("b", b), ("K", K)):
        if not c.is_t_only():
            raise InvalidCoefficient(f"{name}(t) must depend on t only")
    db = b.diff("t")
    r1 = (b * K.diff("t")).scale(4) + K * db
    r2 = (b * db.diff("t")).scale(2) - (db * db).scale(3)
    return r1, r2


def h2_basis_for_b(b) -> list:
    """The five Heisenberg fields of u_t = u_xx + b(t) u_yy (y in the p slot)."""
    b = ScalarExpr.coerce(b)
    if not b.is_t_only():
        raise InvalidCoefficient("b(t) must depend on t only")
    B = b.antiderivative_t()
    return [
        VectorField(ZERO, T, ZERO, X.scale(-_HALF)),
        VectorField(ZERO, ONE, ZERO, ZERO),
        VectorField(ZERO, ZERO, B, P.scale(-_HALF)),
        VectorField(ZERO, ZERO, ONE, ZERO),
        VectorField(ZERO, ZERO, ZERO, ONE),
    ]


def _scaling_field(alpha_exp) -> VectorField:
    return VectorField(T.scale(2), X, P.scale(alpha_exp + 1), ZERO)


def _standard_K(b: ScalarExpr) -> Optional[ScalarExpr]:
    """K = b^(-1/4) up to a constant, for b constant or c (t + s)^-2."""
    if b.is_rational_constant():
        return ONE
    if len(b.terms) != 1:
        return None
    mono, rf = b.terms[0]
    if mono.xdeg or mono.pdeg or mono.sig or mono.pi2 or mono.rad != 1:
        return None
    if len(rf.num) == 1 and len(rf.den) == 1 and rf.den[0][1] == 2:
        return ScalarExpr.factor(rf.den[0][0], _HALF)
    return None


def classify_b(b) -> dict:
    """Symmetry class of u_t = u_xx + b(t) u_yy."""
    b = ScalarExpr.coerce(b)
    if b.is_zero() or not b.is_t_only():
        raise InvalidCoefficient("b(t) must be a nonzero function of t")
    Lb = build_general_L(1, b)
    _, r2 = standard_form_conditions(b, ONE)
    pl = b.power_law()
    record = {
        "b": b.to_text(),
        "standard_condition_residual": r2.to_text(),
        "power_law": None if pl is None else {"b0": str(pl[0]), "alpha": str(pl[1])},
    }
    checks = {}
    try:
        fields = h2_basis_for_b(b)
        for k, V in enumerate(fields, 1):
            xi = check_symmetry(Lb, vf_to_operator(V))
            checks[f"h2_X{k}"] = xi is not None and xi.is_zero()
        h2_ok = all(checks.values())
        record["h2_basis"] = [V.to_text("y") for V in fields]
    except NonIntegrableInFamily as exc:
        h2_ok = None
        record["h2_basis"] = None
        record["h2_note"] = str(exc)
    if r2.is_zero():
        record["class"] = "standard-reducible"
        record["dimension"] = 9
        K = _standard_K(b)
        if K is not None:
            r1, _ = standard_form_conditions(b, K)
            record["K"] = K.to_text()
            checks["standard_form_residuals_zero"] = r1.is_zero()
    elif pl is not None:
        record["class"] = "power-law"
        record["dimension"] = 6
    else:
        record["class"] = "generic"
        record["dimension"] = 5
    if pl is not None:
        alpha = pl[1]
        X6 = _scaling_field(alpha)
        xi = check_symmetry(Lb, vf_to_operator(X6))
        checks["X6"] = xi is not None and xi == 2
        record["X6"] = X6.to_text("y")
        record["maximal"] = alpha in (0, -2)
    record["checks"] = checks
    record["all_pass"] = all(checks.values()) and h2_ok is not False
    return record


# ---------------------------------------------------------------------------
# Virasoro realisation


def _tL(m: int, L: DiffOperator) -> DiffOperator:
    return L.scale(t_power(m))


def virasoro_check(m_range: int = 6) -> dict:
    """d_n = -t^(n+1) L: [d_m, d_n] = (m - n) d_(m+n); the (L, tL, t^2 L)
    triple; brackets of t^m L with the sl(2) generators."""
    L = build_psde_L()
    A1, A2, A3 = (make_generator_A(i) for i in (1, 2, 3))
    K0 = A2.scale(_HALF)
    d = {n: -_tL(n + 1, L) for n in range(-2 * m_range, 2 * m_range + 1)}
    failures = []
    pairs = 0
    for m in range(-m_range, m_range + 1):
        for n in range(-m_range, m_range + 1):
            pairs += 1
            lhs = op_commutator(d[m], d[n])
            rhs = d[m + n].scale(m - n)
            if not (lhs - rhs).is_zero():
                failures.append(f"[d{m},d{n}]")
    tL, t2L = _tL(1, L), _tL(2, L)
    triple = {
        "[tL,L]=-L": (op_commutator(tL, L) + L).is_zero(),
        "[tL,t^2L]=t^2L": (op_commutator(tL, t2L) - t2L).is_zero(),
        "[L,t^2L]=2tL": (op_commutator(L, t2L) - tL.scale(2)).is_zero(),
    }
    fam = {"K+": [], "K0": [], "K-": [], "K0=A2": []}
    r = min(m_range, 3)
    for m in range(-r, r + 1):
        tm = _tL(m, L)
        fam["K+"].append((op_commutator(tm, A3) - _tL(m + 1, L).scale(2 - m)).is_zero())
        fam["K0"].append((op_commutator(tm, K0) - tm.scale(1 - m)).is_zero())
        fam["K-"].append((op_commutator(tm, A1) - _tL(m - 1, L).scale(-m)).is_zero())
        fam["K0=A2"].append((op_commutator(tm, A2) - tm.scale(2 * (1 - m))).is_zero())
    families = {k: all(v) for k, v in fam.items()}
    return {
        "range": m_range,
        "virasoro_pairs": pairs,
        "virasoro_failures": failures,
        "virasoro_pass": not failures,
        "triple": triple,
        "triple_pass": all(triple.values()),
        "family_range": r,
        "families": families,
        "normalisation": "K+ = A3, K- = A1, K0 = A2/2; with K0 = A2 the coefficient is 2(1-m)",
        "all_pass": not failures and all(triple.values()) and all(families.values()),
    }


# ---------------------------------------------------------------------------
# contraction of so(3,1)

CONTRACTION_NAMES = ["J", "D1+", "D2+", "D1-", "D2-", "C"]
# new position -> index in the (J12, J13, J14, J23, J24, J34) basis
CONTRACTION_ORDER = [0, 1, 3, 2, 4, 5]
CONTRACTION_SCALING = [0, 1, 1, 1, 1, 2]


def _listed_h2_relations() -> LieAlgebraTable:
    """[J, D1+-] = -D2+-, [J, D2+-] = -D1+-, [D1-, D1+] = [D2-, D2+] = C,
    everything else zero (C plays the role of 2)."""
    J, D1p, D2p, D1m, D2m, C = range(6)
    br = {
        (J, D1p): ({D2p: -1}, 0),
        (J, D1m): ({D2m: -1}, 0),
        (J, D2p): ({D1p: -1}, 0),
        (J, D2m): ({D1m: -1}, 0),
        (D1m, D1p): ({C: 1}, 0),
        (D2m, D2p): ({C: 1}, 0),
    }
    return LieAlgebraTable.from_brackets(CONTRACTION_NAMES, br)


def contraction_check(signs=(1, -1, -1, -1)) -> dict:
    """Scale so(3,1) by gamma^(0,1,1,1,1,2), take gamma -> 0, and compare with
    the operator algebra spanned by (A4, A5, A8, A7, A6, 2 A9)."""
    from .lie import contract, so31_table

    tab = contract(so31_table(signs), CONTRACTION_SCALING, CONTRACTION_NAMES, CONTRACTION_ORDER)
    report = {"parametric": tab.to_dict(), "jacobi": tab.jacobi_holds()}
    try:
        lim = tab.limit()
        report["polynomial_in_gamma"] = True
    except SingularContraction as exc:
        report["polynomial_in_gamma"] = False
        report["error"] = str(exc)
        report["all_pass"] = False
        return report
    ops = [make_generator_A(i) for i in (4, 5, 8, 7, 6)] + [make_generator_A(9).scale(2)]
    realized = commutator_table(ops, CONTRACTION_NAMES)
    listed = _listed_h2_relations()
    report["limit"] = lim.to_dict()
    report["limit_equals_operator_algebra"] = lim.same_as(realized)
    report["operator_mismatches"] = [list(m) for m in lim.mismatches(realized)]
    report["listed_relation_mismatches"] = [list(m) for m in lim.mismatches(listed)]
    # the listed set is not a Lie algebra, so no limit can equal it
    report["listed_relations_jacobi"] = listed.jacobi_holds()
    report["listed_relations_jacobi_violations"] = [list(v) for v in listed.jacobi_violations()]
    report["limit_equals_listed_relations"] = lim.same_as(listed)
    report["all_pass"] = report["jacobi"] and report["limit_equals_operator_algebra"]
    return report
