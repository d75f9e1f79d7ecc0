"""Linear differential operators in (t, x, p) with exact coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import InvalidCoefficient
from .gaussian import GaussianExpr
from .scalar import ONE, ZERO, ScalarExpr

__all__ = [
    "DiffOperator",
    "GeneralizedL",
    "op_compose",
    "op_commutator",
    "op_apply",
    "build_psde_L",
    "build_general_L",
]

_VARS = ("t", "x", "p")


def _diff_multi(f, key):
    for var, n in zip(_VARS, key):
        for _ in range(n):
            f = f.diff(var)
    return f


class DiffOperator:
    """sum_k c_k(x, p, t) Dt^a Dx^b Dp^c, one term per derivative triple."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=()):
        # tuple of ((dt, dx, dp), ScalarExpr) sorted by key, coefficients nonzero
        self.terms = terms
        self._hash = None

    @classmethod
    def _from_map(cls, m):
        return cls(tuple(sorted((k, v) for k, v in m.items() if not v.is_zero())))

    @classmethod
    def from_terms(cls, pairs) -> "DiffOperator":
        m = {}
        for key, c in pairs:
            c = ScalarExpr.coerce(c)
            key = tuple(key)
            m[key] = m[key] + c if key in m else c
        return cls._from_map(m)

    @classmethod
    def multiplication(cls, f) -> "DiffOperator":
        return cls.from_terms([((0, 0, 0), f)])

    @classmethod
    def identity(cls) -> "DiffOperator":
        return cls.multiplication(ONE)

    @classmethod
    def d(cls, var: str, order: int = 1) -> "DiffOperator":
        key = tuple(order if v == var else 0 for v in _VARS)
        return cls.from_terms([(key, ONE)])

    @classmethod
    def parse(cls, text: str) -> "DiffOperator":
        from .textio import parse_node

        node = parse_node(text)
        pairs = []
        for key, g in node.items():
            s = g.as_scalar()
            if s is None:
                raise ValueError("operator coefficients cannot contain exponentials")
            pairs.append((key, s))
        return cls.from_terms(pairs)

    # -- protocol ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ScalarExpr)):
            other = DiffOperator.multiplication(other)
        return isinstance(other, DiffOperator) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __repr__(self):
        return f"DiffOperator({self.to_text()!r})"

    def __str__(self):
        return self.to_text()

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, c in self.terms:
            marks = [
                name + ("" if n == 1 else f"^{n}")
                for name, n in zip(("Dt", "Dx", "Dp"), key)
                if n
            ]
            ctext = c.to_text()
            if not marks:
                parts.append(ctext if len(c.terms) == 1 else f"({ctext})")
            elif c == ONE:
                parts.append(" * ".join(marks))
            else:
                parts.append(f"({ctext}) * " + " * ".join(marks))
        return " + ".join(parts)

    def coeff(self, key) -> ScalarExpr:
        for k, v in self.terms:
            if k == tuple(key):
                return v
        return ZERO

    def order(self) -> int:
        return max((sum(k) for k, _ in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction, ScalarExpr)):
            other = DiffOperator.multiplication(other)
        m = dict(self.terms)
        for k, v in other.terms:
            m[k] = m[k] + v if k in m else v
        return DiffOperator._from_map(m)

    __radd__ = __add__

    def __neg__(self):
        return DiffOperator(tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other):
        return self + (-DiffOperator.coerce(other))

    def __rsub__(self, other):
        return DiffOperator.coerce(other) - self

    @staticmethod
    def coerce(v) -> "DiffOperator":
        if isinstance(v, DiffOperator):
            return v
        return DiffOperator.multiplication(v)

    def scale(self, s) -> "DiffOperator":
        """Left multiplication by a coefficient."""
        s = ScalarExpr.coerce(s)
        return DiffOperator._from_map({k: s * v for k, v in self.terms})

    def __mul__(self, other):
        """Composition self o other (other acts first)."""
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return op_compose(self, DiffOperator.coerce(other))

    def __rmul__(self, other):
        return DiffOperator.coerce(other) * self

    def __pow__(self, n: int):
        out = DiffOperator.identity()
        for _ in range(n):
            out = out * self
        return out

    def apply(self, psi):
        return op_apply(self, psi)

    def subst_coefficients(self, sub) -> "DiffOperator":
        return DiffOperator._from_map({k: v.subst(sub) for k, v in self.terms})


def op_compose(P: DiffOperator, Q: DiffOperator) -> DiffOperator:
    """Leibniz expansion of P o Q."""
    m = {}
    for ka, fa in P.terms:
        for kb, gb in Q.terms:
            # D^ka (g D^kb) = sum_j prod C(ka_i, j_i) (D^j g) D^(ka - j + kb)
            for j0 in range(ka[0] + 1):
                for j1 in range(ka[1] + 1):
                    for j2 in range(ka[2] + 1):
                        j = (j0, j1, j2)
                        g = _diff_multi(gb, j)
                        if g.is_zero():
                            continue
                        c = comb(ka[0], j0) * comb(ka[1], j1) * comb(ka[2], j2)
                        key = tuple(a - ji + b for a, ji, b in zip(ka, j, kb))
                        v = (fa * g).scale(c)
                        m[key] = m[key] + v if key in m else v
    return DiffOperator._from_map(m)


def op_commutator(P: DiffOperator, Q: DiffOperator) -> DiffOperator:
    return op_compose(P, Q) - op_compose(Q, P)


def op_apply(P: DiffOperator, psi):
    """Image of an expression (ScalarExpr or GaussianExpr) under P."""
    scalar_in = isinstance(psi, ScalarExpr)
    g = GaussianExpr.coerce(psi)
    out = GaussianExpr.zero()
    cache = {(0, 0, 0): g}
    for key, c in P.terms:
        if key not in cache:
            cur = g
            for var, n in zip(_VARS, key):
                for _ in range(n):
                    cur = cur.diff(var)
            cache[key] = cur
        out = out + cache[key] * c
    if scalar_in:
        s = out.as_scalar()
        if s is not None:
            return s
    return out


def build_psde_L() -> DiffOperator:
    """Dt - (1/4) Dx^2 + 1/(4 t^2) Dp^2."""
    return DiffOperator.from_terms(
        [
            ((1, 0, 0), ONE),
            ((0, 2, 0), Fraction(-1, 4)),
            ((0, 0, 2), ScalarExpr.factor(0, -2).scale(Fraction(1, 4))),
        ]
    )


@dataclass(frozen=True)
class GeneralizedL:
    """Dt - a(t) Dx^2 -/+ b(t) Dy^2, with y stored in the p slot.

    ``convention="gen"`` reads the second-derivative term as ``-b Dy^2``
    (the form u_t = a u_xx + b u_yy); ``convention="psd"`` reads it as
    ``+b Dp^2`` (the form of the phase-space operator, b = 1/(4 t^2)).
    """

    a: ScalarExpr
    b: ScalarExpr
    convention: str = "gen"

    def __post_init__(self):
        if self.convention not in ("gen", "psd"):
            raise ValueError("convention must be 'gen' or 'psd'")
        for name, c in (("a", self.a), ("b", self.b)):
            if not isinstance(c, ScalarExpr) or not c.is_t_only():
                raise InvalidCoefficient(f"{name}(t) must depend on t only")

    def operator(self) -> DiffOperator:
        sign = -1 if self.convention == "gen" else 1
        return DiffOperator.from_terms(
            [((1, 0, 0), ONE), ((0, 2, 0), -self.a), ((0, 0, 2), self.b.scale(sign))]
        )


def build_general_L(a, b) -> DiffOperator:
    """Dt - a(t) Dx^2 - b(t) Dp^2."""
    a, b = ScalarExpr.coerce(a), ScalarExpr.coerce(b)
    for name, c in (("a", a), ("b", b)):
        if not c.is_t_only():
            raise InvalidCoefficient(f"{name}(t) must depend on t only")
    return GeneralizedL(a, b, "gen").operator()


def t_power(n: int) -> ScalarExpr:
    return ScalarExpr.factor(0, n) if n else ONE

