"""Sums of ``prefactor * exp(exponent)`` with exact coefficient expressions.

The exponent of each term is a :class:`~psde.scalar.ScalarExpr` of joint
(x, p)-degree at most two.  Terms are grouped by their exponent, so a
:class:`GaussianExpr` is zero iff every grouped prefactor is zero.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
import numpy as np

from .scalar import ONE, ZERO, ScalarExpr, Substitution

__all__ = ["GaussianExpr"]


class GaussianExpr:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms=()):
        # tuple of (exponent, prefactor) sorted by exponent; prefactors nonzero
        self.terms = terms
        self._hash = None

    @classmethod
    def _from_map(cls, m):
        return cls(tuple(sorted((k, v) for k, v in m.items() if not v.is_zero())))

    @classmethod
    def zero(cls) -> "GaussianExpr":
        return cls(())

    @classmethod
    def from_scalar(cls, s) -> "GaussianExpr":
        s = ScalarExpr.coerce(s)
        return cls(((ZERO, s),)) if s else cls(())

    @classmethod
    def exp(cls, exponent, prefactor=ONE) -> "GaussianExpr":
        exponent = ScalarExpr.coerce(exponent)
        if exponent.xp_degree() > 2:
            raise ValueError("exponent must have joint (x, p)-degree <= 2")
        prefactor = ScalarExpr.coerce(prefactor)
        return cls(((exponent, prefactor),)) if prefactor else cls(())

    @classmethod
    def coerce(cls, v) -> "GaussianExpr":
        if isinstance(v, GaussianExpr):
            return v
        return cls.from_scalar(v)

    @classmethod
    def parse(cls, text: str) -> "GaussianExpr":
        from .textio import parse_gaussian

        return parse_gaussian(text)

    # -- protocol ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, GaussianExpr):
            try:
                other = GaussianExpr.coerce(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __repr__(self):
        return f"GaussianExpr({self.to_text()!r})"

    def __str__(self):
        return self.to_text()

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exponent, pre in self.terms:
            ptxt = pre.to_text()
            if not exponent:
                parts.append(ptxt)
                continue
            etxt = f"exp({exponent.to_text()})"
            if pre == ONE:
                parts.append(etxt)
            elif len(pre.terms) == 1 and len(pre.terms[0][1].num) - pre.terms[0][1].num.count(0) == 1:
                parts.append(f"{ptxt} * {etxt}")
            else:
                parts.append(f"({ptxt}) * {etxt}")
        return " + ".join(parts)

    def is_zero(self) -> bool:
        return not self.terms

    def as_scalar(self):
        """The purely algebraic value, or None if an exponential is present."""
        if not self.terms:
            return ZERO
        if len(self.terms) == 1 and not self.terms[0][0]:
            return self.terms[0][1]
        return None

    def depends_on(self, var: str) -> bool:
        return any(e.depends_on(var) or pre.depends_on(var) for e, pre in self.terms)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = GaussianExpr.coerce(other)
        m = dict(self.terms)
        for k, v in other.terms:
            m[k] = m[k] + v if k in m else v
        return GaussianExpr._from_map(m)

    __radd__ = __add__

    def __neg__(self):
        return GaussianExpr(tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other):
        return self + (-GaussianExpr.coerce(other))

    def __rsub__(self, other):
        return GaussianExpr.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ScalarExpr)):
            s = ScalarExpr.coerce(other)
            return GaussianExpr._from_map({k: v * s for k, v in self.terms})
        if not isinstance(other, GaussianExpr):
            return NotImplemented
        m = {}
        for ka, va in self.terms:
            for kb, vb in other.terms:
                k = ka + kb
                v = va * vb
                m[k] = m[k] + v if k in m else v
        return GaussianExpr._from_map(m)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = GaussianExpr.from_scalar(ONE)
        for _ in range(n):
            out = out * self
        return out

    # -- calculus / maps --------------------------------------------------
    def diff(self, var: str) -> "GaussianExpr":
        m = {}
        for k, v in self.terms:
            d = v.diff(var) + v * k.diff(var)
            if d:
                m[k] = m[k] + d if k in m else d
        return GaussianExpr._from_map(m)

    def subst(self, sub: Substitution) -> "GaussianExpr":
        m = {}
        for k, v in self.terms:
            nk = k.subst(sub)
            nv = v.subst(sub)
            m[nk] = m[nk] + nv if nk in m else nv
        return GaussianExpr._from_map(m)

    # -- evaluation -------------------------------------------------------
    def evaluate(self, x=0, p=0, t=1, precision_bits=None):
        if precision_bits is None:
            return sum(
                (pre.evaluate(x, p, t) * mpmath.exp(k.evaluate(x, p, t)) for k, pre in self.terms),
                mpmath.mpf(0),
            )
        with mpmath.workprec(precision_bits + 16):
            return sum(
                (pre.evaluate(x, p, t) * mpmath.exp(k.evaluate(x, p, t)) for k, pre in self.terms),
                mpmath.mpf(0),
            )

    def evaluate_array(self, x, p, t):
        total = 0.0
        for k, pre in self.terms:
            total = total + pre.evaluate_array(x, p, t) * np.exp(k.evaluate_array(x, p, t))
        return total + np.zeros(np.broadcast(np.asarray(x), np.asarray(p), np.asarray(t)).shape)

    def to_callable(self, precision_bits=None):
        """f(x, p, t) -> mpf, for the numeric layer."""
        return lambda x, p, t: self.evaluate(x, p, t, precision_bits)

