"""Exact coefficient arithmetic.

A :class:`ScalarExpr` is a finite sum of terms

    c * sqrt(m) * pi^(k/2) * x^i * p^j * prod_b (s_b (t + b))^(e_b)

with ``c`` rational, ``m`` a squarefree positive integer, ``e_b`` integers or
half-integers and ``s_b = +-1`` an orientation that only matters for the
half-integer powers.  Internally every term is normalised to

    (monomial key) * N(t) / prod_b (t + b)^(m_b)

where the key carries ``(xdeg, pdeg, pi2, rad, sig)`` and ``sig`` is the set of
square-root factors ``sqrt(s (t + b))``.  The rational function part is reduced
(no factor ``t + b`` divides both ``N`` and the denominator), so two
expressions are equal iff their term tuples are equal.  Distinct square-root
signatures, radicals and powers of ``sqrt(pi)`` are linearly independent over
Q(t), which makes :meth:`ScalarExpr.is_zero` a decision procedure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Optional, Union

import mpmath
from sympy import factorint

from .errors import (
    NegativeBaseFractionalPower,
    SingularEvaluation,
    SubstitutionOutOfFamily,
)

Rational = Fraction
Number = Union[int, Fraction]

__all__ = [
    "Rational",
    "ScalarExpr",
    "Mobius",
    "Substitution",
    "sqrt_rational",
    "linear_power",
    "scalar_arith",
    "scalar_diff",
    "scalar_subst",
    "scalar_is_zero",
    "scalar_eval",
]


# ---------------------------------------------------------------------------
# dense univariate polynomials in t, coefficients low -> high, trimmed

Poly = tuple


def _ptrim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a, b):
    n = max(len(a), len(b))
    return _ptrim(
        (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
    )


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return _ptrim(out)


def _pscale(a, k):
    if k == 0:
        return ()
    return tuple(k * c for c in a)


def _peval(a, t):
    acc = 0
    for c in reversed(a):
        acc = acc * t + c
    return acc


def _pderiv(a):
    return _ptrim(i * a[i] for i in range(1, len(a)))


@lru_cache(maxsize=4096)
def _linear_pow(b, n):
    """(t + b)^n as a coefficient tuple."""
    out = (Fraction(1),)
    for _ in range(n):
        out = _pmul(out, (b, Fraction(1)))
    return out


def _pdiv_linear(a, b):
    """Divide by (t + b); returns (quotient, remainder)."""
    if not a:
        return (), Fraction(0)
    n = len(a) - 1
    q = [Fraction(0)] * n
    r = a[n]
    for i in range(n - 1, -1, -1):
        q[i] = r
        r = a[i] - b * r
    return _ptrim(q), r


def _pdivmod(a, d):
    """Polynomial long division by a nonzero polynomial d."""
    a = list(a)
    if len(a) < len(d):
        return (), _ptrim(a)
    q = [Fraction(0)] * (len(a) - len(d) + 1)
    lead = d[-1]
    for i in range(len(a) - len(d), -1, -1):
        coef = a[i + len(d) - 1] / lead
        q[i] = coef
        if coef:
            for j, dj in enumerate(d):
                a[i + j] -= coef * dj
    return _ptrim(q), _ptrim(a[: len(d) - 1])


# ---------------------------------------------------------------------------
# reduced rational functions N(t) / prod (t + b)^m


class RatFunc:
    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=()):
        self.num = num
        self.den = den
        self._hash = None

    @staticmethod
    def make(num, den_map):
        num = _ptrim(num)
        if not num:
            return RatFunc((), ())
        den = []
        for b in sorted(den_map):
            m = den_map[b]
            while m > 0:
                q, r = _pdiv_linear(num, b)
                if r != 0:
                    break
                num = q
                m -= 1
            while m < 0:
                num = _pmul(num, (b, Fraction(1)))
                m += 1
            if m:
                den.append((b, m))
        return RatFunc(num, tuple(den))

    @staticmethod
    def const(c):
        return RatFunc((Fraction(c),) if c else (), ())

    def is_zero(self):
        return not self.num

    def key(self):
        return (self.num, self.den)

    def __eq__(self, other):
        return isinstance(other, RatFunc) and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __lt__(self, other):
        return (len(self.num), self.num, self.den) < (len(other.num), other.num, other.den)

    def __repr__(self):
        return f"RatFunc({self.num}, {self.den})"

    def add(self, other):
        if not self.num:
            return other
        if not other.num:
            return self
        da, db = dict(self.den), dict(other.den)
        common = {b: max(da.get(b, 0), db.get(b, 0)) for b in set(da) | set(db)}
        na, nb = self.num, other.num
        for b, m in common.items():
            if m - da.get(b, 0):
                na = _pmul(na, _linear_pow(b, m - da.get(b, 0)))
            if m - db.get(b, 0):
                nb = _pmul(nb, _linear_pow(b, m - db.get(b, 0)))
        return RatFunc.make(_padd(na, nb), common)

    def mul(self, other):
        if not self.num or not other.num:
            return RatFunc((), ())
        d = dict(self.den)
        for b, m in other.den:
            d[b] = d.get(b, 0) + m
        return RatFunc.make(_pmul(self.num, other.num), d)

    def mul_poly(self, poly):
        return RatFunc.make(_pmul(self.num, poly), dict(self.den))

    def scale(self, k):
        if k == 0:
            return RatFunc((), ())
        return RatFunc(_pscale(self.num, k), self.den)

    def with_extra_den(self, b, m):
        d = dict(self.den)
        d[b] = d.get(b, 0) + m
        return RatFunc.make(self.num, d)

    def deriv(self):
        if not self.num:
            return self
        out = RatFunc.make(_pderiv(self.num), dict(self.den))
        for b, m in self.den:
            out = out.add(self.scale(-m).with_extra_den(b, 1))
        return out

    def evaluate(self, t):
        val = _peval(self.num, t)
        for b, m in self.den:
            val = val / (t + b) ** m
        return val

    def denominator_poly(self):
        out = (Fraction(1),)
        for b, m in self.den:
            out = _pmul(out, _linear_pow(b, m))
        return out

    def is_monomial(self):
        """True for c * t^k (k of any sign)."""
        nz = [i for i, c in enumerate(self.num) if c != 0]
        return len(nz) == 1 and all(b == 0 for b, _ in self.den)

    def partial_fractions(self):
        """Split into (polynomial, {(b, j): coeff}) with coeff / (t + b)^j."""
        den = self.denominator_poly()
        poly, rem = _pdivmod(self.num, den)
        parts = {}
        for b, m in self.den:
            other = (Fraction(1),)
            for b2, m2 in self.den:
                if b2 != b:
                    other = _pmul(other, _linear_pow(b2, m2))
            # Taylor coefficients of rem/other around t = -b up to order m-1
            r_shift = _shift_poly(rem, -b)
            o_shift = _shift_poly(other, -b)
            series = _series_div(r_shift, o_shift, m)
            for k, c in enumerate(series):
                if c != 0:
                    parts[(b, m - k)] = c
        return poly, parts


def _shift_poly(a, s):
    """Coefficients of a(u + s) in powers of u."""
    out = ()
    for c in reversed(a):
        out = _padd(_pmul(out, (s, Fraction(1))), (c,) if c else ())
    return out


def _series_div(a, b, n):
    """First n power-series coefficients of a/b, b[0] != 0."""
    a = list(a) + [Fraction(0)] * n
    out = []
    for k in range(n):
        s = a[k] - sum(out[j] * (b[k - j] if k - j < len(b) else 0) for j in range(k))
        out.append(s / b[0])
    return out


# ---------------------------------------------------------------------------
# monomial keys


class Mono(NamedTuple):
    xdeg: int
    pdeg: int
    pi2: int  # power of sqrt(pi)
    rad: int  # squarefree radical sqrt(rad)
    sig: tuple  # sorted ((shift, orient), ...) of sqrt(orient*(t+shift))


ONE_MONO = Mono(0, 0, 0, 1, ())


def _mono_mul(a: Mono, b: Mono):
    """Product of two keys: (key, rational factor, polynomial factor)."""
    g = math.gcd(a.rad, b.rad)
    rad = (a.rad // g) * (b.rad // g)
    const = Fraction(g)
    poly = (Fraction(1),)
    if not b.sig:
        sig = a.sig
    elif not a.sig:
        sig = b.sig
    else:
        da = dict(a.sig)
        for s, o in b.sig:
            if s in da:
                if da[s] != o:
                    raise SubstitutionOutOfFamily(
                        f"square roots of t+{s} with opposite orientations multiplied"
                    )
                del da[s]
                poly = _pmul(poly, (o * s, Fraction(o)))
            else:
                da[s] = o
        sig = tuple(sorted(da.items()))
    return Mono(a.xdeg + b.xdeg, a.pdeg + b.pdeg, a.pi2 + b.pi2, rad, sig), const, poly


@lru_cache(maxsize=4096)
def sqrt_rational(q) -> tuple:
    """sqrt(q) = coeff * sqrt(rad) for q > 0, rad squarefree."""
    q = Fraction(q)
    if q <= 0:
        raise NegativeBaseFractionalPower(f"square root of non-positive constant {q}")
    n = q.numerator * q.denominator
    square = 1
    rad = 1
    for prime, mult in factorint(n).items():
        square *= prime ** (mult // 2)
        if mult % 2:
            rad *= prime
    return Fraction(square, q.denominator), rad


def _as_fraction(e):
    e = Fraction(e)
    if e.denominator not in (1, 2):
        raise ValueError(f"exponent {e} has denominator other than 1 or 2")
    return e


# ---------------------------------------------------------------------------


class ScalarExpr:
    """Immutable canonical coefficient expression."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=()):
        # terms: tuple of (Mono, RatFunc) sorted by Mono, no zero RatFunc
        self.terms = terms
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def _from_map(cls, m):
        return cls(tuple(sorted((k, v) for k, v in m.items() if not v.is_zero())))

    @classmethod
    def const(cls, c) -> "ScalarExpr":
        c = Fraction(c)
        if c == 0:
            return ZERO
        return cls(((ONE_MONO, RatFunc.const(c)),))

    @classmethod
    def var(cls, name: str) -> "ScalarExpr":
        if name == "x":
            return cls(((Mono(1, 0, 0, 1, ()), RatFunc.const(1)),))
        if name == "p":
            return cls(((Mono(0, 1, 0, 1, ()), RatFunc.const(1)),))
        if name == "t":
            return cls(((ONE_MONO, RatFunc((Fraction(0), Fraction(1)), ())),))
        raise ValueError(f"unknown variable {name!r}")

    @classmethod
    def factor(cls, shift, exponent, orient: int = 1) -> "ScalarExpr":
        """(orient * (t + shift)) ** exponent."""
        shift = Fraction(shift)
        e = _as_fraction(exponent)
        whole = math.floor(e)
        coeff = Fraction(orient) ** whole
        if whole >= 0:
            rf = RatFunc.make(_pscale(_linear_pow(shift, whole), coeff), {})
        else:
            rf = RatFunc.make((coeff,), {shift: -whole})
        sig = ((shift, orient),) if e != whole else ()
        return cls(((Mono(0, 0, 0, 1, sig), rf),))

    @classmethod
    def sqrt_const(cls, q) -> "ScalarExpr":
        c, rad = sqrt_rational(q)
        return cls(((Mono(0, 0, 0, rad, ()), RatFunc.const(c)),))

    @classmethod
    def pi_power(cls, half_units: int) -> "ScalarExpr":
        """pi ** (half_units / 2)."""
        return cls(((Mono(0, 0, half_units, 1, ()), RatFunc.const(1)),))

    @classmethod
    def coerce(cls, v) -> "ScalarExpr":
        if isinstance(v, ScalarExpr):
            return v
        if isinstance(v, (int, Fraction)):
            return cls.const(v)
        raise TypeError(f"cannot coerce {type(v).__name__} to ScalarExpr")

    @classmethod
    def parse(cls, text: str) -> "ScalarExpr":
        from .textio import parse_scalar

        return parse_scalar(text)

    # -- basic protocol ---------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = ScalarExpr.const(other)
        return isinstance(other, ScalarExpr) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __lt__(self, other):
        return self.terms < other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"ScalarExpr({self.to_text()!r})"

    def __str__(self):
        return self.to_text()

    def to_text(self) -> str:
        from .textio import format_scalar

        return format_scalar(self)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            other = ScalarExpr.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.terms:
            return other
        if not other.terms:
            return self
        m = dict(self.terms)
        for k, v in other.terms:
            m[k] = m[k].add(v) if k in m else v
        return ScalarExpr._from_map(m)

    __radd__ = __add__

    def __neg__(self):
        return ScalarExpr(tuple((k, v.scale(-1)) for k, v in self.terms))

    def __sub__(self, other):
        try:
            other = ScalarExpr.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return ScalarExpr.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, ScalarExpr):
            return NotImplemented
        if not self.terms or not other.terms:
            return ZERO
        m = {}
        for ka, va in self.terms:
            for kb, vb in other.terms:
                k, c, poly = _mono_mul(ka, kb)
                v = va.mul(vb)
                if c != 1:
                    v = v.scale(c)
                if poly != (1,):
                    v = v.mul_poly(poly)
                m[k] = m[k].add(v) if k in m else v
        return ScalarExpr._from_map(m)

    __rmul__ = __mul__

    def scale(self, k) -> "ScalarExpr":
        k = Fraction(k)
        if k == 0:
            return ZERO
        return ScalarExpr(tuple((m, v.scale(k)) for m, v in self.terms))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return self * ScalarExpr.coerce(other).inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers of general expressions")
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self) -> "ScalarExpr":
        """Inverse of a single-term expression whose numerator is a product of
        known linear factors (a monomial times factors t + b)."""
        if len(self.terms) != 1:
            raise ZeroDivisionError("only single-term expressions are invertible")
        mono, rf = self.terms[0]
        if mono.xdeg or mono.pdeg:
            raise ZeroDivisionError("cannot invert an expression involving x or p")
        # factor the numerator over the rationals into (t + b) pieces when possible
        num = rf.num
        lead = num[-1]
        roots = {}
        rest = tuple(c / lead for c in num)
        while len(rest) > 1:
            found = None
            for b in _rational_root_candidates(rest):
                q, r = _pdiv_linear(rest, b)
                if r == 0:
                    found = b
                    rest = q
                    break
            if found is None:
                raise ZeroDivisionError("numerator does not split into linear factors")
            roots[found] = roots.get(found, 0) + 1
        den = {b: -m for b, m in rf.den}
        for b, m in roots.items():
            den[b] = den.get(b, 0) + m
        inv = RatFunc.make((1 / lead,), den)
        out = ScalarExpr(((Mono(0, 0, -mono.pi2, 1, ()), inv),))
        if mono.rad != 1:
            out = out * ScalarExpr.sqrt_const(Fraction(1, mono.rad))
        for s, o in mono.sig:
            out = out * ScalarExpr.factor(s, Fraction(-1, 2), o)
        return out

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def depends_on(self, var: str) -> bool:
        if var == "x":
            return any(m.xdeg for m, _ in self.terms)
        if var == "p":
            return any(m.pdeg for m, _ in self.terms)
        if var == "t":
            return any(m.sig or len(v.num) > 1 or v.den for m, v in self.terms)
        raise ValueError(var)

    def is_t_only(self) -> bool:
        return not (self.depends_on("x") or self.depends_on("p"))

    def xp_degree(self) -> int:
        return max((m.xdeg + m.pdeg for m, _ in self.terms), default=0)

    def is_rational_constant(self) -> bool:
        return not self.terms or (
            len(self.terms) == 1
            and self.terms[0][0] == ONE_MONO
            and len(self.terms[0][1].num) == 1
            and not self.terms[0][1].den
        )

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_rational_constant():
            raise ValueError(f"{self} is not a rational constant")
        return self.terms[0][1].num[0]

    def coefficient(self, xdeg: int, pdeg: int) -> "ScalarExpr":
        """Coefficient (a t-only expression) of x^xdeg p^pdeg."""
        return ScalarExpr(
            tuple(
                (m._replace(xdeg=0, pdeg=0), v)
                for m, v in self.terms
                if m.xdeg == xdeg and m.pdeg == pdeg
            )
        )

    def xp_monomials(self):
        return sorted({(m.xdeg, m.pdeg) for m, _ in self.terms})

    def power_law(self):
        """Return (b0, alpha) if self == b0 * t^alpha with rational b0, else None."""
        if len(self.terms) != 1:
            return None
        mono, rf = self.terms[0]
        if mono.xdeg or mono.pdeg or mono.pi2 or mono.rad != 1:
            return None
        if any(s != 0 or o != 1 for s, o in mono.sig):
            return None
        if not rf.is_monomial():
            return None
        k = len(rf.num) - 1
        alpha = Fraction(k) - sum(m for _, m in rf.den)
        if mono.sig:
            alpha += Fraction(1, 2)
        return rf.num[-1], alpha

    # -- calculus ---------------------------------------------------------
    def diff(self, var: str) -> "ScalarExpr":
        m = {}
        if var == "x" or var == "p":
            for k, v in self.terms:
                deg = k.xdeg if var == "x" else k.pdeg
                if deg == 0:
                    continue
                nk = k._replace(xdeg=k.xdeg - 1) if var == "x" else k._replace(pdeg=k.pdeg - 1)
                m[nk] = m[nk].add(v.scale(deg)) if nk in m else v.scale(deg)
            return ScalarExpr._from_map(m)
        if var != "t":
            raise ValueError(var)
        for k, v in self.terms:
            dv = v.deriv()
            for s, _ in k.sig:
                dv = dv.add(v.scale(Fraction(1, 2)).with_extra_den(s, 1))
            if not dv.is_zero():
                m[k] = m[k].add(dv) if k in m else dv
        return ScalarExpr._from_map(m)

    def antiderivative_t(self) -> "ScalarExpr":
        """Exact antiderivative in t of a t-only expression."""
        from .errors import NonIntegrableInFamily

        if not self.is_t_only():
            raise NonIntegrableInFamily("antiderivative of an expression involving x or p")
        out = ZERO
        for mono, rf in self.terms:
            base = ScalarExpr(((mono._replace(sig=()), RatFunc.const(1)),))
            if not mono.sig:
                poly, parts = rf.partial_fractions()
                piece = ZERO
                for k, c in enumerate(poly):
                    if c:
                        piece = piece + ScalarExpr.factor(0, k + 1).scale(c / (k + 1))
                for (b, j), c in parts.items():
                    if j == 1:
                        raise NonIntegrableInFamily(
                            f"antiderivative of 1/(t+{b}) is logarithmic"
                        )
                    piece = piece + ScalarExpr.factor(b, 1 - j).scale(c / (1 - j))
                out = out + base * piece
            elif len(mono.sig) == 1 and all(b == mono.sig[0][0] for b, _ in rf.den):
                s, o = mono.sig[0]
                # sqrt(o(t+s)) * N(t) / (t+s)^m, expand N in powers of (t+s)
                shifted = _shift_poly(rf.num, -s)
                m = rf.den[0][1] if rf.den else 0
                piece = ZERO
                for k, c in enumerate(shifted):
                    if not c:
                        continue
                    e = Fraction(k - m) + Fraction(1, 2)  # power of (t+s), oriented
                    # (t+s)^n sqrt(o(t+s)) = o^n (o(t+s))^(n+1/2)
                    n = k - m
                    sign = o**n if n >= 0 else o ** (-n)
                    piece = piece + ScalarExpr.factor(s, e + 1, o).scale(
                        c * sign * o / (e + 1)
                    )
                out = out + base * piece
            else:
                raise NonIntegrableInFamily(
                    "antiderivative of a product of distinct square-root factors"
                )
        return out

    # -- substitution -----------------------------------------------------
    def subst(self, sub: "Substitution") -> "ScalarExpr":
        return _subst(self, sub)

    # -- evaluation -------------------------------------------------------
    def evaluate(self, x=0, p=0, t=1, precision_bits: Optional[int] = None):
        """High-precision value at a point (mpmath)."""
        if precision_bits is None:
            return _mp_eval(self, x, p, t)
        with mpmath.workprec(precision_bits + EVAL_GUARD_BITS):
            val = _mp_eval(self, x, p, t)
        return val

    def evaluate_array(self, x, p, t):
        """Vectorised float64 evaluation with numpy arrays (no domain checks)."""
        import numpy as np

        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        t = np.asarray(t, dtype=float)
        total = np.zeros(np.broadcast(x, p, t).shape)
        for mono, rf in self.terms:
            val = _float_rf(rf, t)
            val = val * (math.sqrt(mono.rad) * math.pi ** (mono.pi2 / 2))
            if mono.xdeg:
                val = val * x**mono.xdeg
            if mono.pdeg:
                val = val * p**mono.pdeg
            for s, o in mono.sig:
                val = val * np.sqrt(o * (t + float(s)))
            total = total + val
        return total


def _float_rf(rf, t):
    val = 0.0
    for c in reversed(rf.num):
        val = val * t + float(c)
    for b, m in rf.den:
        val = val / (t + float(b)) ** m
    return val


#: extra working bits used by :meth:`ScalarExpr.evaluate`; the returned value
#: is accurate to about 2**-(precision_bits) relative to the magnitude of the
#: largest term.
EVAL_GUARD_BITS = 16


def to_mpf(v):
    """mpmath number from int, float, Fraction, string or mpf."""
    if isinstance(v, mpmath.mpf):
        return v
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def _mp_eval(e, x, p, t):
    x, p, t = to_mpf(x), to_mpf(p), to_mpf(t)
    total = mpmath.mpf(0)
    for mono, rf in e.terms:
        for b, _ in rf.den:
            if t + b == 0:
                raise SingularEvaluation(f"pole at t = {-b}")
        num = mpmath.mpf(0)
        for c in reversed(rf.num):
            num = num * t + mpmath.mpf(c.numerator) / c.denominator
        for b, m in rf.den:
            num = num / (t + mpmath.mpf(b.numerator) / b.denominator) ** m
        val = num
        if mono.rad != 1:
            val *= mpmath.sqrt(mono.rad)
        if mono.pi2:
            val *= mpmath.pi ** (mpmath.mpf(mono.pi2) / 2)
        if mono.xdeg:
            val *= x**mono.xdeg
        if mono.pdeg:
            val *= p**mono.pdeg
        for s, o in mono.sig:
            base = o * (t + mpmath.mpf(s.numerator) / s.denominator)
            if base == 0:
                raise SingularEvaluation(f"branch point at t = {-s}")
            if base < 0:
                raise NegativeBaseFractionalPower(
                    f"sqrt({'-' if o < 0 else ''}(t + {s})) at t = {t}"
                )
            val *= mpmath.sqrt(base)
        total += val
    return total


ZERO = ScalarExpr(())
ONE = ScalarExpr.const(1)
X = ScalarExpr.var("x")
P = ScalarExpr.var("p")
T = ScalarExpr.var("t")


def _rational_root_candidates(monic):
    # monic polynomial with rational coefficients: clear denominators and use
    # the rational root theorem
    den = 1
    for c in monic:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in monic]
    lead = ints[-1]
    const = ints[0]
    if const == 0:
        return [Fraction(0)]
    cands = set()
    for pdiv in _divisors(abs(const)):
        for q in _divisors(abs(lead)):
            for s in (1, -1):
                # root r of poly means factor (t - r): shift b = -r
                cands.add(-Fraction(s * pdiv, q))
    return sorted(cands)


def _divisors(n):
    out = []
    for i in range(1, math.isqrt(n) + 1):
        if n % i == 0:
            out.append(i)
            if i * i != n:
                out.append(n // i)
    return out


def linear_power(a, c, e, orient: int = 1) -> ScalarExpr:
    """(orient * (a t + c)) ** e as an exact expression.

    For half-integer ``e`` the orientation picks the real branch; the factor
    is re-normalised to ``|a|^e * (s (t + c/a))^e``."""
    a, c, e = Fraction(a), Fraction(c), _as_fraction(e)
    if a == 0:
        k = orient * c
        if k == 0:
            if e > 0:
                return ZERO
            raise SingularEvaluation("zero constant raised to a non-positive power")
        if e.denominator == 1:
            return ScalarExpr.const(k ** int(e))
        if k < 0:
            raise NegativeBaseFractionalPower(f"({k})^{e}")
        whole = math.floor(e)
        return ScalarExpr.sqrt_const(k) * ScalarExpr.const(k**whole)
    s = 1 if orient * a > 0 else -1
    mag = abs(a)
    out = ScalarExpr.factor(c / a, e, s)
    if mag != 1:
        whole = math.floor(e)
        coef = ScalarExpr.const(mag**whole)
        if e != whole:
            coef = coef * ScalarExpr.sqrt_const(mag)
        out = out * coef
    return out


# ---------------------------------------------------------------------------
# substitutions


@dataclass(frozen=True)
class Mobius:
    """t -> (a t + b) / (c t + d) with rational entries."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    @classmethod
    def shift(cls, lam):
        return cls(Fraction(1), Fraction(lam), Fraction(0), Fraction(1))

    @classmethod
    def scale(cls, s):
        s = Fraction(s)
        if s <= 0:
            raise SubstitutionOutOfFamily("time rescaling must be positive")
        return cls(s, Fraction(0), Fraction(0), Fraction(1))

    @classmethod
    def conformal(cls, lam):
        """t -> t / (1 + lam t)."""
        return cls(Fraction(1), Fraction(0), Fraction(lam), Fraction(1))

    @classmethod
    def inversion(cls):
        return cls(Fraction(0), Fraction(1), Fraction(1), Fraction(0))

    @classmethod
    def constant(cls, value):
        return cls(Fraction(0), Fraction(value), Fraction(0), Fraction(1))

    def __call__(self, t):
        return (self.a * t + self.b) / (self.c * t + self.d)

    def as_expr(self) -> ScalarExpr:
        return (self.a * T + self.b) * linear_power(self.c, self.d, -1)


@dataclass(frozen=True)
class Substitution:
    """f(x, p, t) -> f(X, P, T(t)).

    ``x``/``p`` images are expressions in the original variables; ``t`` is a
    Mobius map.  ``t_ref`` is a point of the intended evaluation window: it
    selects the real branch of every square-root factor produced by the map.
    """

    x: Optional[ScalarExpr] = None
    p: Optional[ScalarExpr] = None
    t: Optional[Mobius] = None
    t_ref: Fraction = Fraction(1)

    @classmethod
    def exchange(cls, t_ref=Fraction(1)):
        """x <-> p, t -> 1/t."""
        return cls(x=P, p=X, t=Mobius.inversion(), t_ref=Fraction(t_ref))

    def t_image(self) -> ScalarExpr:
        return T if self.t is None else self.t.as_expr()


def _subst(e: ScalarExpr, sub: Substitution) -> ScalarExpr:
    if not e.terms:
        return e
    ximg = X if sub.x is None else sub.x
    pimg = P if sub.p is None else sub.p
    xpow = [ONE]
    ppow = [ONE]
    tcache = {}
    acc = ZERO
    for mono, rf in e.terms:
        while len(xpow) <= mono.xdeg:
            xpow.append(xpow[-1] * ximg)
        while len(ppow) <= mono.pdeg:
            ppow.append(ppow[-1] * pimg)
        base = ScalarExpr(((Mono(0, 0, mono.pi2, mono.rad, ()), RatFunc.const(1)),))
        tpart = _subst_tpart(mono.sig, rf, sub, tcache)
        acc = acc + base * xpow[mono.xdeg] * ppow[mono.pdeg] * tpart
    return acc


def _subst_tpart(sig, rf, sub: Substitution, cache) -> ScalarExpr:
    if sub.t is None:
        return ScalarExpr(((Mono(0, 0, 0, 1, sig), rf),))
    mob = sub.t
    tref = Fraction(sub.t_ref)
    den_ref = mob.c * tref + mob.d
    if den_ref == 0:
        raise SubstitutionOutOfFamily("reference point maps to infinity")
    if "T" not in cache:
        cache["T"] = mob.as_expr()
    texpr = cache["T"]
    out = ZERO
    for c in reversed(rf.num):
        out = out * texpr + c
    for b, m in rf.den:
        a1, c1 = mob.a + b * mob.c, mob.b + b * mob.d
        if a1 == 0 and c1 == 0:
            raise SubstitutionOutOfFamily(f"t + {b} maps to zero identically")
        out = out * linear_power(a1, c1, -m) * linear_power(mob.c, mob.d, m)
    for b, o in sig:
        a1, c1 = mob.a + b * mob.c, mob.b + b * mob.d
        vn = a1 * tref + c1
        if vn == 0:
            raise SubstitutionOutOfFamily(f"reference point hits the branch point of t + {b}")
        sn = 1 if vn > 0 else -1
        sd = 1 if den_ref > 0 else -1
        if o * sn * sd < 0:
            raise SubstitutionOutOfFamily(
                f"square root of {'-' if o < 0 else ''}(t + {b}) leaves its real branch"
            )
        out = out * linear_power(a1, c1, Fraction(1, 2), sn)
        out = out * linear_power(mob.c, mob.d, Fraction(-1, 2), sd)
    return out


# ---------------------------------------------------------------------------
# functional surface


def scalar_arith(a: ScalarExpr, b, kind: str) -> ScalarExpr:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "scale":
        return a.scale(b)
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def scalar_diff(a: ScalarExpr, var: str) -> ScalarExpr:
    return a.diff(var)


def scalar_subst(a: ScalarExpr, sub: Substitution) -> ScalarExpr:
    return a.subst(sub)


def scalar_is_zero(a: ScalarExpr) -> bool:
    return a.is_zero()


def scalar_eval(a: ScalarExpr, point, precision_bits: int = 200):
    x, p, t = point
    return a.evaluate(x, p, t, precision_bits=precision_bits)
