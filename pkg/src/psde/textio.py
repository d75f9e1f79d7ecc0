"""Deterministic text form for expressions and operators, and its parser.

Grammar (whitespace insignificant)::

    expr     := ['+'|'-'] term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := atom ['^' exponent]
    atom     := rational | 'x' | 'p' | 't' | 'pi' | 'sqrt(' expr ')'
              | 'exp(' expr ')' | 'Dt' | 'Dx' | 'Dp' | '(' expr ')'
    exponent := ['-'] int ['/' int]

A parenthesised group raised to a negative or half-integer power must be
linear in t, e.g. ``(t+1)^-1/2`` or ``(3-t)^1/2``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError
from .scalar import ONE, ZERO, ScalarExpr, linear_power

_TOKEN = re.compile(r"\s*(?:(\d+)|(Dt|Dx|Dp|sqrt|exp|pi|x|p|t)|(.))")


def _fmt_shift_factor(shift, orient):
    if orient > 0:
        if shift == 0:
            return "t"
        return f"(t+{shift})" if shift > 0 else f"(t-{-shift})"
    c = -shift
    return f"({c}-t)"


def _fmt_exp(e):
    e = Fraction(e)
    return "" if e == 1 else f"^{e}"


def format_scalar(e: ScalarExpr) -> str:
    pieces = []
    for mono, rf in e.terms:
        for k, c in enumerate(rf.num):
            if c == 0:
                continue
            factors = []
            if mono.rad != 1:
                factors.append(f"sqrt({mono.rad})")
            if mono.pi2:
                factors.append("pi" + _fmt_exp(Fraction(mono.pi2, 2)))
            if mono.xdeg:
                factors.append("x" + _fmt_exp(mono.xdeg))
            if mono.pdeg:
                factors.append("p" + _fmt_exp(mono.pdeg))
            exps = {}
            if k:
                exps[(Fraction(0), 1)] = Fraction(k)
            for b, m in rf.den:
                exps[(b, 1)] = exps.get((b, 1), 0) - m
            for s, o in mono.sig:
                exps[(s, o)] = exps.get((s, o), 0) + Fraction(1, 2)
            for (s, o), ex in sorted(exps.items()):
                if ex:
                    factors.append(_fmt_shift_factor(s, o) + _fmt_exp(ex))
            pieces.append((c, factors))
    if not pieces:
        return "0"
    out = []
    for i, (c, factors) in enumerate(pieces):
        mag = abs(c)
        body = factors if mag == 1 and factors else [str(mag)] + factors
        text = " * ".join(body)
        if i == 0:
            out.append(("-" if c < 0 else "") + text)
        else:
            out.append((" - " if c < 0 else " + ") + text)
    return "".join(out)


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text):
        self.toks = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected input at {pos}: {text[pos:pos + 10]!r}")
            num, name, sym = m.groups()
            if num is not None:
                self.toks.append(("num", int(num)))
            elif name is not None:
                self.toks.append(("name", name))
            elif sym.strip():
                self.toks.append(("sym", sym))
            pos = m.end()
        self.i = 0

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, sym):
        tok = self.take()
        if tok != ("sym", sym):
            raise ParseError(f"expected {sym!r}, got {tok[1]!r}")

    def parse(self):
        val = self.expr()
        if self.i != len(self.toks):
            raise ParseError(f"trailing input near token {self.peek()[1]!r}")
        return val

    def expr(self):
        sign = 1
        if self.peek() in (("sym", "-"), ("sym", "+")):
            sign = -1 if self.take()[1] == "-" else 1
        val = self.term()
        if sign < 0:
            val = _neg(val)
        while self.peek() in (("sym", "+"), ("sym", "-")):
            op = self.take()[1]
            rhs = self.term()
            val = _add(val, rhs if op == "+" else _neg(rhs))
        return val

    def term(self):
        val = self.factor()
        while self.peek() == ("sym", "*"):
            self.take()
            val = _mul(val, self.factor())
        return val

    def exponent(self):
        sign = 1
        if self.peek() == ("sym", "-"):
            self.take()
            sign = -1
        kind, n = self.take()
        if kind != "num":
            raise ParseError("exponent must be an integer or a fraction")
        e = Fraction(n)
        if self.peek() == ("sym", "/") and self.peek(1)[0] == "num":
            self.take()
            e /= self.take()[1]
        return sign * e

    def factor(self):
        kind, val = self.peek()
        base_kind = None
        if kind == "num":
            self.take()
            q = Fraction(val)
            if self.peek() == ("sym", "/"):
                self.take()
                k2, d = self.take()
                if k2 != "num":
                    raise ParseError("expected denominator")
                q /= d
            node = _scalar(ScalarExpr.const(q))
        elif kind == "name":
            self.take()
            if val in ("x", "p"):
                node = _scalar(ScalarExpr.var(val))
            elif val == "t":
                node = _scalar(ScalarExpr.var("t"))
                base_kind = "t"
            elif val == "pi":
                base_kind = "pi"
                node = _scalar(ScalarExpr.pi_power(2))
            elif val in ("Dt", "Dx", "Dp"):
                key = {"Dt": (1, 0, 0), "Dx": (0, 1, 0), "Dp": (0, 0, 1)}[val]
                node = {key: _gauss_one()}
                base_kind = "D"
            elif val in ("sqrt", "exp"):
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                s = _only_scalar(inner, val)
                if val == "sqrt":
                    node = _scalar(_linear_or_const_power(s, Fraction(1, 2)))
                else:
                    from .gaussian import GaussianExpr

                    node = {(0, 0, 0): GaussianExpr.exp(s)}
            else:  # pragma: no cover - tokenizer guarantees names
                raise ParseError(val)
        elif (kind, val) == ("sym", "("):
            self.take()
            node = self.expr()
            self.expect(")")
            base_kind = "group"
        else:
            raise ParseError(f"unexpected token {val!r}")
        if self.peek() == ("sym", "^"):
            self.take()
            e = self.exponent()
            node = _power(node, e, base_kind)
        return node


# values are dicts {(dt, dx, dp): GaussianExpr}


def _gauss_one():
    from .gaussian import GaussianExpr

    return GaussianExpr.from_scalar(ONE)


def _scalar(s):
    from .gaussian import GaussianExpr

    return {(0, 0, 0): GaussianExpr.from_scalar(s)}


def _add(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] + v if k in out else v
    return {k: v for k, v in out.items() if not v.is_zero()}


def _neg(a):
    return {k: -v for k, v in a.items()}


def _mul(a, b):
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(i + j for i, j in zip(ka, kb))
            v = va * vb
            out[k] = out[k] + v if k in out else v
    return {k: v for k, v in out.items() if not v.is_zero()}


def _only_scalar(node, ctx):
    if set(node) - {(0, 0, 0)}:
        raise ParseError(f"derivative marker inside {ctx}()")
    g = node.get((0, 0, 0))
    if g is None:
        return ZERO
    s = g.as_scalar()
    if s is None:
        raise ParseError(f"exponential inside {ctx}()")
    return s


def _linear_or_const_power(s: ScalarExpr, e: Fraction) -> ScalarExpr:
    if s.is_rational_constant():
        return linear_power(0, s.constant_value(), e)
    if s.is_t_only():
        a = s.diff("t")
        if a.is_rational_constant() and a.constant_value() != 0:
            a = a.constant_value()
            c = s - ScalarExpr.var("t").scale(a)
            if c.is_rational_constant():
                return linear_power(a, c.constant_value(), e)
    raise ParseError(f"non-integer or negative power of a non-linear expression: ({s})^{e}")


def _power(node, e, base_kind):
    if base_kind == "D":
        if e.denominator != 1 or e < 0:
            raise ParseError("derivative markers take non-negative integer powers")
        (key,) = node
        return {tuple(int(e) * k for k in key): _gauss_one()}
    if base_kind == "pi":
        if (2 * e).denominator != 1:
            raise ParseError("powers of pi must be multiples of 1/2")
        return _scalar(ScalarExpr.pi_power(int(2 * e)))
    if e.denominator == 1 and e >= 0:
        out = {(0, 0, 0): _gauss_one()}
        for _ in range(int(e)):
            out = _mul(out, node)
        return out
    s = _only_scalar(node, "power")
    return _scalar(_linear_or_const_power(s, e))


def parse_node(text):
    return _Parser(text).parse()


def parse_scalar(text: str) -> ScalarExpr:
    return _only_scalar(parse_node(text), "scalar expression")


def parse_gaussian(text: str):
    from .gaussian import GaussianExpr

    node = parse_node(text)
    if set(node) - {(0, 0, 0)}:
        raise ParseError("derivative marker in an expression")
    return node.get((0, 0, 0), GaussianExpr.zero())
