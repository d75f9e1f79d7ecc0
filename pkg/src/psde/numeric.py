"""Numeric cross-checks: finite-difference residuals, quadrature, delta limits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from .errors import EvaluationFailure, InvalidParameter, NonConvergent
from .scalar import to_mpf
from .solutions import kernel, thermal

__all__ = [
    "GridSpec",
    "ResidualReport",
    "fd_residual",
    "quadrature",
    "TEST_FUNCTIONS",
    "delta_limit_test",
    "integral_invariance",
    "thermal_mass",
]


@dataclass(frozen=True)
class GridSpec:
    """Sample points in x, p, t and the coarsest difference step h.

    The t-step is h^2, so both stencils have truncation error O(h^2)."""

    x: Sequence = (-1.0, 0.0, 1.0)
    p: Sequence = (-1.0, 0.0, 1.0)
    t: Sequence = (0.5, 1.0, 2.0)
    h: float = 1e-2
    refinements: int = 3
    precision_bits: int = 128

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("step must be positive")
        if self.refinements < 3:
            raise ValueError("need at least 3 refinements to estimate an order")

    def points(self):
        for x in self.x:
            for p in self.p:
                for t in self.t:
                    yield (x, p, t)


@dataclass
class ResidualReport:
    max_residual: float
    location: tuple
    steps: list
    per_step: list
    order: float | None
    limit: float

    def to_dict(self):
        return {
            "max_residual": self.max_residual,
            "location": [float(v) for v in self.location],
            "steps": self.steps,
            "per_step_max": self.per_step,
            "order": self.order,
            "limit": self.limit,
        }


def _call(f, x, p, t):
    try:
        v = f(x, p, t)
    except Exception as exc:  # black-box callables may raise anything
        raise EvaluationFailure(f"evaluation failed at ({x}, {p}, {t}): {exc}") from exc
    v = mpmath.mpf(v) if not isinstance(v, mpmath.mpf) else v
    if not mpmath.isfinite(v):
        raise EvaluationFailure(f"non-finite value at ({x}, {p}, {t})")
    return v


def _stencil(f, x, p, t, h):
    k = h * h
    f0 = _call(f, x, p, t)
    ft = (_call(f, x, p, t + k) - _call(f, x, p, t - k)) / (2 * k)
    fxx = (_call(f, x + h, p, t) - 2 * f0 + _call(f, x - h, p, t)) / (h * h)
    fpp = (_call(f, x, p + h, t) - 2 * f0 + _call(f, x, p - h, t)) / (h * h)
    return ft - fxx / 4 + fpp / (4 * t * t)


def fd_residual(f: Callable, grid: GridSpec = GridSpec()) -> ResidualReport:
    """Central-difference PSDE residual of a numeric f(x, p, t) on a grid.

    The steps h, h/2, h/4, ... are used; the order is log2 of the ratio of
    successive changes of the residual, so it is meaningful also when the
    residual tends to a nonzero limit."""
    steps = [grid.h / 2**k for k in range(grid.refinements)]
    pts = list(grid.points())
    tables = []
    with mpmath.workprec(grid.precision_bits):
        for h in steps:
            hm = mpmath.mpf(h)
            tables.append(
                [_stencil(f, mpmath.mpf(x), mpmath.mpf(p), mpmath.mpf(t), hm) for x, p, t in pts]
            )
        last = tables[-1]
        imax = max(range(len(pts)), key=lambda j: abs(last[j]))
        per_step = [float(max(abs(v) for v in tab)) for tab in tables]
        diffs = [
            max(abs(a - b) for a, b in zip(tables[k], tables[k + 1])) for k in range(len(tables) - 1)
        ]
        orders = [
            float(mpmath.log(diffs[k] / diffs[k + 1], 2))
            for k in range(len(diffs) - 1)
            if diffs[k + 1] > 0 and diffs[k] > 0
        ]
    return ResidualReport(
        max_residual=float(abs(last[imax])),
        location=pts[imax],
        steps=steps,
        per_step=per_step,
        order=orders[-1] if orders else None,
        limit=float(last[imax]),
    )


def quadrature(f: Callable, interval, tol: float = 1e-12, precision_bits: int = 128, center=0, sigma=None):
    """Adaptive tanh-sinh quadrature at high precision.

    An infinite interval with a given ``sigma`` is truncated to
    center +- 12 sigma (Gaussian tails beyond that are below 1e-60)."""
    a, b = interval
    with mpmath.workprec(precision_bits):
        if sigma is not None:
            c, s = mpmath.mpf(center), mpmath.mpf(sigma)
            if a == -math.inf:
                a = c - 12 * s
            if b == math.inf:
                b = c + 12 * s
            pts = [mpmath.mpf(a), c, mpmath.mpf(b)] if mpmath.mpf(a) < c < mpmath.mpf(b) else [a, b]
        else:
            pts = [mpmath.mpf(a) if a != -math.inf else -mpmath.inf, mpmath.mpf(b) if b != math.inf else mpmath.inf]
        val, err = mpmath.quad(f, pts, error=True, maxdegree=10)
    if not mpmath.isfinite(val) or err > tol:
        raise NonConvergent(f"quadrature error estimate {float(err):.3g} exceeds {tol:.3g}")
    return val


TEST_FUNCTIONS = {
    "gauss": (lambda y: mpmath.exp(-y * y)),
    "lorentz": (lambda y: 1 / (1 + y * y)),
    "cos": (lambda y: mpmath.cos(y)),
    "one": (lambda y: mpmath.mpf(1)),
}


def delta_limit_test(
    kind: str = "x_side",
    phi: str = "gauss",
    eps=(Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)),
    center=0,
    t_edge=0,
    tol: float = 1e-20,
) -> dict:
    """|int K phi - phi(center)| as the kernel approaches its delta limit.

    ``x_side``: K_x(x, t_edge + eps) with source at x = center.
    ``p_side``: K_p(p, t_edge - eps) with sink time t_edge (> eps).
    """
    if phi not in TEST_FUNCTIONS:
        raise ValueError(f"unknown test function {phi!r}")
    fn = TEST_FUNCTIONS[phi]
    center, t_edge = Fraction(center), Fraction(t_edge)
    rows = []
    with mpmath.workprec(128):
        target = fn(to_mpf(center))
        for e in eps:
            e = Fraction(e)
            if kind == "x_side":
                K = kernel("x_side", center, t_edge)
                t = t_edge + e
                width = mpmath.sqrt(to_mpf(e) / 2)
                g = lambda y: K.evaluate(y, 0, t) * fn(y)  # noqa: E731
            elif kind == "p_side":
                if t_edge <= e:
                    raise InvalidParameter("p-side test needs t_edge > eps")
                K = kernel("p_side", 0, 0, center, t_edge)
                t = t_edge - e
                width = mpmath.sqrt(to_mpf(e) / (2 * to_mpf(t) * to_mpf(t_edge)))
                g = lambda y: K.evaluate(0, y, t) * fn(y)  # noqa: E731
            else:
                raise ValueError(f"unknown kernel kind {kind!r}")
            val = quadrature(g, (-math.inf, math.inf), tol, 128, to_mpf(center), width)
            rows.append({"eps": str(e), "integral": float(val), "error": float(abs(val - target))})
    for a, b in zip(rows, rows[1:]):
        b["ratio"] = a["error"] / b["error"] if b["error"] > 0 else math.inf
    ratios = [r["ratio"] for r in rows[1:]]
    if phi == "one":
        ok = all(r["error"] < 1e-15 for r in rows)
    else:
        ok = all(5 <= q <= 20 for q in ratios)
    return {"kind": kind, "phi": phi, "center": str(center), "edge": str(t_edge), "rows": rows, "first_order": ok}


def integral_invariance(gamma, t_values=(Fraction(1, 4), Fraction(1), Fraction(4)), tol: float = 1e-10) -> dict:
    """The x- and p-integrals of the conformal factors

        int (1 + gamma t)^(-1/2) exp(-gamma x^2/(1 + gamma t)) dx
        int (1 + gamma/t)^(-1/2) exp(-gamma p^2/(1 + gamma/t)) dp

    for several t, compared with sqrt(pi) and with each other."""
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise InvalidParameter("gamma must be positive")
    rows = []
    with mpmath.workprec(128):
        g = to_mpf(gamma)
        for t in t_values:
            tm = to_mpf(Fraction(t))
            if tm <= 0:
                raise InvalidParameter("t values must be positive")
            ax, ap = 1 + g * tm, 1 + g / tm
            fx = lambda y, a=ax: mpmath.exp(-g * y * y / a) / mpmath.sqrt(a)  # noqa: E731
            fp = lambda y, a=ap: mpmath.exp(-g * y * y / a) / mpmath.sqrt(a)  # noqa: E731
            ix = quadrature(fx, (-math.inf, math.inf), 1e-20, 128, 0, mpmath.sqrt(ax / (2 * g)))
            ip = quadrature(fp, (-math.inf, math.inf), 1e-20, 128, 0, mpmath.sqrt(ap / (2 * g)))
            rows.append({"t": str(t), "x_integral": float(ix), "p_integral": float(ip), "_ix": ix, "_ip": ip})
        sp = mpmath.sqrt(mpmath.pi)
        vals = [r["_ix"] for r in rows] + [r["_ip"] for r in rows]
        spread = float(max(vals) - min(vals))
        dev = float(max(abs(v - sp) for v in vals))
        closed = float(mpmath.sqrt(mpmath.pi / g))
    for r in rows:
        del r["_ix"], r["_ip"]
    return {
        "gamma": str(gamma),
        "rows": rows,
        "sqrt_pi": float(sp),
        "closed_form_sqrt_pi_over_gamma": closed,
        "max_deviation_from_sqrt_pi": dev,
        "spread_over_t": spread,
        "equals_sqrt_pi": dev < tol,
        "independent_of_t": spread < tol,
    }


def thermal_mass(nbar, t=1, tol: float = 1e-10) -> dict:
    """Double integral of the thermal distribution over the (x, p) plane."""
    nbar, t = Fraction(nbar), Fraction(t)
    Q = thermal(nbar)
    a = 2 * nbar + 1
    with mpmath.workprec(128):
        tm = to_mpf(t)
        # the density factorizes, so the plane integral is a product of two line integrals
        pre = Q.evaluate(0, 0, t)
        fx = lambda y: Q.evaluate(y, 0, t) / pre  # noqa: E731
        fp = lambda y: Q.evaluate(0, y, t)  # noqa: E731
        sx = mpmath.sqrt((tm + a) / 2)
        sp = mpmath.sqrt((a * tm + 1) / (2 * tm))
        val = quadrature(fx, (-math.inf, math.inf), 1e-20, 128, 0, sx) * quadrature(
            fp, (-math.inf, math.inf), 1e-20, 128, 0, sp
        )
        dev = float(abs(val - 2 * mpmath.pi))
    return {"nbar": str(nbar), "t": str(t), "integral": float(val), "deviation_from_2pi": dev, "pass": dev < tol}
