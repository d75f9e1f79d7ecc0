"""One-parameter groups exp(lam A_i): exact actions and a numeric flow check.

Every action has the form

    exp(lam A) f (x, p, t) = sigma(x, p, t) f(X, P, T)

where (X, P, T) follow the vector-field part of A and sigma collects the
multiplicative part along the orbit.  Exact parameters are rational; G2 is
parameterised by the scale s = e^lam and G4 by a hyperbola point
(c, s) = (cosh lam, sinh lam).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import (
    IndexOutOfRange,
    InvalidParameter,
    PreconditionViolated,
    SingularFlow,
    SubstitutionOutOfFamily,
)
from .gaussian import GaussianExpr
from .operators import build_psde_L, op_apply
from .scalar import ONE, P, ScalarExpr, Mobius, Substitution, T, X, linear_power
from .solutions import heat_polynomial, kernel, product, thermal
from .symmetry import make_generator_A

__all__ = [
    "GroupAction",
    "FlowState",
    "identity_param",
    "hyperbola_point",
    "group_action",
    "apply_group",
    "conformal_G3",
    "compose_params",
    "group_law_check",
    "closed_form_flow",
    "flow_integrate",
    "flow_grid_check",
    "infinitesimal_check",
    "conformal_kernel_identity",
    "transformed_heat_poly",
]


def _sign(v) -> int:
    if v == 0:
        raise SubstitutionOutOfFamily("reference point sits on a branch point of the multiplier")
    return 1 if v > 0 else -1


def identity_param(i: int):
    """Parameter value giving the identity map."""
    if i == 2:
        return Fraction(1)
    if i == 4:
        return (Fraction(1), Fraction(0))
    return Fraction(0)


def hyperbola_point(u) -> tuple:
    """Rational point (c, s) with c^2 - s^2 = 1, i.e. lam = 2 artanh(u), |u| < 1."""
    u = Fraction(u)
    if abs(u) >= 1:
        raise InvalidParameter("hyperbola parameter must satisfy |u| < 1")
    d = 1 - u * u
    return ((1 + u * u) / d, 2 * u / d)


def compose_params(i: int, a, b):
    """Parameter of G_i(a) G_i(b)."""
    if i == 2:
        return Fraction(a) * Fraction(b)
    if i == 4:
        (c1, s1), (c2, s2) = a, b
        return (c1 * c2 + s1 * s2, c1 * s2 + s1 * c2)
    return Fraction(a) + Fraction(b)


def _check_param(i: int, param):
    if i == 2:
        s = Fraction(param)
        if s <= 0:
            raise InvalidParameter("the G2 scale must be positive")
        return s
    if i == 4:
        c, s = (Fraction(v) for v in param)
        if c * c - s * s != 1 or c <= 0:
            raise InvalidParameter("G4 needs a point on the right branch of c^2 - s^2 = 1")
        return (c, s)
    return Fraction(param)


@dataclass(frozen=True)
class GroupAction:
    """sigma * f o (coordinate map) for one generator and one exact parameter."""

    i: int
    param: object
    substitution: Substitution
    multiplier: GaussianExpr
    window: str = "t > 0"

    def apply(self, psi) -> GaussianExpr:
        psi = GaussianExpr.coerce(psi)
        return self.multiplier * psi.subst(self.substitution)

    def images(self):
        """(X, P, T) as ScalarExprs."""
        s = self.substitution
        return (
            X if s.x is None else s.x,
            P if s.p is None else s.p,
            s.t_image(),
        )


def group_action(i: int, param, t_ref=Fraction(1)) -> GroupAction:
    """Exact coordinate map and multiplier of exp(lam A_i).

    ``t_ref`` is a point of the evaluation window; it fixes the real branch of
    the half-integer powers in the multiplier (a constant phase is dropped).
    """
    if not isinstance(i, int) or not 1 <= i <= 9:
        raise IndexOutOfRange(f"generator index must be in 1..9, got {i!r}")
    param = _check_param(i, param)
    t_ref = Fraction(t_ref)
    half = Fraction(1, 2)
    if i == 1:
        lam = param
        if lam == 0:
            return GroupAction(i, lam, Substitution(t_ref=t_ref), GaussianExpr.from_scalar(ONE))
        so, sn = _sign(t_ref), _sign(t_ref + lam)
        inv = linear_power(1, lam, -1)
        sub = Substitution(p=P * T * inv, t=Mobius.shift(lam), t_ref=t_ref)
        pre = linear_power(1, 0, half, so) * linear_power(1, lam, -half, sn)
        arg = -(P * P * T).scale(lam) * inv
        return GroupAction(i, lam, sub, GaussianExpr.exp(arg, pre), f"t > 0, t + {lam} > 0")
    if i == 2:
        s = param
        sub = Substitution(x=X.scale(s), p=P.scale(1 / s), t=Mobius.scale(s * s), t_ref=t_ref)
        return GroupAction(i, s, sub, GaussianExpr.from_scalar(ONE))
    if i == 3:
        lam = param
        if lam == 0:
            return GroupAction(i, lam, Substitution(t_ref=t_ref), GaussianExpr.from_scalar(ONE))
        sd = _sign(1 - lam * t_ref)
        inv = linear_power(-lam, 1, -1)
        sub = Substitution(x=X * inv, t=Mobius.conformal(-lam), t_ref=t_ref)
        pre = linear_power(-lam, 1, -half, sd)
        arg = (X * X).scale(lam) * inv
        return GroupAction(i, lam, sub, GaussianExpr.exp(arg, pre), f"1 - {lam} t > 0")
    if i == 4:
        c, s = param
        tinv = ScalarExpr.factor(0, -1)
        sub = Substitution(x=X.scale(c) + (T * P).scale(s), p=P.scale(c) + (X * tinv).scale(s), t_ref=t_ref)
        arg = ((X * X) * tinv + T * P * P).scale(s * s) + (X * P).scale(2 * c * s)
        return GroupAction(i, (c, s), sub, GaussianExpr.exp(arg))
    lam = param
    if i == 5:
        sub = Substitution(x=X + T.scale(lam), t_ref=t_ref)
        return GroupAction(i, lam, sub, GaussianExpr.exp(X.scale(2 * lam) + T.scale(lam * lam)))
    if i == 6:
        tinv = ScalarExpr.factor(0, -1)
        sub = Substitution(p=P + tinv.scale(lam), t_ref=t_ref)
        return GroupAction(
            i, lam, sub, GaussianExpr.exp(P.scale(2 * lam) + tinv.scale(lam * lam))
        )
    if i == 7:
        return GroupAction(i, lam, Substitution(x=X + lam, t_ref=t_ref), GaussianExpr.from_scalar(ONE))
    if i == 8:
        return GroupAction(i, lam, Substitution(p=P + lam, t_ref=t_ref), GaussianExpr.from_scalar(ONE))
    # i == 9: constant factor e^lam
    return GroupAction(i, lam, Substitution(t_ref=t_ref), GaussianExpr.exp(ScalarExpr.const(lam)))


def apply_group(i: int, param, psi, t_ref=Fraction(1), check: bool = False) -> GaussianExpr:
    """exp(lam A_i) psi, exactly.  With ``check`` the PSDE residual of the
    result is required to vanish whenever psi itself is a solution."""
    out = group_action(i, param, t_ref).apply(psi)
    if check:
        L = build_psde_L()
        if GaussianExpr.coerce(op_apply(L, GaussianExpr.coerce(psi))).is_zero():
            r = GaussianExpr.coerce(op_apply(L, out))
            if not r.is_zero():
                raise PreconditionViolated("group image is not a solution", r)
    return out


def conformal_G3(gamma, psi, t_ref=Fraction(1)) -> GaussianExpr:
    """The conformal map in the sign convention (1 + gamma t)^(-1/2) ...;
    this is exp(-gamma A3)."""
    return apply_group(3, -Fraction(gamma), psi, t_ref)


# ---------------------------------------------------------------------------
# group law


_LAW_PROBE = None


def _law_probe() -> GaussianExpr:
    global _LAW_PROBE
    if _LAW_PROBE is None:
        # generic non-solution with x, p and t dependence in both parts
        _LAW_PROBE = GaussianExpr.exp(
            -(X * X) + (X * P).scale(Fraction(1, 3)) - P * P * T, ONE + X * T + P * P
        ) + GaussianExpr.from_scalar(X * P - T)
    return _LAW_PROBE


def group_law_check(i: int, lam, mu, psi=None, t_ref=Fraction(1, 2)) -> dict:
    """G_i(lam) G_i(mu) psi == G_i(lam + mu) psi, exactly."""
    psi = _law_probe() if psi is None else GaussianExpr.coerce(psi)
    lhs = apply_group(i, lam, apply_group(i, mu, psi, t_ref), t_ref)
    both = compose_params(i, _check_param(i, lam), _check_param(i, mu))
    rhs = apply_group(i, both, psi, t_ref)
    ok = (lhs - rhs).is_zero()
    return {
        "generator": f"A{i}",
        "params": [str(lam), str(mu)] if i != 4 else [list(map(str, lam)), list(map(str, mu))],
        "composed": str(both) if i != 4 else list(map(str, both)),
        "holds": ok,
    }


# ---------------------------------------------------------------------------
# numeric flows


@dataclass
class FlowState:
    """End point of the orbit of (x, p, t, 1) after parameter lam."""

    X: float
    P: float
    T: float
    sigma: float
    lam: float
    trajectory: list = field(default_factory=list)

    def as_row(self):
        return (self.lam, self.X, self.P, self.T, self.sigma)


def closed_form_flow(i: int, lam: float, x, p, t):
    """(X, P, T, sigma) of exp(lam A_i) for real lam; numpy broadcasting."""
    x, p, t = (np.asarray(v, dtype=float) for v in (x, p, t))
    one = np.ones(np.broadcast(x, p, t).shape)
    if i == 1:
        Tn = t + lam
        return x * one, p * t / Tn, Tn, np.sqrt(t / Tn) * np.exp(-lam * t * p * p / Tn)
    if i == 2:
        s = math.exp(lam)
        return s * x, p / s, s * s * t, one
    if i == 3:
        d = 1 - lam * t
        return x / d, p * one, t / d, np.exp(lam * x * x / d) / np.sqrt(d)
    if i == 4:
        c, s = math.cosh(lam), math.sinh(lam)
        sig = np.exp(s * s * (x * x / t + t * p * p) + 2 * c * s * x * p)
        return c * x + s * t * p, c * p + s * x / t, t * one, sig
    if i == 5:
        return x + lam * t, p * one, t * one, np.exp(2 * lam * x + lam * lam * t)
    if i == 6:
        return x * one, p + lam / t, t * one, np.exp(2 * lam * p + lam * lam / t)
    if i == 7:
        return x + lam, p * one, t * one, one
    if i == 8:
        return x * one, p + lam, t * one, one
    if i == 9:
        return x * one, p * one, t * one, math.exp(lam) * one
    raise ValueError(f"generator index must be in 1..9, got {i!r}")


def _coefficient_functions(i: int):
    A = make_generator_A(i)
    parts = [A.coeff(k) for k in ((1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0))]

    def f(x, p, t):
        return [c.evaluate_array(x, p, t) if c else np.zeros(np.broadcast(x, p, t).shape) for c in parts]

    return f


def _rk4(i: int, lam_target: float, x, p, t, step: float, record_every: int = 0):
    coeffs = _coefficient_functions(i)

    def rhs(state):
        # the last slot carries log sigma: d(log sigma)/dlam = m
        Xv, Pv, Tv, _ = state
        a, b, g, m = coeffs(Xv, Pv, Tv)
        return np.array([b, g, a, m])

    state = np.array([np.asarray(x, float), np.asarray(p, float), np.asarray(t, float), np.zeros(np.shape(x))])
    nsteps = max(1, int(round(abs(lam_target) / step)))
    h = lam_target / nsteps
    t_sign = np.sign(state[2])
    rows = []
    for k in range(nsteps):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * h * k1)
        k3 = rhs(state + 0.5 * h * k2)
        k4 = rhs(state + h * k3)
        state = state + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(state)) or np.any(np.sign(state[2]) != t_sign) or np.any(np.abs(state[2]) > 1e12):
            raise SingularFlow(f"flow of A{i} leaves the regular region near lam = {(k + 1) * h:g}")
        if record_every and (k + 1) % record_every == 0:
            rows.append(((k + 1) * h, *(float(v.flat[0]) for v in state[:3]), math.exp(float(state[3].flat[0]))))
    state[3] = np.exp(state[3])
    return state, rows


def flow_integrate(i: int, lam_target: float, start, step: float = 1e-3, record_every: int = 0) -> FlowState:
    """Classical RK4 on dX/dlam = beta, dP/dlam = gamma, dT/dlam = alpha,
    dsigma/dlam = sigma * m, with the coefficients read off A_i.

    sigma is carried as log sigma, which turns its equation into a plain
    quadrature along the orbit."""
    x, p, t = (float(v) for v in start)
    if t == 0:
        raise SingularFlow("start point has t = 0")
    state, rows = _rk4(i, float(lam_target), np.array([x]), np.array([p]), np.array([t]), step, record_every)
    Xv, Pv, Tv, S = (float(v[0]) for v in state)
    return FlowState(Xv, Pv, Tv, S, float(lam_target), rows)


def flow_grid_check(lam: float = 1.0, step: float = 1e-3, grid=None, generators=range(1, 10)) -> dict:
    """Max |RK4 - closed form| over a start grid, per generator."""
    if grid is None:
        # t < 1 keeps the A3 orbit regular up to lam = 1
        vals = np.array([-1.0, 0.0, 1.0])
        tv = np.array([0.25, 0.5, 0.75])
        xs, ps, ts = np.meshgrid(vals, vals, tv, indexing="ij")
        grid = (xs.ravel(), ps.ravel(), ts.ravel())
    xs, ps, ts = (np.asarray(g, float) for g in grid)
    out = {}
    for i in generators:
        state, _ = _rk4(i, lam, xs, ps, ts, step)
        ref = closed_form_flow(i, lam, xs, ps, ts)
        err = max(float(np.max(np.abs(state[k] - ref[k]))) for k in range(4))
        out[f"A{i}"] = err
    return {"lambda": lam, "step": step, "points": int(xs.size), "max_error": out, "worst": max(out.values())}


def _lam_pair(i: int, h: Fraction):
    """Exact parameters for +-lam and the matching real lam."""
    if i == 2:
        s = 1 + h
        return s, 1 / s, math.log(s)
    if i == 4:
        up, um = hyperbola_point(h), hyperbola_point(-h)
        return up, um, 2 * math.atanh(h)
    return h, -h, float(h)


def infinitesimal_check(i: int, psi, hs=(Fraction(1, 10), Fraction(1, 20), Fraction(1, 40)), points=None, t_ref=Fraction(1)) -> dict:
    """Central difference in lam of apply_group against A_i psi at sample points.

    Returns the errors per step and the observed order (about 2)."""
    psi = GaussianExpr.coerce(psi)
    if points is None:
        points = [(Fraction(1, 3), Fraction(-1, 2), Fraction(1)), (Fraction(-1, 4), Fraction(1, 5), Fraction(3, 2))]
    image = GaussianExpr.coerce(op_apply(make_generator_A(i), psi))
    errs = []
    with mpmath.workprec(160):
        for h in hs:
            ap, am, lam = _lam_pair(i, Fraction(h))
            gp = group_action(i, ap, t_ref).apply(psi)
            gm = group_action(i, am, t_ref).apply(psi)
            e = mpmath.mpf(0)
            for x, p, t in points:
                fd = (gp.evaluate(x, p, t) - gm.evaluate(x, p, t)) / (2 * mpmath.mpf(lam))
                e = max(e, abs(fd - image.evaluate(x, p, t)))
            errs.append(float(e))
    orders = [
        math.log2(errs[k] / errs[k + 1]) if errs[k + 1] > 0 and errs[k] > 0 else float("inf")
        for k in range(len(errs) - 1)
    ]
    return {"generator": f"A{i}", "steps": [str(h) for h in hs], "errors": errs, "orders": orders}


# ---------------------------------------------------------------------------
# conformal kernels and thermal states


def conformal_kernel_identity(t0=-1, t1=1, gamma=Fraction(1, 3)) -> dict:
    """Kernels from group images of 1, and the thermal state as their product.

    * exp(-gamma3 A3) 1 with gamma3 = -1/t0 is the x-kernel shape
      (1 - t/t0)^(-1/2) exp(-x^2/(t - t0)).
    * exp(-t1 A1) 1 is the p-side kernel up to a constant factor.
    * (exp(-gamma A3) 1)(exp(gamma A1) 1) = thermal(nbar) / (2 gamma)
      with 1/gamma = 2 nbar + 1.
    """
    t0, t1, gamma = Fraction(t0), Fraction(t1), Fraction(gamma)
    half = Fraction(1, 2)
    # x side, window t > t0 (t0 < 0 keeps t_ref = 1 inside)
    tref_x = max(Fraction(1), t0 + 1)
    g3 = conformal_G3(-1 / t0, 1, tref_x)
    sx = 1 if -1 / t0 > 0 else -1
    kx_shape = GaussianExpr.exp(
        -(X * X) * ScalarExpr.factor(-t0, -1), linear_power(-1 / t0, 1, -half, 1)
    )
    x_ok = (g3 - kx_shape).is_zero()
    kx = kernel("x_side", 0, t0)
    ratio_x = g3.evaluate(0, 0, tref_x) / kx.evaluate(0, 0, tref_x)
    # p side, window 0 < t < t1
    tref_p = t1 / 2
    g1 = apply_group(1, -t1, 1, tref_p)
    kp = kernel("p_side", 0, 0, 0, t1)
    p_shape = GaussianExpr.exp(
        (P * P * T).scale(t1) * ScalarExpr.factor(-t1, -1),
        ScalarExpr.factor(0, half) * ScalarExpr.factor(-t1, -half, -1),
    )
    p_ok = (g1 - p_shape).is_zero()
    const_p = kp.evaluate(0, 0, tref_p) / g1.evaluate(0, 0, tref_p)
    p_ratio_const = (kp - g1 * GaussianExpr.from_scalar(ScalarExpr.pi_power(-1) * ScalarExpr.sqrt_const(t1))).is_zero()
    # thermal product
    if gamma <= 0 or gamma > 1:
        raise InvalidParameter("gamma must lie in (0, 1] so that nbar >= 0")
    nbar = (1 / gamma - 1) / 2
    prod = product(conformal_G3(gamma, 1), apply_group(1, gamma, 1))
    th_ok = (GaussianExpr.from_scalar(ScalarExpr.const(2 * gamma)) * prod - thermal(nbar)).is_zero()
    return {
        "x_kernel_shape": x_ok,
        "x_kernel_ratio": str(mpmath.nstr(ratio_x, 15)),
        "p_kernel_shape": p_ok,
        "p_kernel_constant": str(mpmath.nstr(const_p, 15)),
        "p_kernel_constant_is_sqrt_t1_over_pi": p_ratio_const,
        "thermal_gamma": str(gamma),
        "thermal_nbar": str(nbar),
        "thermal_product_times_2gamma": th_ok,
        "all_pass": x_ok and p_ok and p_ratio_const and th_ok,
    }


def transformed_heat_poly(gamma, n: int) -> GaussianExpr:
    """Conformal image (1 + gamma t)^(-1/2) exp(-gamma x^2/(1 + gamma t))
    v_n(2x/(1 + gamma t), t/(1 + gamma t)) of the heat polynomial."""
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise InvalidParameter("gamma must be positive for a normalisable image")
    return conformal_G3(gamma, heat_polynomial(n))
