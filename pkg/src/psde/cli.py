"""Command-line interface: ``python3 -m psde <subcommand>`` or ``psde <subcommand>``.

Exit codes: 0 all checks passed, 1 an identity failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import __version__
from .errors import PSDEError

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _frac(text) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _frac_list(text) -> list:
    return [_frac(v) for v in text.split(",") if v.strip()]


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _report(command, anchor, inputs, result, passed, args, tolerances=None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "anchor": anchor,
        "inputs": _jsonable(inputs),
        "seed": args.seed,
        "tolerances": tolerances or {"exact": 0},
        "pass": bool(passed),
        "result": _jsonable(result),
    }


_TEXT_MODE = False


def _emit_json(rep, out):
    if _TEXT_MODE:
        out.write(f"{rep['command']}: {'PASS' if rep['pass'] else 'FAIL'}\n")
        res = rep["result"]
        if isinstance(res, dict):
            for k in sorted(res):
                if isinstance(res[k], (str, int, float, bool)) or res[k] is None:
                    out.write(f"  {k} = {res[k]}\n")
        return
    out.write(json.dumps(rep, indent=2, sort_keys=True) + "\n")


def _emit_csv(header, rows, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if not isinstance(v, str) else v for v in r])


# ---------------------------------------------------------------------------
# subcommands


def cmd_table(args, out):
    from .lie import analyze_structure, contract, so31_table
    from .symmetry import (
        A_NAMES,
        CONTRACTION_NAMES,
        CONTRACTION_ORDER,
        CONTRACTION_SCALING,
        X_NAMES,
        commutator_table,
        expected_A_table,
        expected_X_table,
        make_generator_A,
        make_generator_X,
        vf_commutator_table,
    )

    if args.basis == "so31":
        tab = contract(so31_table(), CONTRACTION_SCALING, CONTRACTION_NAMES, CONTRACTION_ORDER)
        result = {"table": tab.to_dict(), "jacobi": tab.jacobi_holds()}
        if args.gamma is not None:
            spec = tab.at(args.gamma)
            result["at_gamma"] = spec.to_dict()
            if args.gamma != 0:
                result["structure"] = analyze_structure(spec).to_dict()
        passed = result["jacobi"]
        anchor = "so(3,1) with gamma-scaled basis"
    else:
        if args.basis == "A":
            tab = commutator_table([make_generator_A(i) for i in range(1, 10)], A_NAMES)
            expected = expected_A_table()
        else:
            tab = vf_commutator_table([make_generator_X(i) for i in range(1, 10)], X_NAMES)
            expected = expected_X_table()
        mism = tab.mismatches(expected)
        entries = tab.to_dict()["brackets"]
        result = {
            "table": tab.to_dict(),
            "brackets_checked": len(entries),
            "nonzero_brackets": sum(1 for v in entries.values() if v != "0"),
            "matches_expected": not mism,
            "first_mismatch": list(mism[0]) if mism else None,
            "structure": analyze_structure(tab).to_dict(),
        }
        passed = not mism
        anchor = "commutation relations among the infinitesimal generators"
    _emit_json(_report("table", anchor, {"basis": args.basis, "gamma": args.gamma}, result, passed, args), out)
    return EXIT_OK if passed else EXIT_FAIL


def _verify_symmetry():
    from .operators import build_psde_L
    from .symmetry import check_symmetry, make_generator_A

    L = build_psde_L()
    expected = {2: "2", 3: "2 * t"}
    rows = {}
    for i in range(1, 10):
        xi = check_symmetry(L, make_generator_A(i))
        txt = None if xi is None else xi.to_text()
        rows[f"A{i}"] = {"xi": txt, "pass": txt == expected.get(i, "0")}
    return rows, all(r["pass"] for r in rows.values())


def _verify_determining(seed):
    import random

    from .symmetry import check_determining_equations, general_symmetry_family, make_generator_X

    rows = {f"X{i}": check_determining_equations(make_generator_X(i))["all_pass"] for i in range(1, 10)}
    rng = random.Random(seed)
    fam = []
    for _ in range(5):
        c = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(9)]
        fam.append({"c": [str(v) for v in c], "pass": check_determining_equations(general_symmetry_family(c))["all_pass"]})
    rows["family"] = fam
    return rows, all(v for k, v in rows.items() if k != "family") and all(f["pass"] for f in fam)


def _verify_duality():
    from .operators import build_psde_L
    from .solutions import dual, kernel, p_operator, residual, x_operator
    from .scalar import T
    from .symmetry import exchange_involution, make_generator_A

    L = build_psde_L()
    Lx = exchange_involution(L)
    # L is mapped to -t^2 L under x <-> p, t -> 1/t
    inv_ok = (Lx + L.scale(T * T)).is_zero()
    twice = all((exchange_involution(exchange_involution(make_generator_A(i))) - make_generator_A(i)).is_zero() for i in range(1, 10))
    kx = kernel("x_side", 0, -1)
    d = dual(kx)
    res = {
        "L_maps_to_minus_t2_L": inv_ok,
        "involution_twice_identity": twice,
        "dual_of_x_kernel_solves_p_equation": residual(d, p_operator()).is_zero(),
        "dual_twice_identity": dual(d) == kx,
        "x_kernel_solves_x_equation": residual(kx, x_operator()).is_zero(),
    }
    return res, all(res.values())


def _verify_lift():
    from .scalar import ONE, P, T, X
    from .gaussian import GaussianExpr
    from .solutions import lift_standard

    inputs = [
        GaussianExpr.from_scalar(ONE),
        GaussianExpr.from_scalar(X),
        GaussianExpr.from_scalar(X * X + T.scale(2)),
        GaussianExpr.from_scalar(P * P - T.scale(2)),
        GaussianExpr.exp(X + P, ONE),
    ]
    rows = []
    for u in inputs:
        _, desc = lift_standard(u)
        rows.append({"u": u.to_text(), **desc})
    ok = all(r["matched"] == "unscaled" and r["scale_relation_holds"] for r in rows)
    return rows, ok


def cmd_verify(args, out):
    from .symmetry import contraction_check, virasoro_check

    kind = args.kind
    if kind == "symmetry":
        result, ok = _verify_symmetry()
        anchor = "[L, A_i] = xi_i L"
    elif kind == "determining":
        result, ok = _verify_determining(args.seed)
        anchor = "determining equations"
    elif kind == "virasoro":
        result = virasoro_check(args.range)
        ok = result["all_pass"]
        anchor = "Virasoro realization d_n = -t^(n+1) L"
    elif kind == "contraction":
        result = contraction_check()
        ok = result["all_pass"]
        anchor = "contraction of so(3,1)"
    elif kind == "duality":
        result, ok = _verify_duality()
        anchor = "x <-> p, t -> 1/t duality"
    else:
        result, ok = _verify_lift()
        anchor = "point transformation from the standard equation"
    _emit_json(_report("verify", anchor, {"kind": kind, "range": args.range}, result, ok, args), out)
    return EXIT_OK if ok else EXIT_FAIL


GRID_DEFAULT = {
    "x": [k / 2 for k in range(-4, 5)],
    "p": [k / 2 for k in range(-4, 5)],
    "t": [0.5, 1.0, 2.0],
}


def _parse_grid(text, window=None):
    if text is None:
        return None
    if text == "default":
        g = dict(GRID_DEFAULT)
        if window is not None:
            lo, hi = window
            g["t"] = [float(lo + (hi - lo) * k / 4) for k in (1, 2, 3)]
        return g
    # x=a:b:n;p=...;t=v1,v2
    g = {}
    for part in text.split(";"):
        name, _, spec = part.partition("=")
        if name not in ("x", "p", "t"):
            raise UsageError(f"bad grid component {part!r}")
        if ":" in spec:
            a, b, n = spec.split(":")
            a, b, n = float(_frac(a)), float(_frac(b)), int(n)
            g[name] = [a + (b - a) * k / (n - 1) for k in range(n)] if n > 1 else [a]
        else:
            g[name] = [float(_frac(v)) for v in spec.split(",")]
    for name in ("x", "p", "t"):
        g.setdefault(name, GRID_DEFAULT[name])
    return g


def _build_solution(args):
    from .solutions import generalized_hermite, heat_polynomial, hermite, kernel, thermal

    k = args.kind
    if k == "kernel":
        kind = "two_sided" if args.two_sided else ("p_side" if args.p_side else "x_side")
        expr = kernel(kind, args.x0, args.t0, args.p0, args.t1)
        window = {"x_side": (args.t0, args.t0 + 3), "p_side": (0, args.t1), "two_sided": (args.t0, args.t1)}[kind]
        params = {"kind": kind, "x0": args.x0, "t0": args.t0, "p0": args.p0, "t1": args.t1}
        if kind == "p_side":
            window = (max(Fraction(0), args.t0), args.t1)
        return expr, params, window
    if k == "thermal":
        return thermal(args.nbar), {"nbar": args.nbar}, None
    if k == "heatpoly":
        return heat_polynomial(args.n), {"n": args.n}, None
    if k == "hermite":
        return hermite(args.n), {"n": args.n}, None
    if k == "ghp":
        return generalized_hermite(args.n, args.alpha, args.beta), {"n": args.n, "alpha": args.alpha, "beta": args.beta}, None
    raise UsageError(f"unknown solution kind {k!r}")


def cmd_solution(args, out):
    from .solutions import residual

    expr, params, window = _build_solution(args)
    res = residual(expr)
    # Hermite-type families are polynomials in x, not solutions; only report
    claims_solution = args.kind in ("kernel", "thermal", "heatpoly")
    ok = res.is_zero() or not claims_solution
    grid = _parse_grid(args.grid, window)
    if args.emit == "expr":
        out.write(expr.to_text() + "\n")
        return EXIT_OK if ok else EXIT_FAIL
    if args.emit == "csv":
        if grid is None:
            grid = _parse_grid("default", window)
        rows = []
        for t in grid["t"]:
            for x in grid["x"]:
                for p in grid["p"]:
                    rows.append((x, p, t, float(expr.evaluate(_frac(repr(x)), _frac(repr(p)), _frac(repr(t))))))
        _emit_csv(["x", "p", "t", "value"], rows, out)
        return EXIT_OK if ok else EXIT_FAIL
    result = {
        "expression": expr.to_text(),
        "claims_solution": claims_solution,
        "residual_zero": res.is_zero(),
        "residual": res.to_text(),
    }
    if window is not None:
        result["window"] = [str(window[0]), str(window[1])]
    _emit_json(_report("solution", f"{args.kind} solution", params, result, ok, args), out)
    return EXIT_OK if ok else EXIT_FAIL


def _read_solution(path):
    from .gaussian import GaussianExpr

    if path is None:
        return GaussianExpr.parse("1")
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return GaussianExpr.parse(text.strip())


def cmd_apply_group(args, out):
    from .groups import apply_group
    from .solutions import residual

    i = args.i
    if i == 4:
        if args.c is None or args.s is None:
            raise UsageError("--i 4 needs --c and --s with c^2 - s^2 = 1")
        param = (args.c, args.s)
    elif i == 2:
        if args.scale is None:
            raise UsageError("--i 2 needs --scale s > 0")
        param = args.scale
    else:
        if args.lam is None:
            raise UsageError(f"--i {i} needs --lambda")
        param = args.lam
    psi = _read_solution(args.solution)
    img = apply_group(i, param, psi, args.t_ref)
    was_solution = residual(psi).is_zero()
    still = residual(img).is_zero()
    ok = still or not was_solution
    if args.emit == "expr":
        out.write(img.to_text() + "\n")
        return EXIT_OK if ok else EXIT_FAIL
    result = {
        "input": psi.to_text(),
        "image": img.to_text(),
        "input_is_solution": was_solution,
        "image_is_solution": still,
    }
    inputs = {"i": i, "param": list(param) if isinstance(param, tuple) else param, "t_ref": args.t_ref}
    _emit_json(_report("apply-group", f"one-parameter group G{i}", inputs, result, ok, args), out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_classify_b(args, out):
    from .scalar import ScalarExpr
    from .symmetry import classify_b

    b = ScalarExpr.parse(args.b)
    rec = classify_b(b)
    _emit_json(_report("classify-b", "u_t = u_xx + b(t) u_yy", {"b": args.b}, rec, rec["all_pass"], args), out)
    return EXIT_OK if rec["all_pass"] else EXIT_FAIL


def cmd_flow(args, out):
    from .groups import closed_form_flow, flow_grid_check, flow_integrate

    if args.grid_check:
        rep = flow_grid_check(args.lam, args.step)
        ok = rep["worst"] <= args.tol
        _emit_json(_report("flow", "flow versus closed form", {"lambda": args.lam, "step": args.step}, rep, ok, args, {"abs": args.tol}), out)
        return EXIT_OK if ok else EXIT_FAIL
    every = max(1, int(round(args.every / args.step))) if args.every else 0
    st = flow_integrate(args.i, args.lam, (args.x, args.p, args.t), args.step, every)
    ref = [float(v) for v in closed_form_flow(args.i, args.lam, args.x, args.p, args.t)]
    err = max(abs(a - b) for a, b in zip((st.X, st.P, st.T, st.sigma), ref))
    ok = err <= args.tol
    if args.format == "csv":
        rows = [(0.0, args.x, args.p, args.t, 1.0)] + list(st.trajectory)
        if not st.trajectory or st.trajectory[-1][0] != st.lam:
            rows.append(st.as_row())
        _emit_csv(["lambda", "X", "P", "T", "sigma"], rows, out)
        return EXIT_OK if ok else EXIT_FAIL
    result = {"end": dict(zip(("lambda", "X", "P", "T", "sigma"), st.as_row())), "closed_form": ref, "max_abs_error": err}
    inputs = {"i": args.i, "lambda": args.lam, "start": [args.x, args.p, args.t], "step": args.step}
    _emit_json(_report("flow", f"orbit of A{args.i}", inputs, result, ok, args, {"abs": args.tol}), out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_delta_test(args, out):
    from .numeric import delta_limit_test

    edge = args.edge if args.edge is not None else (Fraction(0) if args.kind == "x_side" else Fraction(1))
    phis = [args.phi] if args.phi != "all" else ["gauss", "lorentz", "cos"]
    reps = [delta_limit_test(args.kind, phi, args.eps, args.center, edge) for phi in phis]
    ok = all(r["first_order"] for r in reps)
    if args.format == "csv":
        rows = [(r["phi"], row["eps"], row["integral"], row["error"]) for r in reps for row in r["rows"]]
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["phi", "eps", "integral", "error"])
        for r in rows:
            w.writerow([r[0], r[1], repr(r[2]), repr(r[3])])
        return EXIT_OK if ok else EXIT_FAIL
    inputs = {"kind": args.kind, "phi": phis, "eps": args.eps, "center": args.center, "edge": edge}
    _emit_json(_report("delta-test", "delta initial condition", inputs, reps, ok, args, {"ratio_range": [5, 20]}), out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_invariance(args, out):
    from .numeric import integral_invariance

    reps = [integral_invariance(g, args.t, args.tol) for g in args.gamma]
    ok = all(r["equals_sqrt_pi"] and r["independent_of_t"] for r in reps)
    inputs = {"gamma": args.gamma, "t": args.t}
    _emit_json(_report("invariance", "integral invariance under squeezing", inputs, reps, ok, args, {"abs": args.tol}), out)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="psde", description="Exact and numeric checks for the phase-space diffusion equation.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks (recorded in reports)")
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common.add_argument("-o", "--output", help="write to a file instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", parents=[common], help="commutator table and structure report")
    p.add_argument("--basis", choices=["A", "X", "so31"], default="A")
    p.add_argument("--gamma", type=_frac, default=None)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", parents=[common], help="run one family of exact identities")
    p.add_argument("kind", choices=["symmetry", "determining", "virasoro", "contraction", "duality", "lift"])
    p.add_argument("--range", type=int, default=4)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solution", parents=[common], help="build a closed-form solution")
    p.add_argument("kind", choices=["kernel", "thermal", "heatpoly", "hermite", "ghp"])
    side = p.add_mutually_exclusive_group()
    side.add_argument("--two-sided", action="store_true")
    side.add_argument("--x-side", action="store_true")
    side.add_argument("--p-side", action="store_true")
    p.add_argument("--x0", type=_frac, default=Fraction(0))
    p.add_argument("--p0", type=_frac, default=Fraction(0))
    p.add_argument("--t0", type=_frac, default=Fraction(0))
    p.add_argument("--t1", type=_frac, default=Fraction(1))
    p.add_argument("--nbar", type=_frac, default=Fraction(0))
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--alpha", type=_frac, default=Fraction(1))
    p.add_argument("--beta", type=_frac, default=Fraction(1))
    p.add_argument("--grid", default=None, help="'default' or 'x=a:b:n;p=a:b:n;t=v1,v2'")
    p.add_argument("--emit", choices=["json", "expr", "csv"], default=None)
    p.set_defaults(func=cmd_solution)

    p = sub.add_parser("apply-group", parents=[common], help="apply exp(lambda A_i) to a solution")
    p.add_argument("--i", type=int, required=True, choices=range(1, 10), metavar="{1..9}")
    p.add_argument("--lambda", dest="lam", type=_frac, default=None)
    p.add_argument("--scale", type=_frac, default=None, help="s = e^lambda for i = 2")
    p.add_argument("--c", type=_frac, default=None, help="cosh lambda for i = 4")
    p.add_argument("--s", type=_frac, default=None, help="sinh lambda for i = 4")
    p.add_argument("--t-ref", type=_frac, default=Fraction(1))
    p.add_argument("--solution", default=None, help="file with an expression ('-' for stdin); default 1")
    p.add_argument("--emit", choices=["json", "expr"], default="json")
    p.set_defaults(func=cmd_apply_group)

    p = sub.add_parser("classify-b", parents=[common], help="classify u_t = u_xx + b(t) u_yy")
    p.add_argument("--b", required=True, help="coefficient b(t), e.g. '(2*t+1)^-2'")
    p.set_defaults(func=cmd_classify_b)

    p = sub.add_parser("flow", parents=[common], help="RK4 orbit of a generator")
    p.add_argument("--i", type=int, default=4, choices=range(1, 10), metavar="{1..9}")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--x", type=float, default=1.0)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--every", type=float, default=0.1, help="lambda spacing of CSV rows")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--grid-check", action="store_true", help="27-point check for all generators")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("delta-test", parents=[common], help="delta-limit convergence of a kernel")
    p.add_argument("--kind", choices=["x_side", "p_side"], default="x_side")
    p.add_argument("--phi", choices=["gauss", "lorentz", "cos", "one", "all"], default="all")
    p.add_argument("--eps", type=_frac_list, default=[Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)])
    p.add_argument("--center", type=_frac, default=Fraction(0))
    p.add_argument("--edge", type=_frac, default=None, help="t0 for x_side (default 0), t1 for p_side (default 1)")
    p.set_defaults(func=cmd_delta_test)

    p = sub.add_parser("invariance", parents=[common], help="integral invariance under squeezing")
    p.add_argument("--gamma", type=_frac_list, default=[Fraction(1), Fraction(1, 2)])
    p.add_argument("--t", type=_frac_list, default=[Fraction(1, 4), Fraction(1), Fraction(4)])
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_invariance)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "emit", "unset") is None:
        args.emit = "csv" if args.format == "csv" else ("expr" if args.format == "text" else "json")
    global _TEXT_MODE
    _TEXT_MODE = args.format == "text"
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except UsageError as exc:
        print(f"psde: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PSDEError, ValueError) as exc:
        print(f"psde: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = buf.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
