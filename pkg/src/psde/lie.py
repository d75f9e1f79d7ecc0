"""Structure-constant tables, structure analysis, orthogonal algebras and
contractions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateMetric, SingularContraction

__all__ = [
    "LaurentPoly",
    "LieAlgebraTable",
    "StructureReport",
    "analyze_structure",
    "so_table",
    "so31_table",
    "contract",
    "rref",
    "nullspace",
]


class LaurentPoly:
    """Laurent polynomial in one parameter (gamma) with rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        if isinstance(coeffs, (int, Fraction)):
            coeffs = {0: coeffs}
        self.coeffs = {k: Fraction(v) for k, v in (coeffs or {}).items() if v != 0}

    @classmethod
    def monomial(cls, c, power: int) -> "LaurentPoly":
        return cls({power: c})

    @staticmethod
    def coerce(v) -> "LaurentPoly":
        return v if isinstance(v, LaurentPoly) else LaurentPoly(v)

    def __add__(self, other):
        other = LaurentPoly.coerce(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-LaurentPoly.coerce(other))

    def __mul__(self, other):
        other = LaurentPoly.coerce(other)
        out = {}
        for a, va in self.coeffs.items():
            for b, vb in other.coeffs.items():
                out[a + b] = out.get(a + b, 0) + va * vb
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def min_power(self) -> Optional[int]:
        return min(self.coeffs) if self.coeffs else None

    def is_constant(self) -> bool:
        return all(k == 0 for k in self.coeffs)

    def constant(self) -> Fraction:
        return self.coeffs.get(0, Fraction(0))

    def at(self, gamma) -> Fraction:
        gamma = Fraction(gamma)
        return sum((v * gamma**k for k, v in self.coeffs.items()), Fraction(0))

    def __repr__(self):
        return f"LaurentPoly({self.to_text()!r})"

    def to_text(self, var: str = "gamma") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs):
            v = self.coeffs[k]
            if k == 0:
                parts.append(str(v))
            else:
                mono = var if k == 1 else f"{var}^{k}"
                parts.append(mono if v == 1 else f"-{mono}" if v == -1 else f"{v}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# exact linear algebra over Q


def rref(rows):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows, ncols):
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, pc in zip(red, pivots):
            v[pc] = -r[f]
        basis.append(v)
    return basis


def span_basis(vectors):
    red, _ = rref(vectors) if vectors else ([], [])
    return [r for r in red if any(r)]


def _in_span(basis, v):
    if not any(v):
        return True
    return len(span_basis(list(basis) + [v])) == len(span_basis(list(basis)))


# ---------------------------------------------------------------------------


@dataclass
class LieAlgebraTable:
    """Structure constants c[i][j][k] over a named basis plus a central slot.

    ``[e_i, e_j] = sum_k c[i][j][k] e_k + central[i][j] * Z`` where ``Z`` is an
    abstract central element.  Entries are :class:`LaurentPoly` values.
    """

    names: list
    c: list  # c[i][j] -> dict k -> LaurentPoly
    central: list  # central[i][j] -> LaurentPoly
    central_name: str = "1"
    parameter: str = "gamma"

    @property
    def dim(self) -> int:
        return len(self.names)

    @classmethod
    def from_brackets(cls, names, brackets, central_name="1") -> "LieAlgebraTable":
        """``brackets`` maps (i, j) -> (dict k -> coeff, central coeff) for i < j
        (or any ordered pair); the rest is filled by antisymmetry."""
        n = len(names)
        c = [[{} for _ in range(n)] for _ in range(n)]
        z = [[LaurentPoly() for _ in range(n)] for _ in range(n)]
        for (i, j), (vec, cen) in brackets.items():
            vec = {k: LaurentPoly.coerce(v) for k, v in vec.items() if v != 0}
            vec = {k: v for k, v in vec.items() if not v.is_zero()}
            cen = LaurentPoly.coerce(cen)
            c[i][j] = vec
            c[j][i] = {k: -v for k, v in vec.items()}
            z[i][j] = cen
            z[j][i] = -cen
        return cls(list(names), c, z, central_name)

    def bracket(self, i, j):
        return self.c[i][j], self.central[i][j]

    def has_central(self) -> bool:
        return any(not self.central[i][j].is_zero() for i in range(self.dim) for j in range(self.dim))

    def is_constant(self) -> bool:
        return all(
            v.is_constant() for row in self.c for d in row for v in d.values()
        ) and all(v.is_constant() for row in self.central for v in row)

    def check_antisymmetry(self) -> bool:
        n = self.dim
        for i in range(n):
            for j in range(n):
                a, b = self.c[i][j], self.c[j][i]
                keys = set(a) | set(b)
                if any(not (a.get(k, LaurentPoly()) + b.get(k, LaurentPoly())).is_zero() for k in keys):
                    return False
                if not (self.central[i][j] + self.central[j][i]).is_zero():
                    return False
        return True

    def jacobi_violations(self):
        """Triples (i, j, k) for which the Jacobi identity fails."""
        bad = []
        n = self.dim
        for i, j, k in itertools.combinations(range(n), 3):
            total = {}
            cen = LaurentPoly()
            for a, b, cc in ((i, j, k), (j, k, i), (k, i, j)):
                for m, v in self.c[a][b].items():
                    for q, w in self.c[m][cc].items():
                        total[q] = total.get(q, LaurentPoly()) + v * w
                    cen = cen + v * self.central[m][cc]
            if any(not v.is_zero() for v in total.values()) or not cen.is_zero():
                bad.append((self.names[i], self.names[j], self.names[k]))
        return bad

    def jacobi_holds(self) -> bool:
        return not self.jacobi_violations()

    def entry_text(self, i, j) -> str:
        vec, cen = self.bracket(i, j)
        parts = []
        for k in sorted(vec):
            coef = vec[k]
            ctext = coef.to_text(self.parameter)
            if ctext == "1":
                parts.append(self.names[k])
            elif ctext == "-1":
                parts.append(f"-{self.names[k]}")
            else:
                parts.append(f"({ctext})*{self.names[k]}")
        if not cen.is_zero():
            ctext = cen.to_text(self.parameter)
            parts.append(ctext if self.central_name == "1" else f"({ctext})*{self.central_name}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"

    def to_dict(self) -> dict:
        entries = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                entries[f"[{self.names[i]},{self.names[j]}]"] = self.entry_text(i, j)
        return {"basis": list(self.names), "central": self.central_name, "brackets": entries}

    def same_as(self, other: "LieAlgebraTable") -> bool:
        if self.dim != other.dim:
            return False
        for i in range(self.dim):
            for j in range(self.dim):
                a, b = self.c[i][j], other.c[i][j]
                if set(a) != set(b) or any(a[k] != b[k] for k in a):
                    return False
                if self.central[i][j] != other.central[i][j]:
                    return False
        return True

    def mismatches(self, other: "LieAlgebraTable"):
        out = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                if self.entry_text(i, j) != other.entry_text(i, j):
                    out.append((self.names[i], self.names[j], self.entry_text(i, j), other.entry_text(i, j)))
        return out

    def at(self, gamma) -> "LieAlgebraTable":
        """Specialise the parameter to a rational value."""
        br = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                vec, cen = self.bracket(i, j)
                br[(i, j)] = ({k: v.at(gamma) for k, v in vec.items()}, cen.at(gamma))
        return LieAlgebraTable.from_brackets(self.names, br, self.central_name)

    def limit(self) -> "LieAlgebraTable":
        """gamma -> 0 limit; SingularContraction if a negative power survives."""
        br = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                vec, cen = self.bracket(i, j)
                for v in list(vec.values()) + [cen]:
                    mp = v.min_power()
                    if mp is not None and mp < 0:
                        raise SingularContraction(
                            f"[{self.names[i]},{self.names[j]}] has a gamma^{mp} term"
                        )
                br[(i, j)] = ({k: v.constant() for k, v in vec.items()}, cen.constant())
        return LieAlgebraTable.from_brackets(self.names, br, self.central_name)

    def with_central_as_basis(self) -> "LieAlgebraTable":
        """Promote the central slot to an explicit basis element."""
        if not self.has_central():
            return self
        n = self.dim
        br = {}
        for i in range(n):
            for j in range(i + 1, n):
                vec, cen = self.bracket(i, j)
                vec = dict(vec)
                if not cen.is_zero():
                    vec[n] = cen
                br[(i, j)] = (vec, 0)
        return LieAlgebraTable.from_brackets(self.names + [self.central_name], br)

    # -- vectors ----------------------------------------------------------
    def constant_structure(self):
        """Array s[i][j][k] of Fractions (central slot must be empty)."""
        if not self.is_constant():
            raise ValueError("structure analysis needs a constant table")
        n = self.dim
        s = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                for k, v in self.c[i][j].items():
                    s[i][j][k] = v.constant()
        return s

    def bracket_vectors(self, u, v):
        s = self.constant_structure()
        n = self.dim
        out = [Fraction(0)] * n
        for i in range(n):
            if u[i] == 0:
                continue
            for j in range(n):
                if v[j] == 0:
                    continue
                w = u[i] * v[j]
                for k in range(n):
                    if s[i][j][k]:
                        out[k] += w * s[i][j][k]
        return out


# ---------------------------------------------------------------------------
# structure analysis


@dataclass
class StructureReport:
    basis: list
    center: list
    derived: list
    radical: list
    nilpotent_ideal: list
    nilpotent_ideal_is_heisenberg: bool
    heisenberg_rank: Optional[int]
    sl2_triples: list
    sl2_commutant: list
    complement_label: Optional[str]
    levi_labels: dict
    closure_checks: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def vecs(vs):
            return [_vec_text(self.basis, v) for v in vs]

        return {
            "basis": list(self.basis),
            "center": vecs(self.center),
            "derived_subalgebra": vecs(self.derived),
            "radical": vecs(self.radical),
            "nilpotent_ideal": vecs(self.nilpotent_ideal),
            "nilpotent_ideal_is_heisenberg": self.nilpotent_ideal_is_heisenberg,
            "heisenberg_rank": self.heisenberg_rank,
            "sl2_triples": [
                {"h": h, "e": e, "f": f, "[e,f]": f"{c}*{h}"} for h, e, f, c in self.sl2_triples
            ],
            "sl2_commutant": vecs(self.sl2_commutant),
            "complement_label": self.complement_label,
            "levi_labels": self.levi_labels,
            "closure_checks": self.closure_checks,
        }


def _vec_text(names, v):
    parts = []
    for name, c in zip(names, v):
        if c == 0:
            continue
        parts.append(name if c == 1 else f"-{name}" if c == -1 else f"{c}*{name}")
    return " + ".join(parts).replace("+ -", "- ") if parts else "0"


def _ad_matrix(s, v, n):
    # (ad v)[k][j] = coefficient of e_k in [v, e_j]
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        if v[i] == 0:
            continue
        for j in range(n):
            for k in range(n):
                if s[i][j][k]:
                    m[k][j] += v[i] * s[i][j][k]
    return m


def _unit(n, i):
    v = [Fraction(0)] * n
    v[i] = Fraction(1)
    return v


def _is_subalgebra(tab, basis):
    for u, v in itertools.combinations(basis, 2):
        if not _in_span(basis, tab.bracket_vectors(u, v)):
            return False
    return True


def _is_ideal(tab, basis):
    n = tab.dim
    for i in range(n):
        for v in basis:
            if not _in_span(basis, tab.bracket_vectors(_unit(n, i), v)):
                return False
    return True


def _brackets_span(tab, left, right):
    vecs = [tab.bracket_vectors(u, v) for u in left for v in right]
    return span_basis(vecs)


def _center_of(tab, sub):
    """Center of the subalgebra spanned by ``sub`` (a list of vectors)."""
    if not sub:
        return []
    n = tab.dim
    k = len(sub)
    # unknown coefficients a (len k) with [sum a_i sub_i, sub_j] = 0
    rows = []
    for j in range(k):
        cols = [tab.bracket_vectors(sub[i], sub[j]) for i in range(k)]
        for comp in range(n):
            rows.append([cols[i][comp] for i in range(k)])
    coeffs = nullspace(rows, k)
    out = []
    for a in coeffs:
        out.append([sum(a[i] * sub[i][c] for i in range(k)) for c in range(n)])
    return span_basis(out)


def is_ideal(tab: LieAlgebraTable, indices: Sequence[int]) -> bool:
    return _is_ideal(tab, [_unit(tab.dim, i) for i in indices])


def is_heisenberg(tab: LieAlgebraTable, indices: Sequence[int]) -> bool:
    basis = [_unit(tab.dim, i) for i in indices]
    return _heisenberg_rank(tab, basis) is not None


def _heisenberg_rank(tab, basis):
    d = len(basis)
    if d < 3 or d % 2 == 0:
        return None
    if not _is_subalgebra(tab, basis):
        return None
    z = _center_of(tab, basis)
    if len(z) != 1:
        return None
    derived = _brackets_span(tab, basis, basis)
    if len(derived) != 1 or not _in_span(z, derived[0]):
        return None
    return (d - 1) // 2


def _lower_central_nilpotent(tab, basis):
    cur = basis
    for _ in range(len(basis) + 1):
        if not cur:
            return True
        cur = _brackets_span(tab, basis, cur)
    return not cur


def analyze_structure(tab: LieAlgebraTable) -> StructureReport:
    """Center, derived algebra, radical, nilpotent ideal [g, rad], sl(2)
    triples and Levi labels of a constant structure-constant table."""
    tab = tab.with_central_as_basis()
    n = tab.dim
    s = tab.constant_structure()
    units = [_unit(n, i) for i in range(n)]

    center = _center_of(tab, units)
    derived = _brackets_span(tab, units, units)

    ads = [_ad_matrix(s, u, n) for u in units]
    killing = [
        [sum(ads[i][a][b] * ads[j][b][a] for a in range(n) for b in range(n)) for j in range(n)]
        for i in range(n)
    ]
    # rad(g) = orthogonal complement of [g, g] under the Killing form
    rows = [[sum(d[i] * killing[i][j] for i in range(n)) for j in range(n)] for d in derived]
    radical = span_basis(nullspace(rows, n)) if rows else span_basis(units)
    nil = _brackets_span(tab, units, radical) if radical else []
    if nil and not _lower_central_nilpotent(tab, nil):
        nil = []
    hrank = _heisenberg_rank(tab, nil) if nil else None

    triples = []
    for h, e, f in itertools.permutations(range(n), 3):
        he = tab.bracket_vectors(units[h], units[e])
        hf = tab.bracket_vectors(units[h], units[f])
        if he != [2 * v for v in units[e]] or hf != [-2 * v for v in units[f]]:
            continue
        ef = tab.bracket_vectors(units[e], units[f])
        nz = [k for k in range(n) if ef[k] != 0]
        if nz == [h]:
            triples.append((tab.names[h], tab.names[e], tab.names[f], ef[h]))

    commutant = []
    complement_label = None
    if triples:
        h, e, f, _ = triples[0]
        idx = [tab.names.index(v) for v in (h, e, f)]
        rows = []
        for i in idx:
            cols = [tab.bracket_vectors(units[k], units[i]) for k in range(n)]
            for comp in range(n):
                rows.append([cols[k][comp] for k in range(n)])
        comm = span_basis(nullspace(rows, n))
        comm_mod = [v for v in comm if not _in_span(center, v)]
        commutant = comm
        if len(comm_mod) == 1 and nil:
            adj = np.array(
                [[float(x) for x in row] for row in _ad_matrix(s, comm_mod[0], n)]
            )
            eig = np.linalg.eigvals(adj)
            nonzero = eig[np.abs(eig) > 1e-9]
            if len(nonzero) and np.allclose(nonzero.imag, 0):
                complement_label = "so(1,1)"
            elif len(nonzero):
                complement_label = "so(2)"

    levi = {}
    semisimple = "sl(2,R)" if triples else None
    if semisimple:
        levi["semisimple"] = semisimple
        levi["alias"] = "su(1,1)"
    if complement_label:
        levi["reductive_complement"] = complement_label
    if hrank:
        levi["nilpotent_ideal"] = f"h_{hrank}"
    elif nil:
        levi["nilpotent_ideal"] = f"nilpotent({len(nil)})"
    if semisimple and complement_label and hrank:
        levi["decomposition"] = f"({semisimple} + {complement_label}) |x h_{hrank}"
    elif hrank and len(nil) == n:
        levi["decomposition"] = f"h_{hrank}"
    elif not derived:
        levi["decomposition"] = f"abelian({n})"

    checks = {
        "center_is_ideal": _is_ideal(tab, center) if center else True,
        "derived_is_ideal": _is_ideal(tab, derived) if derived else True,
        "radical_is_ideal": _is_ideal(tab, radical) if radical else True,
        "nilpotent_ideal_is_ideal": _is_ideal(tab, nil) if nil else True,
        "nilpotent_ideal_is_nilpotent": _lower_central_nilpotent(tab, nil) if nil else True,
        "commutant_is_subalgebra": _is_subalgebra(tab, commutant) if commutant else True,
    }
    return StructureReport(
        basis=list(tab.names),
        center=center,
        derived=derived,
        radical=radical,
        nilpotent_ideal=nil,
        nilpotent_ideal_is_heisenberg=hrank is not None,
        heisenberg_rank=hrank,
        sl2_triples=triples,
        sl2_commutant=commutant,
        complement_label=complement_label,
        levi_labels=levi,
        closure_checks=checks,
    )


# ---------------------------------------------------------------------------
# orthogonal algebras and contraction


def so_table(signs: Sequence[int]) -> LieAlgebraTable:
    """Structure constants of so(g) for diagonal g = diag(signs), basis J_ij
    (i < j), [J_ij, J_kl] = g_jk J_il - g_jl J_ik - g_ik J_jl + g_il J_jk."""
    signs = list(signs)
    if any(s not in (1, -1) for s in signs):
        raise DegenerateMetric(f"diagonal metric entries must be +-1, got {signs}")
    n = len(signs)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    index = {pr: k for k, pr in enumerate(pairs)}
    names = [f"J{i + 1}{j + 1}" for i, j in pairs]

    def g(a, b):
        return signs[a] if a == b else 0

    def J(a, b):
        # J_ab as (index, sign) or None
        if a == b:
            return None
        return (index[(a, b)], 1) if a < b else (index[(b, a)], -1)

    br = {}
    for (i, j), (k, l) in itertools.combinations(pairs, 2):
        vec = {}
        for coef, (a, b) in (
            (g(j, k), (i, l)),
            (-g(j, l), (i, k)),
            (-g(i, k), (j, l)),
            (g(i, l), (j, k)),
        ):
            if coef == 0:
                continue
            el = J(a, b)
            if el is None:
                continue
            idx, sgn = el
            vec[idx] = vec.get(idx, 0) + coef * sgn
        br[(index[(i, j)], index[(k, l)])] = (vec, 0)
    return LieAlgebraTable.from_brackets(names, br)


def so31_table(signs: Sequence[int] = (1, -1, -1, -1)) -> LieAlgebraTable:
    if len(signs) != 4:
        raise DegenerateMetric("so(3,1) needs a 4-dimensional metric")
    return so_table(signs)


def contract(
    tab: LieAlgebraTable,
    scaling: Sequence[int],
    names: Optional[Sequence[str]] = None,
    order: Optional[Sequence[int]] = None,
) -> LieAlgebraTable:
    """Rescale e'_a = gamma^scaling[a] e_a and return the gamma-dependent table.

    ``order`` optionally permutes the basis (new position -> old index) and
    ``names`` relabels it.  The result has structure constants
    ``gamma^(k_a + k_b - k_c) c_ab^c``; call :meth:`LieAlgebraTable.limit`
    for the contracted algebra.
    """
    if tab.has_central():
        raise ValueError("contract a table without central slot")
    n = tab.dim
    order = list(range(n)) if order is None else list(order)
    pos = {old: new for new, old in enumerate(order)}
    k = [scaling[old] for old in order]
    br = {}
    for a in range(n):
        for b in range(a + 1, n):
            vec = {}
            for c_old, v in tab.c[order[a]][order[b]].items():
                c_new = pos[c_old]
                vec[c_new] = v * LaurentPoly.monomial(1, k[a] + k[b] - k[c_new])
            br[(a, b)] = (vec, 0)
    new_names = list(names) if names is not None else [tab.names[o] for o in order]
    return LieAlgebraTable.from_brackets(new_names, br)
