"""The base-equals-point case: 2-term structures over a finite-dimensional
Lie algebra, the fat Lie algebra bracket, and Chevalley-Eilenberg cohomology.

Data: a Lie algebra given by structure constants, a complex d: C -> V,
connection endomorphisms nablaC(e_i), nablaV(e_i) per basis element and an
antisymmetric correction R2 in Lambda^2 g* tensor Hom(V, C), subject to

    (1)  d nablaC(a) = nablaV(a) d
    (2)  nablaC[a,b] - [nablaC(a), nablaC(b)] = R2(a,b) d
    (3)  nablaV[a,b] - [nablaV(a), nablaV(b)] = d R2(a,b)
    (4)  sum_cyclic ( nabla_a R2(b,c) - R2([a,b], c) ) = 0

where nabla acts on Hom(V, C) by nabla_a K = nablaC(a) K - K nablaV(a).
These hold exactly when the bracket on Hom(V,C) + g

    [(h,a), (h',a')] = (R2(a,a') + nabla_a h' - nabla_{a'} h + [h,h'], [a,a'])

(with [h,h'] = h' d h - h d h') satisfies the Jacobi identity, and exactly
when the total differential on pairs (w0 in Lambda^k g* x C, w1 in
Lambda^{k-1} g* x V)

    (dw)_0 = (-1)^k d_nablaC w0 + R2 ^ w1        (dw)_1 = d o w0 + (-1)^k d_nablaV w1

squares to zero; the test suite locks this three-way equivalence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import CheckRequired, ShapeMismatch
from .groupoid import ValidationReport
from .ratlin import Matrix, rank, rational_from_str, rational_to_str


class FinDimLieAlgebra:
    """Structure constants c^k_{ij}; antisymmetry and Jacobi are validated."""

    def __init__(self, dim, brackets):
        self.dim = dim
        self.brackets = {}
        for (i, j), vec in brackets.items():
            vec = tuple(Fraction(x) for x in vec)
            if len(vec) != dim:
                raise ShapeMismatch("bracket vector has wrong length")
            self.brackets[(i, j)] = vec
        for i in range(dim):
            for j in range(dim):
                self.basis_bracket(i, j)

    def basis_bracket(self, i, j):
        """[e_i, e_j] as a coordinate tuple."""
        if i == j:
            return (Fraction(0),) * self.dim
        if (i, j) in self.brackets:
            return self.brackets[(i, j)]
        if (j, i) in self.brackets:
            return tuple(-x for x in self.brackets[(j, i)])
        return (Fraction(0),) * self.dim

    def bracket(self, u, v):
        """Bracket of coordinate columns."""
        out = [Fraction(0)] * self.dim
        for i in range(self.dim):
            if u.data[i][0] == 0:
                continue
            for j in range(self.dim):
                if v.data[j][0] == 0:
                    continue
                coef = u.data[i][0] * v.data[j][0]
                for k, c in enumerate(self.basis_bracket(i, j)):
                    out[k] += coef * c
        return Matrix.column(out)

    def check_jacobi(self):
        rep = ValidationReport()
        n = self.dim

        def e(i):
            return Matrix.column([1 if k == i else 0 for k in range(n)])

        for i in range(n):
            for j in range(n):
                if self.bracket(e(i), e(j)) != -self.bracket(e(j), e(i)):
                    rep.add("antisymmetry", {"pair": (i, j)})
        for i, j, k in itertools.combinations(range(n), 3):
            total = (self.bracket(e(i), self.bracket(e(j), e(k)))
                     + self.bracket(e(j), self.bracket(e(k), e(i)))
                     + self.bracket(e(k), self.bracket(e(i), e(j))))
            if not total.is_zero():
                rep.add("jacobi", {"triple": (i, j, k)})
        return rep

    def to_json(self):
        entries = []
        for (i, j), vec in sorted(self.brackets.items()):
            for k, c in enumerate(vec):
                if c != 0:
                    entries.append([i, j, k, rational_to_str(c)])
        return {"dim": self.dim, "c": entries}

    @staticmethod
    def from_json(obj):
        dim = int(obj["dim"])
        acc = {}
        for i, j, k, c in obj["c"]:
            vec = acc.setdefault((i, j), [Fraction(0)] * dim)
            vec[k] = rational_from_str(str(c))
        return FinDimLieAlgebra(dim, acc)


class LieAlgebraRuth:
    """2-term structure (d, nablaC, nablaV, R2) over a Lie algebra."""

    def __init__(self, lie, cdim, vdim, partial, nabla_c, nabla_v, r2):
        self.lie = lie
        self.cdim = cdim
        self.vdim = vdim
        self.partial = partial
        self.nabla_c = list(nabla_c)
        self.nabla_v = list(nabla_v)
        self.r2 = dict(r2)  # (i, j) with i < j -> Matrix c x v
        if (partial.rows, partial.cols) != (vdim, cdim):
            raise ShapeMismatch("differential must be v x c")
        for m in self.nabla_c:
            if (m.rows, m.cols) != (cdim, cdim):
                raise ShapeMismatch("nablaC blocks must be c x c")
        for m in self.nabla_v:
            if (m.rows, m.cols) != (vdim, vdim):
                raise ShapeMismatch("nablaV blocks must be v x v")
        self._checked = False

    def r2_at(self, i, j):
        if i == j:
            return Matrix.zeros(self.cdim, self.vdim)
        if (i, j) in self.r2:
            return self.r2[(i, j)]
        return -self.r2[(j, i)]

    def nabla_c_of(self, vec):
        out = Matrix.zeros(self.cdim, self.cdim)
        for i in range(self.lie.dim):
            if vec.data[i][0] != 0:
                out = out + self.nabla_c[i].scale(vec.data[i][0])
        return out

    def nabla_v_of(self, vec):
        out = Matrix.zeros(self.vdim, self.vdim)
        for i in range(self.lie.dim):
            if vec.data[i][0] != 0:
                out = out + self.nabla_v[i].scale(vec.data[i][0])
        return out

    def r2_of(self, u, v):
        out = Matrix.zeros(self.cdim, self.vdim)
        for i in range(self.lie.dim):
            a = u.data[i][0]
            if a == 0:
                continue
            for j in range(self.lie.dim):
                b = v.data[j][0]
                if b == 0:
                    continue
                out = out + self.r2_at(i, j).scale(a * b)
        return out

    def require_checked(self):
        if not self._checked:
            rep = la_check(self)
            if not rep.ok:
                raise CheckRequired("structure equations fail: %s" % rep.violations[:1])


def la_check(r):
    """Verify the three displayed equation families on basis tuples exactly."""
    rep = ValidationReport()
    rep_lie = r.lie.check_jacobi()
    rep.violations.extend(rep_lie.violations)
    n = r.lie.dim
    d = r.partial

    def e(i):
        return Matrix.column([1 if k == i else 0 for k in range(n)])

    for i in range(n):
        if d * r.nabla_c[i] != r.nabla_v[i] * d:
            rep.add("la-chain-map", {"basis": i})
    for i, j in itertools.combinations(range(n), 2):
        br = r.lie.basis_bracket(i, j)
        nc_br = r.nabla_c_of(Matrix.column(br))
        nv_br = r.nabla_v_of(Matrix.column(br))
        comm_c = r.nabla_c[i] * r.nabla_c[j] - r.nabla_c[j] * r.nabla_c[i]
        comm_v = r.nabla_v[i] * r.nabla_v[j] - r.nabla_v[j] * r.nabla_v[i]
        if nc_br - comm_c != r.r2_at(i, j) * d:
            rep.add("la-curvature-C", {"pair": (i, j)})
        if nv_br - comm_v != d * r.r2_at(i, j):
            rep.add("la-curvature-V", {"pair": (i, j)})
    for i, j, k in itertools.combinations(range(n), 3):
        total = Matrix.zeros(r.cdim, r.vdim)
        for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
            nabla_term = (r.nabla_c[a] * r.r2_at(b, c)
                          - r.r2_at(b, c) * r.nabla_v[a])
            br = r.lie.basis_bracket(a, b)
            r2_term = r.r2_of(Matrix.column(br), e(c))
            total = total + nabla_term - r2_term
        if not total.is_zero():
            rep.add("la-r2-cocycle", {"triple": (i, j, k)})
    r._checked = rep.ok
    return rep


@dataclass(frozen=True)
class FatLieElement:
    """Element (h, a) of the fat Lie algebra Hom(V, C) + g."""
    h: Matrix
    vec: Matrix


def fat_bracket(r, x, y):
    """[(h,a), (h',a')] on the fat Lie algebra; Jacobi iff la_check passes."""
    r.require_checked()
    d = r.partial
    nabla_x = r.nabla_c_of(x.vec)
    nabla_y = r.nabla_c_of(y.vec)
    nv_x = r.nabla_v_of(x.vec)
    nv_y = r.nabla_v_of(y.vec)
    hom_part = (r.r2_of(x.vec, y.vec)
                + (nabla_x * y.h - y.h * nv_x)
                - (nabla_y * x.h - x.h * nv_y)
                + (y.h * d * x.h - x.h * d * y.h))
    return FatLieElement(hom_part, r.lie.bracket(x.vec, y.vec))


def fat_bracket_raw(r, x, y):
    """Same formula without demanding la_check (used for mutation witnesses)."""
    d = r.partial
    hom_part = (r.r2_of(x.vec, y.vec)
                + (r.nabla_c_of(x.vec) * y.h - y.h * r.nabla_v_of(x.vec))
                - (r.nabla_c_of(y.vec) * x.h - x.h * r.nabla_v_of(y.vec))
                + (y.h * d * x.h - x.h * d * y.h))
    return FatLieElement(hom_part, r.lie.bracket(x.vec, y.vec))


def fat_jacobi_residual(r, x, y, z):
    b = fat_bracket_raw
    t1 = b(r, x, b(r, y, z))
    t2 = b(r, y, b(r, z, x))
    t3 = b(r, z, b(r, x, y))
    return FatLieElement(t1.h + t2.h + t3.h, t1.vec + t2.vec + t3.vec)


# -- Chevalley-Eilenberg pairs -------------------------------------------------


@dataclass
class CEPair:
    """(w0 in Lambda^k g* x C, w1 in Lambda^{k-1} g* x V); keys are sorted
    index tuples, values coordinate columns."""
    degree: int
    w0: dict
    w1: dict | None


def ce_zero(r, k):
    n = r.lie.dim
    w0 = {c: Matrix.zeros(r.cdim, 1) for c in itertools.combinations(range(n), k)}
    w1 = None
    if k >= 1:
        w1 = {c: Matrix.zeros(r.vdim, 1) for c in itertools.combinations(range(n), k - 1)}
    return CEPair(k, w0, w1)


def _insert_signed(component, idx, rest, value_dim):
    """value of the alternating extension at (e_idx, e_rest...)."""
    if idx in rest:
        return Matrix.zeros(value_dim, 1)
    merged = tuple(sorted((idx,) + rest))
    pos = merged.index(idx)
    sign = (-1) ** pos
    return component[merged].scale(sign)


def _ce_d_nabla(r, component, p, nabla_of, value_dim):
    """Standard CE differential of a p-form with values twisted by nabla."""
    n = r.lie.dim
    out = {}
    for s in itertools.combinations(range(n), p + 1):
        acc = Matrix.zeros(value_dim, 1)
        for i, si in enumerate(s):
            rest = s[:i] + s[i + 1:]
            acc = acc + (nabla_of(si) * component[rest]).scale((-1) ** i)
        for i, j in itertools.combinations(range(p + 1), 2):
            rest = tuple(x for t, x in enumerate(s) if t not in (i, j))
            br = r.lie.basis_bracket(s[i], s[j])
            term = Matrix.zeros(value_dim, 1)
            for a, coef in enumerate(br):
                if coef != 0:
                    term = term + _insert_signed(component, a, rest, value_dim).scale(coef)
            acc = acc + term.scale((-1) ** (i + j))
        out[s] = acc
    return out


def ce_differential(r, pair):
    """Total differential on pairs; squares to zero iff la_check passes."""
    r.require_checked()
    return ce_differential_raw(r, pair)


def ce_differential_raw(r, pair):
    k = pair.degree
    n = r.lie.dim
    sign = Fraction(-1 if k % 2 else 1)
    out = ce_zero(r, k + 1)
    d_c = _ce_d_nabla(r, pair.w0, k, lambda i: r.nabla_c[i], r.cdim)
    for s in itertools.combinations(range(n), k + 1):
        acc = d_c[s].scale(sign)
        if k >= 1:
            cup = Matrix.zeros(r.cdim, 1)
            for i, j in itertools.combinations(range(k + 1), 2):
                rest = tuple(x for t, x in enumerate(s) if t not in (i, j))
                cup = cup + (r.r2_at(s[i], s[j]) * pair.w1[rest]).scale((-1) ** (i + j))
            acc = acc + cup
        out.w0[s] = acc
    if k == 0:
        out.w1[()] = r.partial * pair.w0[()]
    else:
        d_v = _ce_d_nabla(r, pair.w1, k - 1, lambda i: r.nabla_v[i], r.vdim)
        for s in itertools.combinations(range(n), k):
            out.w1[s] = r.partial * pair.w0[s] + d_v[s].scale(sign)
    return out


def ce_pair_dim(r, k):
    from math import comb
    n = r.lie.dim
    d = comb(n, k) * r.cdim if k <= n else 0
    if k >= 1:
        d += comb(n, k - 1) * r.vdim if k - 1 <= n else 0
    return d


def ce_basis(r, k):
    out = []
    n = r.lie.dim
    for s in itertools.combinations(range(n), k):
        for i in range(r.cdim):
            p = ce_zero(r, k)
            p.w0[s] = Matrix.column([1 if t == i else 0 for t in range(r.cdim)])
            out.append(p)
    if k >= 1:
        for s in itertools.combinations(range(n), k - 1):
            for i in range(r.vdim):
                p = ce_zero(r, k)
                p.w1[s] = Matrix.column([1 if t == i else 0 for t in range(r.vdim)])
                out.append(p)
    return out


def ce_flatten(r, pair):
    n = r.lie.dim
    vals = []
    for s in itertools.combinations(range(n), pair.degree):
        vals.extend(pair.w0[s].data[i][0] for i in range(r.cdim))
    if pair.degree >= 1:
        for s in itertools.combinations(range(n), pair.degree - 1):
            vals.extend(pair.w1[s].data[i][0] for i in range(r.vdim))
    return vals


def ce_matrix(r, k):
    basis = ce_basis(r, k)
    rows = ce_pair_dim(r, k + 1)
    cols = [ce_flatten(r, ce_differential(r, b)) for b in basis]
    return Matrix(rows, len(basis),
                  [[cols[j][i] for j in range(len(basis))] for i in range(rows)])


def ce_cohomology(r, max_degree):
    """dim H^k for k = 0..max_degree by rank-nullity."""
    r.require_checked()
    ranks = {k: rank(ce_matrix(r, k)) for k in range(max_degree + 1)}
    dims = []
    for k in range(max_degree + 1):
        ker = ce_pair_dim(r, k) - ranks[k]
        dims.append(ker - (ranks[k - 1] if k >= 1 else 0))
    return dims


# -- invariant linear forms on the fat Lie algebra ------------------------------


class FatAlgebraBasis:
    """Ordered basis of Hom(V, C) + g: elementary matrices first, then e_i."""

    def __init__(self, r):
        self.r = r
        self.hom_indices = [(p, q) for p in range(r.cdim) for q in range(r.vdim)]
        self.dim = len(self.hom_indices) + r.lie.dim

    def element(self, idx):
        r = self.r
        if idx < len(self.hom_indices):
            p, q = self.hom_indices[idx]
            m = [[Fraction(1) if (a, b) == (p, q) else Fraction(0)
                  for b in range(r.vdim)] for a in range(r.cdim)]
            return FatLieElement(Matrix(r.cdim, r.vdim, m),
                                 Matrix.zeros(r.lie.dim, 1))
        i = idx - len(self.hom_indices)
        return FatLieElement(Matrix.zeros(r.cdim, r.vdim),
                             Matrix.column([1 if t == i else 0
                                            for t in range(r.lie.dim)]))

    def is_hom(self, idx):
        return idx < len(self.hom_indices)

    def project(self, idx):
        """Index of the underlying g-basis vector, or None for hom vectors."""
        if self.is_hom(idx):
            return None
        return idx - len(self.hom_indices)


@dataclass
class AlternatingForm:
    """Alternating form over an indexed basis; values are coordinate columns.

    `values` maps strictly increasing index tuples to columns; evaluation at
    arbitrary tuples goes through the permutation sign (zero on repeats).
    """
    degree: int
    dim: int
    value_dim: int
    values: dict

    def at(self, idx_tuple):
        if len(set(idx_tuple)) < len(idx_tuple):
            return Matrix.zeros(self.value_dim, 1)
        order = tuple(sorted(idx_tuple))
        perm = list(idx_tuple)
        sign = 1
        # bubble sort to count transpositions
        for a in range(len(perm)):
            for b in range(len(perm) - 1 - a):
                if perm[b] > perm[b + 1]:
                    perm[b], perm[b + 1] = perm[b + 1], perm[b]
                    sign = -sign
        return self.values[order].scale(sign)


def zero_form(degree, dim, value_dim):
    return AlternatingForm(degree, dim, value_dim,
                           {s: Matrix.zeros(value_dim, 1)
                            for s in itertools.combinations(range(dim), degree)})


def invariant_form_check(r, basis, omega0, omega1):
    """Check the ideal-contraction condition on all basis homotopies and tuples.

    omega0 is a k-form on the fat algebra with values in V* (coordinate
    columns); omega1 a (k-1)-form on g with values in C*, extended through
    the projection.  The condition, with the Koszul sign on the right, is

        (iota_h omega0)(a_2, ..., a_k) = (-1)^{k-1} omega1(pi a_2, ..., pi a_k) o h

    entrywise, for h running over the basis of Hom(V, C).  Returns (ok,
    witness-or-None).
    """
    k = omega0.degree
    sign = (-1) ** (k - 1)
    for hidx in range(len(basis.hom_indices)):
        h = basis.element(hidx).h
        for rest in itertools.combinations(range(basis.dim), k - 1):
            lhs = omega0.at((hidx,) + rest)
            gproj = [basis.project(i) for i in rest]
            if any(p is None for p in gproj):
                rhs = Matrix.zeros(r.vdim, 1)
            else:
                rhs = (h.transpose() * omega1.at(tuple(gproj))).scale(sign)
            if lhs != rhs:
                return False, {"hom": basis.hom_indices[hidx], "tuple": rest}
    return True, None


def split_iso_form(r, basis, w0g, w1g):
    """Assemble an invariant pair on the fat algebra from g-side data.

    w0g: k-form on g with values in V*; w1g: (k-1)-form on g with values in
    C*.  The result inserts the homotopy direction through w1g with the
    alternating extension of

        (h in slot 1, sigma-rest) -> (-1)^{k-1} w1g(pi rest) o h

    and the pair passes `invariant_form_check` by construction.
    """
    k = w0g.degree
    out = zero_form(k, basis.dim, r.vdim)
    for s in itertools.combinations(range(basis.dim), k):
        homs = [i for i, idx in enumerate(s) if basis.is_hom(idx)]
        if not homs:
            out.values[s] = w0g.at(tuple(basis.project(i) for i in s))
        elif len(homs) == 1:
            p = homs[0]
            h = basis.element(s[p]).h
            rest = tuple(basis.project(idx) for i, idx in enumerate(s) if i != p)
            val = (h.transpose() * w1g.at(rest)).scale((-1) ** (k - 1 + p))
            out.values[s] = val
        # two or more homotopy slots: the value vanishes
    return out


def dual_la_ruth(r):
    """The same structure on the dual complex V* -> C*.

    nabla'C = -nablaV^T, nabla'V = -nablaC^T, d' = d^T and R2' = -R2^T solve
    the structure equations whenever the original data does.
    """
    n = r.lie.dim
    return LieAlgebraRuth(
        r.lie, r.vdim, r.cdim, r.partial.transpose(),
        [(-r.nabla_v[i]).transpose() for i in range(n)],
        [(-r.nabla_c[i]).transpose() for i in range(n)],
        {(i, j): -r.r2[(i, j)].transpose() for (i, j) in r.r2})


def fat_la_ruth(r, basis):
    """The flat structure on the dual complex over the fat Lie algebra.

    The fat algebra acts honestly (no R2): on V by nablaV(a) - d h and on C
    by nablaC(a) - h d; the coefficients here are the duals V* and C*.
    """
    n_f = basis.dim
    brackets = {}
    for i, j in itertools.combinations(range(n_f), 2):
        br = fat_bracket_raw(r, basis.element(i), basis.element(j))
        coords = [Fraction(0)] * n_f
        for t, (p, q) in enumerate(basis.hom_indices):
            coords[t] = br.h.data[p][q]
        for t in range(r.lie.dim):
            coords[len(basis.hom_indices) + t] = br.vec.data[t][0]
        brackets[(i, j)] = tuple(coords)
    fat_lie = FinDimLieAlgebra(n_f, brackets)
    nabla_c = []
    nabla_v = []
    for i in range(n_f):
        xi = basis.element(i)
        rho_v = r.nabla_v_of(xi.vec) - r.partial * xi.h
        rho_c = r.nabla_c_of(xi.vec) - xi.h * r.partial
        nabla_c.append((-rho_v).transpose())
        nabla_v.append((-rho_c).transpose())
    r2 = {(i, j): Matrix.zeros(r.vdim, r.cdim)
          for i, j in itertools.combinations(range(n_f), 2)}
    return LieAlgebraRuth(fat_lie, r.vdim, r.cdim, r.partial.transpose(),
                          nabla_c, nabla_v, r2)


def split_iso_pair(r, basis, pair):
    """Transport a CE pair of the dual structure on g to the fat algebra."""
    k = pair.degree
    w0g = AlternatingForm(k, r.lie.dim, r.vdim, pair.w0)
    out0 = {}
    for s in itertools.combinations(range(basis.dim), k):
        homs = [i for i, idx in enumerate(s) if basis.is_hom(idx)]
        if not homs:
            out0[s] = w0g.at(tuple(basis.project(i) for i in s))
        elif len(homs) == 1 and k >= 1:
            p = homs[0]
            h = basis.element(s[p]).h
            rest = tuple(basis.project(idx) for i, idx in enumerate(s) if i != p)
            w1g = AlternatingForm(k - 1, r.lie.dim, r.cdim, pair.w1)
            out0[s] = (h.transpose() * w1g.at(rest)).scale((-1) ** (k - 1 + p))
        else:
            out0[s] = Matrix.zeros(r.vdim, 1)
    out1 = None
    if k >= 1:
        w1g = AlternatingForm(k - 1, r.lie.dim, r.cdim, pair.w1)
        out1 = {}
        for s in itertools.combinations(range(basis.dim), k - 1):
            gidx = [basis.project(i) for i in s]
            if any(p is None for p in gidx):
                out1[s] = Matrix.zeros(r.cdim, 1)
            else:
                out1[s] = w1g.at(tuple(gidx))
    return CEPair(k, out0, out1)
