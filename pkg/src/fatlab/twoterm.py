"""2-term complexes, invertible homotopies, perturbations and the quasi-iso test.

For a complex d: C -> V (stored fiberwise over the objects of a groupoid),
the maps h: V -> C with 1 + dh invertible form a group under

    h * h' = h + h' + h d h'      h^{-1} = -h (1 + dh)^{-1} = -(1 + hd)^{-1} h

with unit 0.  These "invertible homotopies" are the elementary particles of
everything in `fatlab.fat`; this module implements their group theory at a
single object, together with the perturbation variants that carry their own
differential, the infinitesimal bracket, and the quasi-isomorphism predicate
for chain maps between two complexes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (NoSolution, NotCanonicalForm, NotChainMap,
                     NotInvertibleInput, ShapeMismatch)
from .ratlin import Matrix, inverse, kernel_basis, rank, try_inverse


class TwoTermComplex:
    """Per-object rational complex d_x: C_x -> V_x (a v(x) x c(x) matrix)."""

    def __init__(self, objects, cdims, vdims, partials):
        self.objects = tuple(objects)
        self.cdims = dict(cdims)
        self.vdims = dict(vdims)
        self.partials = dict(partials)
        for x in self.objects:
            d = self.partials[x]
            if (d.rows, d.cols) != (self.vdims[x], self.cdims[x]):
                raise ShapeMismatch("partial at %r is %dx%d, expected %dx%d"
                                    % (x, d.rows, d.cols, self.vdims[x], self.cdims[x]))

    def c(self, x):
        return self.cdims[x]

    def v(self, x):
        return self.vdims[x]

    def partial(self, x):
        return self.partials[x]

    def dual(self):
        """Dual complex V* -> C* with differential the transpose."""
        return TwoTermComplex(self.objects,
                              {x: self.vdims[x] for x in self.objects},
                              {x: self.cdims[x] for x in self.objects},
                              {x: self.partials[x].transpose() for x in self.objects})

    def to_json(self):
        return {"C": {x: self.cdims[x] for x in self.objects},
                "V": {x: self.vdims[x] for x in self.objects},
                "partial": {x: self.partials[x].to_json() for x in self.objects}}

    @staticmethod
    def from_json(obj):
        objects = sorted(obj["C"])
        cd = {x: int(obj["C"][x]) for x in objects}
        vd = {x: int(obj["V"][x]) for x in objects}
        partials = {}
        for x in objects:
            raw = obj["partial"][x]
            m = Matrix.from_json(raw)
            if m.rows == 0:
                m = Matrix.zeros(vd[x], cd[x]) if vd[x] == 0 or cd[x] == 0 else m
            if (m.rows, m.cols) != (vd[x], cd[x]):
                m = Matrix(vd[x], cd[x], [[m.data[i][j] for j in range(cd[x])]
                                          for i in range(vd[x])]) \
                    if m.rows >= vd[x] and m.cols >= cd[x] else m
            partials[x] = m
        return TwoTermComplex(objects, cd, vd, partials)


def single_object_complex(c, v, partial, obj="o"):
    return TwoTermComplex([obj], {obj: c}, {obj: v}, {obj: partial})


@dataclass(frozen=True)
class Homotopy:
    """A map h: V_x -> C_x attached to the object x (c(x) x v(x) matrix)."""
    obj: str
    mat: Matrix

    def __add__(self, other):
        self._same_base(other)
        return Homotopy(self.obj, self.mat + other.mat)

    def __neg__(self):
        return Homotopy(self.obj, -self.mat)

    def _same_base(self, other):
        if self.obj != other.obj:
            raise ShapeMismatch("homotopies at different objects")


@dataclass(frozen=True)
class PertElement:
    """A pair (d, h) at an object with 1 + dh invertible; d is carried data."""
    obj: str
    d: Matrix
    h: Matrix

    def __post_init__(self):
        if try_inverse(Matrix.identity(self.d.rows) + self.d * self.h) is None:
            raise NotInvertibleInput("1 + dh is singular")


def _check_shape(cx, h):
    if (h.mat.rows, h.mat.cols) != (cx.c(h.obj), cx.v(h.obj)):
        raise ShapeMismatch("homotopy at %r has shape %dx%d, expected %dx%d"
                            % (h.obj, h.mat.rows, h.mat.cols, cx.c(h.obj), cx.v(h.obj)))


def h_member(cx, h):
    """Membership in H(V, C): is 1 + dh invertible?  Returns (bool, certificate).

    The certificate is the exact inverse of 1 + dh (None on failure).  By the
    five-lemma 1 + hd is then invertible as well; this is re-checked.
    """
    _check_shape(cx, h)
    d = cx.partial(h.obj)
    cert = try_inverse(Matrix.identity(d.rows) + d * h.mat)
    if cert is None:
        return False, None
    assert try_inverse(Matrix.identity(d.cols) + h.mat * d) is not None
    return True, cert


def _require_member(cx, h):
    ok, cert = h_member(cx, h)
    if not ok:
        raise NotInvertibleInput("homotopy is not invertible at %r" % (h.obj,))
    return cert


def h_product(cx, h, hp):
    """Group law h * h' = h + h' + h d h'."""
    h._same_base(hp)
    _require_member(cx, h)
    _require_member(cx, hp)
    d = cx.partial(h.obj)
    return Homotopy(h.obj, h.mat + hp.mat + h.mat * d * hp.mat)


def h_inverse(cx, h):
    """Group inverse -h (1 + dh)^{-1}; agrees with -(1 + hd)^{-1} h."""
    cert = _require_member(cx, h)
    d = cx.partial(h.obj)
    inv1 = -h.mat * cert
    inv2 = -inverse(Matrix.identity(h.mat.rows) + h.mat * d) * h.mat
    assert inv1 == inv2
    return Homotopy(h.obj, inv1)


def block_embed(cx, h):
    """Embed into GL(C + V) as the block matrix [[1, h], [0, 1 + dh]]."""
    _require_member(cx, h)
    d = cx.partial(h.obj)
    c, v = cx.c(h.obj), cx.v(h.obj)
    return Matrix.block([
        [Matrix.identity(c), h.mat],
        [Matrix.zeros(v, c), Matrix.identity(v) + d * h.mat],
    ])


def canonicalize_partial(d):
    """Invertible A, B with A d B = [[1_r, 0], [0, 0]]; returns (A, B, r)."""
    r = rank(d)
    # column operations: pick a basis of the coimage, then pad by the kernel
    ker = kernel_basis(d)
    pivots = []
    cur = Matrix.zeros(d.rows, 0)
    for j in range(d.cols):
        cand = cur.hstack(d.column_vector(j))
        if rank(cand) > cur.cols:
            cur = cand
            pivots.append(j)
    b_cols = [Matrix.column([1 if i == j else 0 for i in range(d.cols)]) for j in pivots]
    b_cols += ker
    b = Matrix.zeros(d.cols, 0)
    for col in b_cols:
        b = b.hstack(col)
    if b.cols != d.cols or rank(b) != d.cols:
        raise NotCanonicalForm("failed to build column change of basis")
    db = d * b
    # rows: first r columns of db are independent; extend to a basis of Q^rows
    a_inv_cols = [db.column_vector(j) for j in range(r)]
    cur = Matrix.zeros(d.rows, 0)
    for col in a_inv_cols:
        cur = cur.hstack(col)
    for i in range(d.rows):
        e = Matrix.column([1 if k == i else 0 for k in range(d.rows)])
        if rank(cur.hstack(e)) > cur.cols:
            cur = cur.hstack(e)
    a = inverse(cur)
    canon = a * d * b
    expected = Matrix.block([
        [Matrix.identity(r), Matrix.zeros(r, d.cols - r)],
        [Matrix.zeros(d.rows - r, r), Matrix.zeros(d.rows - r, d.cols - r)],
    ]) if min(d.rows, d.cols) else Matrix.zeros(d.rows, d.cols)
    if canon != expected:
        raise NotCanonicalForm("canonicalization failed")
    return a, b, r


def semidirect_decompose(d, h):
    """Split h (for canonical-form d of rank r) into its GL(r) and unipotent parts.

    With d(x, y) = (x, 0), write h: V = Q^r + Q^{l-r} -> C = Q^r + Q^{k-r} in
    blocks [[h4, h3], [h1, h2]].  Membership forces 1 + h4 in GL(r); the
    quotient map h -> 1 + h4 is a group homomorphism onto GL(r) and the
    kernel is the group of upper triangular block matrices on (h1, h2, h3).
    Returns (glr, (h1, h2, h3)).
    """
    k, l = d.cols, d.rows  # d: Q^k -> Q^l
    r = rank(d)
    expected = Matrix.block([
        [Matrix.identity(r), Matrix.zeros(r, k - r)],
        [Matrix.zeros(l - r, r), Matrix.zeros(l - r, k - r)],
    ]) if min(k, l) else Matrix.zeros(l, k)
    if d != expected:
        raise NotCanonicalForm("differential is not in canonical (x,y) -> (x,0) form")
    if (h.rows, h.cols) != (k, l):
        raise ShapeMismatch("homotopy must be %dx%d" % (k, l))
    h4 = h.submatrix(range(r), range(r))
    h3 = h.submatrix(range(r), range(r, l))
    h1 = h.submatrix(range(r, k), range(r))
    h2 = h.submatrix(range(r, k), range(r, l))
    glr = Matrix.identity(r) + h4
    if try_inverse(glr) is None:
        raise NotInvertibleInput("1 + h4 is singular, not a member")
    return glr, (h1, h2, h3)


def semidirect_reconstruct(d, glr, blocks):
    """Inverse of `semidirect_decompose`."""
    k, l = d.cols, d.rows
    r = rank(d)
    h1, h2, h3 = blocks
    h4 = glr - Matrix.identity(r)
    return Matrix.block([[h4, h3], [h1, h2]]) if min(k, l) else Matrix.zeros(k, l)


def semidirect_act(glr, blocks):
    """GL(r) action g . (h1, h2, h3) = (h1 g^{-1}, h2, g h3) on the unipotent part."""
    h1, h2, h3 = blocks
    gi = inverse(glr)
    return h1 * gi, h2, glr * h3


def h_dualize(cx, h):
    """Transport to the dual complex: h -> (h^{-1})^T in H(C*, V*).

    The assignment is a group isomorphism H(V,C) -> H(C*,V*) for the complex
    d^T: V* -> C*.
    """
    hinv = h_inverse(cx, h)
    return Homotopy(h.obj, hinv.mat.transpose())


def hom_bracket(h, hp, cx):
    """Infinitesimal bracket [h, h'] = h' d h - h d h' on Hom(V, C)."""
    h._same_base(hp)
    _check_shape(cx, h)
    _check_shape(cx, hp)
    d = cx.partial(h.obj)
    return Homotopy(h.obj, hp.mat * d * h.mat - h.mat * d * hp.mat)


# -- chain maps and quasi-isomorphisms ---------------------------------------


def is_chain_map(cx1, cx2, obj1, obj2, phi_c, phi_v):
    d1 = cx1.partial(obj1)
    d2 = cx2.partial(obj2)
    return d2 * phi_c == phi_v * d1


def quasi_iso(cx1, cx2, phi_c, phi_v, obj1="o", obj2="o"):
    """Quasi-isomorphism test for a chain map between two fibers.

    The chain map condition d2 phi_C = phi_V d1 is enforced; the predicate is

        ker phi_C  meets  ker d1  trivially,  and  im phi_V + im d2 = V_2,

    guarded by equality of the Euler characteristics c - v (automatic for
    fibers of one bundle).  With the guard, the two rank conditions say the
    map on H^0 is injective and the map on H^1 is surjective, and a dimension
    sandwich upgrades both to isomorphisms; so the predicate is equivalent to
    the brute-force induced-maps-on-cohomology check.
    """
    d1 = cx1.partial(obj1)
    d2 = cx2.partial(obj2)
    if not is_chain_map(cx1, cx2, obj1, obj2, phi_c, phi_v):
        raise NotChainMap("d phi_C != phi_V d")
    if d1.cols - d1.rows != d2.cols - d2.rows:
        return False
    stacked = phi_c.vstack(d1)
    injective_part = rank(stacked) == d1.cols
    surjective_part = rank(phi_v.hstack(d2)) == d2.rows
    return injective_part and surjective_part


def cohomology_fiber_dims(cx, obj):
    """(dim H^0, dim H^1) = (dim ker d, dim coker d) at one object."""
    d = cx.partial(obj)
    r = rank(d)
    return d.cols - r, d.rows - r


def quasi_iso_oracle(cx1, cx2, phi_c, phi_v, obj1="o", obj2="o"):
    """Independent check: compute the induced maps on H^0 and H^1 by brute force.

    H^0 = ker d with the restriction of phi_C; H^1 = coker d with the map
    induced by phi_V on chosen coset representatives.  Both induced maps must
    be bijections.
    """
    from .ratlin import solve

    d1, d2 = cx1.partial(obj1), cx2.partial(obj2)
    if not is_chain_map(cx1, cx2, obj1, obj2, phi_c, phi_v):
        raise NotChainMap("d phi_C != phi_V d")
    k1, k2 = kernel_basis(d1), kernel_basis(d2)
    if len(k1) != len(k2):
        return False
    if k1:
        basis2 = Matrix.zeros(d2.cols, 0)
        for b in k2:
            basis2 = basis2.hstack(b)
        cols = []
        for b in k1:
            try:
                coords, _ = solve(basis2, phi_c * b)
            except NoSolution:
                return False
            cols.append(coords)
        m0 = Matrix.zeros(len(k2), 0)
        for c in cols:
            m0 = m0.hstack(c)
        if rank(m0) != len(k1):
            return False

    def coker_data(d):
        """Basis of im d, extended by coset representatives to a basis of Q^rows."""
        img = Matrix.zeros(d.rows, 0)
        for j in range(d.cols):
            c = d.column_vector(j)
            if rank(img.hstack(c)) > img.cols:
                img = img.hstack(c)
        reps = []
        full = img
        for i in range(d.rows):
            e = Matrix.column([1 if k == i else 0 for k in range(d.rows)])
            if rank(full.hstack(e)) > full.cols:
                full = full.hstack(e)
                reps.append(e)
        return reps, full, img.cols

    reps1, _, _ = coker_data(d1)
    reps2, full2, n_img2 = coker_data(d2)
    if len(reps1) != len(reps2):
        return False
    if reps1:
        cols = []
        for b in reps1:
            coords, _ = solve(full2, phi_v * b)
            cols.append(Matrix.column([coords.data[n_img2 + i][0]
                                       for i in range(len(reps2))]))
        m1 = Matrix.zeros(len(reps2), 0)
        for c in cols:
            m1 = m1.hstack(c)
        if rank(m1) != len(reps1):
            return False
    return True


def compose_homotopies(d1, d2, d3, phi21, psi21, eta21, phi32, psi32, eta32):
    """Composite homotopy across three complexes.

    Input: chain maps Phi, Psi between (C_i, d_i) legs with Phi - Psi = [d, eta]
    on each leg.  Each map is a pair (C-component, V-component) and each eta
    maps V_i -> C_{i+1}.  Returns (value, well_defined) where

        value = eta32 Phi21 + Psi32 eta21

    and well_defined reports whether the alternative formula
    eta32 Psi21 + Phi32 eta21 agrees, which happens iff [d, eta32 eta21] = 0.
    """
    from .errors import HypothesisViolated

    def check_leg(da, db, phi, psi, eta):
        pc, pv = phi
        qc, qv = psi
        if db * pc != pv * da or db * qc != qv * da:
            raise HypothesisViolated("Phi or Psi is not a chain map")
        if pc - qc != eta * da or pv - qv != db * eta:
            raise HypothesisViolated("Phi - Psi != [d, eta] on a leg")

    check_leg(d1, d2, phi21, psi21, eta21)
    check_leg(d2, d3, phi32, psi32, eta32)
    value = eta32 * phi21[1] + psi32[0] * eta21
    alt = eta32 * psi21[1] + phi32[0] * eta21
    # the difference of the two formulas is -[d, eta32 eta21]; in two terms the
    # composite eta32 eta21 has degree -2 and vanishes, so both always agree
    well_defined = (value == alt)
    return value, well_defined
