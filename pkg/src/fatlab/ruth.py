"""Split 2-term representations up to homotopy over a finite groupoid.

A structure R = (R1, R2) on a complex d: C -> V over G assigns to every
arrow g quasi-action blocks R1C(g): C_sg -> C_tg and R1V(g): V_sg -> V_tg and
to every composable pair a correction R2(g, h): V_sh -> C_tgh, subject to

    (1)  d R1C(g) = R1V(g) d
    (2)  R1C(g) R1C(h) - R1C(gh) = R2(g, h) d
    (3)  R1V(g) R1V(h) - R1V(gh) = d R2(g, h)
    (4)  R1C(g) R2(h, k) - R2(gh, k) + R2(g, hk) - R2(g, h) R1V(k) = 0

plus, when the structure is unital, R1(1_x) = 1 and R2(g, 1) = R2(1, g) = 0.
These four equations are equivalent to the Maurer-Cartan equation of the
graded Lie algebra implemented at the bottom of this module, and to the
squaring to zero of the total differential on cochain pairs

    (f0: G^(n) -> C-fibers over tg_1,   f1: G^(n-1) -> V-fibers over tg_1).

Sign conventions.  The componentwise differential is normative here; the
per-term signs are fixed (and locked by the test suite) as

    (df)_C = (-1)^n [ R1C(g1) f0(d_0 t) + sum_{k=1}^{n+1} (-1)^k f0(d_k t) ]
             + R2(g1, g2) f1(g3, ..., g_{n+1})
    (df)_V = d f0(t) + (-1)^n [ R1V(g1) f1(d_0 t)
             + sum_{k=1}^{n} (-1)^k f1(d_k t) ]

for a pair of total degree n; the normalization operator and the proper
contraction carry the same (-1)^(total degree) prefactor on both components.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DegreeTooLow, NerveCapExceeded, ShapeMismatch, StructureNotVerified
from .groupoid import ValidationReport
from .ratlin import Matrix, rank


class RuthStructure:
    """Split 2-term ruth data (G, complex, R1C, R1V, R2, unital flag)."""

    def __init__(self, g, cx, r1c, r1v, r2, unital=True):
        self.g = g
        self.cx = cx
        self.r1c = dict(r1c)
        self.r1v = dict(r1v)
        self.r2 = dict(r2)
        self.unital = unital
        self._verified = False
        self._check_shapes()

    def _check_shapes(self):
        g, cx = self.g, self.cx
        for a in g.arrow_ids:
            mc, mv = self.r1c[a], self.r1v[a]
            if (mc.rows, mc.cols) != (cx.c(g.tgt(a)), cx.c(g.src(a))):
                raise ShapeMismatch("R1C(%r) has wrong shape" % a)
            if (mv.rows, mv.cols) != (cx.v(g.tgt(a)), cx.v(g.src(a))):
                raise ShapeMismatch("R1V(%r) has wrong shape" % a)
        for (a, b) in g.compose_table:
            m = self.r2[(a, b)]
            if (m.rows, m.cols) != (cx.c(g.tgt(a)), cx.v(g.src(b))):
                raise ShapeMismatch("R2(%r, %r) has wrong shape" % (a, b))

    def require_verified(self):
        if not self._verified:
            rep = check_structure(self)
            if not rep.ok:
                raise StructureNotVerified(
                    "structure equations fail: %s" % rep.violations[:1])

    def to_json(self):
        return {
            "groupoid": self.g.to_json(),
            "complex": self.cx.to_json(),
            "R1C": {a: self.r1c[a].to_json() for a in self.g.arrow_ids},
            "R1V": {a: self.r1v[a].to_json() for a in self.g.arrow_ids},
            "R2": {"%s|%s" % p: self.r2[p].to_json()
                   for p in sorted(self.g.compose_table)},
            "unital": self.unital,
        }

    @staticmethod
    def from_json(obj):
        from .groupoid import FiniteGroupoid
        from .twoterm import TwoTermComplex
        g = FiniteGroupoid.from_json(obj["groupoid"])
        cx = TwoTermComplex.from_json(obj["complex"])

        def mat(raw, rows, cols):
            m = Matrix.from_json(raw)
            if (m.rows, m.cols) != (rows, cols):
                if m.rows == 0 or m.cols == 0:
                    return Matrix.zeros(rows, cols)
                raise ShapeMismatch("matrix in ruth JSON has wrong shape")
            return m

        r1c = {a: mat(obj["R1C"][a], cx.c(g.tgt(a)), cx.c(g.src(a)))
               for a in g.arrow_ids}
        r1v = {a: mat(obj["R1V"][a], cx.v(g.tgt(a)), cx.v(g.src(a)))
               for a in g.arrow_ids}
        r2 = {}
        for key, raw in obj["R2"].items():
            a, b = key.split("|")
            r2[(a, b)] = mat(raw, cx.c(g.tgt(a)), cx.v(g.src(b)))
        return RuthStructure(g, cx, r1c, r1v, r2, bool(obj.get("unital", True)))


def check_structure(r):
    """Exhaustively verify the structure equations; list failing tuples."""
    rep = ValidationReport()
    g, cx = r.g, r.cx
    for a in g.arrow_ids:
        lhs = cx.partial(g.tgt(a)) * r.r1c[a]
        rhs = r.r1v[a] * cx.partial(g.src(a))
        if lhs != rhs:
            rep.add("structure-equation-chain-map", {"arrow": a})
    for (a, b) in g.compose_table:
        ab = g.mul(a, b)
        if r.r1c[a] * r.r1c[b] - r.r1c[ab] != r.r2[(a, b)] * cx.partial(g.src(b)):
            rep.add("structure-equation-C-composition", {"pair": (a, b)})
        if r.r1v[a] * r.r1v[b] - r.r1v[ab] != cx.partial(g.tgt(a)) * r.r2[(a, b)]:
            rep.add("structure-equation-V-composition", {"pair": (a, b)})
    for t in g.nerve(3, cap=None):
        a, b, c = t
        lhs = (r.r1c[a] * r.r2[(b, c)] - r.r2[(g.mul(a, b), c)]
               + r.r2[(a, g.mul(b, c))] - r.r2[(a, b)] * r.r1v[c])
        if not lhs.is_zero():
            rep.add("structure-equation-cocycle", {"triple": t})
    if r.unital:
        for x in g.objects:
            u = g.unit(x)
            if not r.r1c[u].is_identity():
                rep.add("unitality-R1C", {"object": x})
            if not r.r1v[u].is_identity():
                rep.add("unitality-R1V", {"object": x})
        for a in g.arrow_ids:
            if not r.r2[(a, g.unit(g.src(a)))].is_zero():
                rep.add("unitality-R2-right", {"arrow": a})
            if not r.r2[(g.unit(g.tgt(a)), a)].is_zero():
                rep.add("unitality-R2-left", {"arrow": a})
    r._verified = rep.ok
    return rep


# -- cochains ----------------------------------------------------------------


def component_keys(g, m):
    """Index set for a component of simplicial degree m: objects or m-tuples."""
    return list(g.objects) if m == 0 else g.nerve(m, cap=None)


def key_tgt(g, key):
    """The object over which the coefficient fiber of a key sits."""
    return key if isinstance(key, str) else g.tgt(key[0])


@dataclass
class RuthCochain:
    """Pair (f0, f1) of total degree n.

    f0 maps n-tuples (objects when n = 0) to columns in the C-fiber at the
    leading target; f1, absent in degree 0, maps (n-1)-tuples to columns in
    the V-fiber at the leading target.
    """
    degree: int
    f0: dict
    f1: dict | None

    def f0_at(self, key):
        return self.f0[key]

    def f1_at(self, key):
        return self.f1[key]

    def __add__(self, other):
        if self.degree != other.degree:
            raise ShapeMismatch("cochain degrees differ")
        f1 = None
        if self.f1 is not None:
            f1 = {k: self.f1[k] + other.f1[k] for k in self.f1}
        return RuthCochain(self.degree, {k: self.f0[k] + other.f0[k] for k in self.f0}, f1)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        f1 = None if self.f1 is None else {k: v.scale(c) for k, v in self.f1.items()}
        return RuthCochain(self.degree, {k: v.scale(c) for k, v in self.f0.items()}, f1)

    def is_zero(self):
        if any(not v.is_zero() for v in self.f0.values()):
            return False
        return self.f1 is None or all(v.is_zero() for v in self.f1.values())


def zero_cochain(r, n):
    g, cx = r.g, r.cx
    f0 = {k: Matrix.zeros(cx.c(key_tgt(g, k)), 1) for k in component_keys(g, n)}
    f1 = None
    if n >= 1:
        f1 = {k: Matrix.zeros(cx.v(key_tgt(g, k)), 1) for k in component_keys(g, n - 1)}
    return RuthCochain(n, f0, f1)


def cochain_dim(r, n):
    g, cx = r.g, r.cx
    d = sum(cx.c(key_tgt(g, k)) for k in component_keys(g, n))
    if n >= 1:
        d += sum(cx.v(key_tgt(g, k)) for k in component_keys(g, n - 1))
    return d


def basis_cochains(r, n):
    """Delta-function basis of the degree-n cochain space (deterministic order)."""
    out = []
    for key in component_keys(r.g, n):
        dim = r.cx.c(key_tgt(r.g, key))
        for i in range(dim):
            f = zero_cochain(r, n)
            col = [Fraction(0)] * dim
            col[i] = Fraction(1)
            f.f0[key] = Matrix.column(col)
            out.append(f)
    if n >= 1:
        for key in component_keys(r.g, n - 1):
            dim = r.cx.v(key_tgt(r.g, key))
            for i in range(dim):
                f = zero_cochain(r, n)
                col = [Fraction(0)] * dim
                col[i] = Fraction(1)
                f.f1[key] = Matrix.column(col)
                out.append(f)
    return out


def _flatten(r, f):
    vals = []
    for key in component_keys(r.g, f.degree):
        vals.extend(f.f0[key].data[i][0] for i in range(f.f0[key].rows))
    if f.degree >= 1:
        for key in component_keys(r.g, f.degree - 1):
            vals.extend(f.f1[key].data[i][0] for i in range(f.f1[key].rows))
    return vals


def differential(r, f):
    """Total differential; degree n -> n + 1.  Requires a verified structure."""
    r.require_verified()
    g, cx = r.g, r.cx
    n = f.degree
    sign = Fraction(-1 if n % 2 else 1)
    out = zero_cochain(r, n + 1)
    for t in component_keys(g, n + 1):
        g1 = t[0]
        acc = r.r1c[g1] * f.f0_at(g.face(0, t))
        for k in range(1, n + 2):
            term = f.f0_at(g.face(k, t))
            acc = acc + term.scale((-1) ** k)
        acc = acc.scale(sign)
        if n >= 1:
            g2 = t[1]
            tail = t[2:] if n >= 2 else g.src(g2)
            acc = acc + r.r2[(g1, g2)] * f.f1_at(tail)
        out.f0[t] = acc
    for t in component_keys(g, n):
        if n == 0:
            out.f1[t] = cx.partial(t) * f.f0_at(t)
            continue
        acc = cx.partial(g.tgt(t[0])) * f.f0_at(t)
        vpart = r.r1v[t[0]] * f.f1_at(g.face(0, t))
        for k in range(1, n + 1):
            vpart = vpart + f.f1_at(g.face(k, t)).scale((-1) ** k)
        out.f1[t] = acc + vpart.scale(sign)
    return out


def nu(r, f):
    """Degeneracy operator; degree n -> n - 1 (zero for n = 0)."""
    g = r.g
    n = f.degree
    if n == 0:
        return None
    sign = Fraction(-1 if n % 2 else 1)
    out = zero_cochain(r, n - 1)
    for key in component_keys(g, n - 1):
        if n - 1 == 0:
            acc = f.f0_at(g.degeneracy(0, (), obj=key)).scale(sign)
        else:
            acc = f.f0_at(g.degeneracy(0, key))
            for k in range(1, n):
                acc = acc + f.f0_at(g.degeneracy(k, key)).scale((-1) ** k)
            acc = acc.scale(sign)
        out.f0[key] = acc
    if n >= 2:
        for key in component_keys(g, n - 2):
            if n - 2 == 0:
                acc = f.f1_at(g.degeneracy(0, (), obj=key)).scale(sign)
            else:
                acc = f.f1_at(g.degeneracy(0, key))
                for k in range(1, n - 1):
                    acc = acc + f.f1_at(g.degeneracy(k, key)).scale((-1) ** k)
                acc = acc.scale(sign)
            out.f1[key] = acc
    return out


def restrict_to_units(r, f):
    """Values of f on all-unit tuples; the f|_M part of the normalization test."""
    g = r.g
    vals = []
    n = f.degree
    for x in g.objects:
        if n == 0:
            vals.append(f.f0_at(x))
        else:
            vals.append(f.f0_at((g.unit(x),) * n))
        if n == 1:
            vals.append(f.f1_at(x))
        elif n >= 2:
            vals.append(f.f1_at((g.unit(x),) * (n - 1)))
    return vals


def normalized_check(r, f):
    """Normalized = killed by nu and vanishing on the unit locus."""
    nf = nu(r, f)
    if nf is not None and not nf.is_zero():
        return False
    return all(v.is_zero() for v in restrict_to_units(r, f))


def differential_matrix(r, n):
    """Matrix of the degree-n differential in the delta-function bases."""
    basis = basis_cochains(r, n)
    cols = []
    for b in basis:
        cols.append(_flatten(r, differential(r, b)))
    rows = cochain_dim(r, n + 1)
    m = Matrix(rows, len(basis),
               [[cols[j][i] for j in range(len(basis))] for i in range(rows)])
    return m


def cohomology_dims(r, max_degree, cap=None):
    """dim H^k for k = 0..max_degree by rank-nullity on the full cochain spaces."""
    if cap is not None and max_degree > cap:
        raise NerveCapExceeded("max degree %d exceeds nerve cap %d" % (max_degree, cap))
    r.require_verified()
    ranks = {}
    for k in range(max_degree + 1):
        ranks[k] = rank(differential_matrix(r, k))
    dims = []
    for k in range(max_degree + 1):
        dim_k = cochain_dim(r, k)
        ker = dim_k - ranks[k]
        im_prev = ranks[k - 1] if k >= 1 else 0
        dims.append(ker - im_prev)
    return dims


def contraction_eta(r, f):
    """Contraction from the normalized counting Haar system; degree n -> n - 1.

    Appends an averaged arrow in the last slot of both components, with the
    component signs (-1 on the C part, +1 on the V part) that make the
    telescoping work against this module's differential convention:

        (eta f)_C(..., g_{n-1}) = - avg over tg = s(g_{n-1}) of f_C(..., g_{n-1}, g)
        (eta f)_V(..., g_{n-2}) = + avg over tg = s(g_{n-2}) of f_V(..., g_{n-2}, g)

    Then [d, eta] = 1 in degrees >= 2, which forces the cohomology of any
    verified structure over a finite groupoid to vanish in those degrees.
    """
    g = r.g
    n = f.degree
    if n < 1:
        raise DegreeTooLow("contraction needs degree >= 1")
    out = zero_cochain(r, n - 1)
    for key in component_keys(g, n - 1):
        x = key if isinstance(key, str) else g.src(key[-1])
        fiber = g.arrows_into(x)
        acc = None
        for a in fiber:
            t = (a,) if isinstance(key, str) else key + (a,)
            acc = f.f0_at(t) if acc is None else acc + f.f0_at(t)
        out.f0[key] = acc.scale(Fraction(-1, len(fiber)))
    if n >= 2:
        for key in component_keys(g, n - 2):
            x = key if isinstance(key, str) else g.src(key[-1])
            fiber = g.arrows_into(x)
            acc = None
            for a in fiber:
                t = (a,) if isinstance(key, str) else key + (a,)
                acc = f.f1_at(t) if acc is None else acc + f.f1_at(t)
            out.f1[key] = acc.scale(Fraction(1, len(fiber)))
    return out


# -- the graded Lie algebra of structure operators ---------------------------


class RuthDglaElement:
    """Operator of bidegree (ell, ellp) with ellp in {-1, 0, +1}.

    Stored as a map from ell-tuples (objects for ell = 0) to a fiber map:
    V_s -> C_t for ellp = -1, a pair (C_s -> C_t, V_s -> V_t) for ellp = 0,
    and C_s -> V_t for ellp = +1.  Total degree is ell + ellp.
    """

    def __init__(self, r, ell, ellp, data):
        self.r = r
        self.ell = ell
        self.ellp = ellp
        self.data = dict(data)

    @property
    def degree(self):
        return self.ell + self.ellp

    def is_zero(self):
        if self.ellp == 0:
            return all(mc.is_zero() and mv.is_zero() for mc, mv in self.data.values())
        return all(m.is_zero() for m in self.data.values())

    def __add__(self, other):
        if (self.ell, self.ellp) != (other.ell, other.ellp):
            raise ShapeMismatch("bidegrees differ")
        if self.ellp == 0:
            return RuthDglaElement(self.r, self.ell, 0,
                                   {k: (self.data[k][0] + other.data[k][0],
                                        self.data[k][1] + other.data[k][1])
                                    for k in self.data})
        return RuthDglaElement(self.r, self.ell, self.ellp,
                               {k: self.data[k] + other.data[k] for k in self.data})

    def scale(self, c):
        if self.ellp == 0:
            return RuthDglaElement(self.r, self.ell, 0,
                                   {k: (mc.scale(c), mv.scale(c))
                                    for k, (mc, mv) in self.data.items()})
        return RuthDglaElement(self.r, self.ell, self.ellp,
                               {k: m.scale(c) for k, m in self.data.items()})


def dgla_zero(r, ell, ellp):
    g, cx = r.g, r.cx
    data = {}
    for key in component_keys(g, ell):
        t = key_tgt(g, key)
        s = key if isinstance(key, str) else g.src(key[-1])
        if ellp == -1:
            data[key] = Matrix.zeros(cx.c(t), cx.v(s))
        elif ellp == 0:
            data[key] = (Matrix.zeros(cx.c(t), cx.c(s)), Matrix.zeros(cx.v(t), cx.v(s)))
        elif ellp == 1:
            data[key] = Matrix.zeros(cx.v(t), cx.c(s))
        else:
            raise ShapeMismatch("ellp must be in {-1, 0, 1}")
    return RuthDglaElement(r, ell, ellp, data)


def _compose_payload(ellp_a, pa, ellp_b, pb):
    """Compose fiber maps; returns (ellp, payload) or None when the target
    value degree leaves {-1, 0, 1} (those compositions are zero)."""
    e = ellp_a + ellp_b
    if e < -1 or e > 1:
        return None
    if ellp_a == 0 and ellp_b == 0:
        return 0, (pa[0] * pb[0], pa[1] * pb[1])
    if ellp_a == 0 and ellp_b == 1:
        return 1, pa[1] * pb
    if ellp_a == 0 and ellp_b == -1:
        return -1, pa[0] * pb
    if ellp_a == 1 and ellp_b == 0:
        return 1, pa * pb[0]
    if ellp_a == -1 and ellp_b == 0:
        return -1, pa * pb[1]
    if ellp_a == 1 and ellp_b == -1:
        # V -> C -> V: the V-component of a bidegree-0 operator
        return 0, ("V", pa * pb)
    if ellp_a == -1 and ellp_b == 1:
        # C -> V -> C: the C-component
        return 0, ("C", pa * pb)
    raise AssertionError


def dgla_product(a, b):
    """Koszul product (a . b)(g, g') = (-1)^{ell_a deg(b)} a(g) b(g').

    Returns None when the value bidegree leaves the 2-term range (those
    compositions vanish identically).
    """
    r = a.r
    g = r.g
    ell = a.ell + b.ell
    ellp = a.ellp + b.ellp
    if ellp < -1 or ellp > 1:
        return None
    out = dgla_zero(r, ell, ellp)
    sgn = (-1) ** (a.ell * b.degree)
    for key in component_keys(g, ell):
        if isinstance(key, str):
            ka = kb = key
        else:
            ka = key[:a.ell] if a.ell >= 1 else g.tgt(key[0])
            kb = key[a.ell:] if b.ell >= 1 else g.src(key[a.ell - 1])
        e, payload = _compose_payload(a.ellp, a.data[ka], b.ellp, b.data[kb])
        if e == 0 and isinstance(payload, tuple) and payload[0] in ("C", "V"):
            tag, m = payload
            zc, zv = out.data[key]
            payload = (m, zv) if tag == "C" else (zc, m)
        if sgn == -1:
            payload = (-payload[0], -payload[1]) if e == 0 else -payload
        out.data[key] = payload
    return out


def dgla_bracket(a, b):
    """Graded commutator [a, b] = a b - (-1)^{deg a deg b} b a."""
    ab = dgla_product(a, b)
    ba = dgla_product(b, a)
    s = (-1) ** (a.degree * b.degree)
    if ab is None and ba is None:
        return None
    if ba is not None:
        ba = ba.scale(-s)
    if ab is None:
        return ba
    if ba is None:
        return ab
    return ab + ba


def dgla_differential(a):
    """Inner-face simplicial differential (d_0 and the last face are absent)."""
    r = a.r
    g = r.g
    out = dgla_zero(r, a.ell + 1, a.ellp)
    sgn = (-1) ** a.degree
    for key in component_keys(g, a.ell + 1):
        acc = out.data[key]
        for k in range(1, a.ell + 1):
            face = g.face(k, key)
            term = a.data[face]
            c = sgn * ((-1) ** k)
            if a.ellp == 0:
                acc = (acc[0] + term[0].scale(c), acc[1] + term[1].scale(c))
            else:
                acc = acc + term.scale(c)
        out.data[key] = acc
    return out


def structure_as_dgla(r):
    """The three operators (d, R1, R2) as dgla elements of total degree 1."""
    g = r.g
    d0 = RuthDglaElement(r, 0, 1, {x: r.cx.partial(x) for x in g.objects})
    r1 = RuthDglaElement(r, 1, 0, {(a,): (r.r1c[a], r.r1v[a]) for a in g.arrow_ids})
    r2 = RuthDglaElement(r, 2, -1, {t: r.r2[(t[0], t[1])] for t in g.nerve(2, cap=None)})
    return d0, r1, r2


def mc_residual(r):
    """delta_ruth R + (1/2)[R, R] componentwise; zero iff check_structure passes."""
    d0, r1, r2 = structure_as_dgla(r)
    parts = [d0, r1, r2]
    out = {}
    for a in parts:
        da = dgla_differential(a)
        key = (da.ell, da.ellp)
        out[key] = out.get(key) or dgla_zero(r, *key)
        out[key] = out[key] + da
    for a in parts:
        for b in parts:
            # [R, R]/2 = R . R because R has odd total degree
            ab = dgla_product(a, b)
            if ab is None:
                continue
            key = (ab.ell, ab.ellp)
            out[key] = out.get(key) or dgla_zero(r, *key)
            out[key] = out[key] + ab
    return out


def mc_residual_is_zero(r):
    return all(v.is_zero() for v in mc_residual(r).values())
