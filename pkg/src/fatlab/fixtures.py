"""Deterministic example structures shared by the test suites and the CLI.

The non-flat structures are produced by the invertible-differential recipe:
pick any unital family of invertible maps R1V, conjugate it through d to get
R1C = d^{-1} R1V d, and absorb the failure of multiplicativity into
R2(g, h) = d^{-1} (R1V(g) R1V(h) - R1V(gh)).  All four structure equations
then hold identically, and R2 is nonzero whenever R1V is not a genuine action.
"""

from __future__ import annotations

from fractions import Fraction

from .groupoid import build_example
from .ratlin import Matrix, inverse
from .ruth import RuthStructure
from .sampling import random_invertible, rng_for
from .twoterm import TwoTermComplex


def constant_complex(g, c, v, partial):
    return TwoTermComplex(g.objects, {x: c for x in g.objects},
                          {x: v for x in g.objects},
                          {x: partial for x in g.objects})


def flat_ruth_z2(c=1, v=1):
    """Genuine cochain-complex representation of Z/2: R1 = +-1, d = 0, R2 = 0."""
    g = build_example("cyclic(2)")
    cx = constant_complex(g, c, v, Matrix.zeros(v, c))
    sgn = {"r0": 1, "r1": -1}
    r1c = {a: Matrix.identity(c).scale(sgn[a]) for a in g.arrow_ids}
    r1v = {a: Matrix.identity(v).scale(sgn[a]) for a in g.arrow_ids}
    r2 = {p: Matrix.zeros(c, v) for p in g.compose_table}
    return RuthStructure(g, cx, r1c, r1v, r2, unital=True)


def trivial_v_only_z2():
    """C = 0, V = Q with the trivial Z/2 action; group cohomology testbed."""
    g = build_example("cyclic(2)")
    cx = constant_complex(g, 0, 1, Matrix.zeros(1, 0))
    r1c = {a: Matrix.zeros(0, 0) for a in g.arrow_ids}
    r1v = {a: Matrix.identity(1) for a in g.arrow_ids}
    r2 = {p: Matrix.zeros(0, 1) for p in g.compose_table}
    return RuthStructure(g, cx, r1c, r1v, r2, unital=True)


def invertible_partial_ruth(example, dim=1, seed=7, partial=None, require_nonflat=True):
    """Non-flat unital structure on any example groupoid via the d-invertible recipe.

    R1V(g) is drawn invertible for every non-unit arrow (identity on units),
    so every zero homotopy is already an admissible lift.  Draws are retried
    until some R2 entry is nonzero when `require_nonflat` is set.
    """
    g = build_example(example)
    rng = rng_for(seed, "invertible-partial-%s-%d" % (example, dim))
    if partial is None:
        partial = random_invertible(rng, dim)
    cx = constant_complex(g, dim, dim, partial)
    units = {g.unit(x) for x in g.objects}
    dinv = {x: inverse(cx.partial(x)) for x in g.objects}
    for _ in range(50):
        r1v = {}
        for a in g.arrow_ids:
            r1v[a] = Matrix.identity(dim) if a in units else random_invertible(rng, dim)
        r2 = {}
        for (a, b) in g.compose_table:
            r2[(a, b)] = dinv[g.tgt(a)] * (r1v[a] * r1v[b] - r1v[g.mul(a, b)])
        if not require_nonflat or any(not m.is_zero() for m in r2.values()):
            break
    r1c = {a: dinv[g.tgt(a)] * r1v[a] * cx.partial(g.src(a)) for a in g.arrow_ids}
    return RuthStructure(g, cx, r1c, r1v, r2, unital=True)


def empty_complex_ruth(example="cyclic(2)"):
    """C = V = 0; every construction degenerates through empty matrices."""
    g = build_example(example)
    cx = constant_complex(g, 0, 0, Matrix.zeros(0, 0))
    z = Matrix.zeros(0, 0)
    return RuthStructure(g, cx, {a: z for a in g.arrow_ids},
                         {a: z for a in g.arrow_ids},
                         {p: z for p in g.compose_table}, unital=True)


def mutate_r2(r, seed=0, bump=Fraction(1)):
    """Perturb one R2 entry on a non-degenerate composable pair."""
    rng = rng_for(seed, "mutate-r2")
    pairs = [p for p in sorted(r.g.compose_table)
             if r.r2[p].rows > 0 and r.r2[p].cols > 0]
    a, b = pairs[rng.randrange(len(pairs))]
    m = r.r2[(a, b)]
    i = rng.randrange(m.rows)
    j = rng.randrange(m.cols)
    rows = [list(row) for row in m.data]
    rows[i][j] += bump
    r2 = dict(r.r2)
    r2[(a, b)] = Matrix(m.rows, m.cols, rows)
    return RuthStructure(r.g, r.cx, r.r1c, r.r1v, r2, unital=r.unital)


NAMED = {
    "flat-z2": lambda: flat_ruth_z2(),
    "trivial-z2": trivial_v_only_z2,
    "nonflat-pair2": lambda: invertible_partial_ruth("pair(2)", dim=2, seed=11),
    "nonflat-cyclic2": lambda: invertible_partial_ruth("cyclic(2)", dim=1, seed=3),
    "nonflat-cyclic3": lambda: invertible_partial_ruth("cyclic(3)", dim=1, seed=5),
    "nonflat-pair3": lambda: invertible_partial_ruth("pair(3)", dim=1, seed=13),
    "empty-z2": lambda: empty_complex_ruth("cyclic(2)"),
}


def named_ruth(name):
    from .errors import BadParams
    if name not in NAMED:
        raise BadParams("unknown fixture %r" % name)
    return NAMED[name]()


# -- finite groups and crossed-module core extensions --------------------------


def s3_elements():
    """S3 as permutation tuples (images of 0, 1, 2)."""
    import itertools as it
    return sorted(it.permutations(range(3)))


def perm_mul(p, q):
    """(p q)(i) = p(q(i))."""
    return tuple(p[q[i]] for i in range(len(q)))


def perm_inv(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def cyclic_elements(k):
    return list(range(k))


def group_groupoid(elements, mul, inv, unit, prefix):
    """A finite group as a one-object groupoid with arrow ids prefix+index."""
    from .groupoid import Arrow, FiniteGroupoid
    name = {e: "%s%d" % (prefix, i) for i, e in enumerate(elements)}
    arrows = [Arrow(name[e], "*", "*") for e in elements]
    units = {"*": name[unit]}
    inverses = {name[e]: name[inv(e)] for e in elements}
    compose = {(name[a], name[b]): name[mul(a, b)] for a in elements for b in elements}
    return FiniteGroupoid(["*"], arrows, units, inverses, compose), name


def crossed_module_extension(elements, mul, inv, unit, normal, prefix="g"):
    """Inner-type core extension of a group Gamma with normal subgroup N:

    H = N, F = Gamma, Gr = Gamma/N, Gd = Gamma, F -> Gd the identity and the
    action of Gd on H by conjugation.
    """
    from .corext import make_finite_core_extension
    f, name = group_groupoid(elements, mul, inv, unit, prefix)
    nset = set(normal)
    # cosets of N (left cosets; N normal so sides agree)
    cosets = []
    seen = set()
    for e in elements:
        if e in seen:
            continue
        coset = frozenset(mul(e, n) for n in nset)
        cosets.append(coset)
        seen |= coset
    coset_of = {e: c for c in cosets for e in c}
    coset_name = {c: "q%d" % i for i, c in enumerate(sorted(cosets, key=sorted))}
    unit_coset = coset_of[unit]

    def cmul(c1, c2):
        e1 = sorted(c1)[0]
        e2 = sorted(c2)[0]
        return coset_of[mul(e1, e2)]

    from .groupoid import Arrow, FiniteGroupoid
    gr_arrows = [Arrow(coset_name[c], "*", "*") for c in cosets]
    gr = FiniteGroupoid(["*"], gr_arrows, {"*": coset_name[unit_coset]},
                        {coset_name[c]: coset_name[frozenset(inv(e) for e in c)]
                         for c in cosets},
                        {(coset_name[a], coset_name[b]): coset_name[cmul(a, b)]
                         for a in cosets for b in cosets})
    gd, _ = group_groupoid(elements, mul, inv, unit, prefix)
    pi = {name[e]: coset_name[coset_of[e]] for e in elements}
    todown = {name[e]: name[e] for e in elements}
    action = {}
    for d in elements:
        for n in nset:
            action[(name[d], name[n])] = name[mul(mul(d, n), inv(d))]
    section = {}
    for c in cosets:
        section[coset_name[c]] = name[unit] if c == unit_coset else name[sorted(c)[0]]
    return make_finite_core_extension(f, gr, gd, pi, todown, action, section)


def inner_s3_extension():
    """N = Gamma = S3: the fully inner crossed module."""
    els = s3_elements()
    unit = tuple(range(3))
    return crossed_module_extension(els, perm_mul, perm_inv, unit, els, prefix="s")


def s3_a3_extension():
    """Gamma = S3 with N = A3."""
    els = s3_elements()
    unit = tuple(range(3))
    a3 = [p for p in els if _perm_sign(p) == 1]
    return crossed_module_extension(els, perm_mul, perm_inv, unit, a3, prefix="s")


def trivial_h_extension():
    """Gamma = Z4 with N = {e}: the kernel is trivial and the double groupoid
    is the pullback double groupoid of Gd along F = Gr."""
    els = cyclic_elements(4)
    return crossed_module_extension(els, lambda a, b: (a + b) % 4,
                                    lambda a: (-a) % 4, 0, [0], prefix="z")


def _perm_sign(p):
    sign = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


# -- Lie algebra fixtures -------------------------------------------------------


def abelian_lie(n):
    from .infinitesimal import FinDimLieAlgebra
    return FinDimLieAlgebra(n, {})


def sl2_lie():
    """Basis (e, f, h): [e,f] = h, [h,e] = 2e, [h,f] = -2f."""
    from .infinitesimal import FinDimLieAlgebra
    return FinDimLieAlgebra(3, {
        (0, 1): (0, 0, 1),    # [e, f] = h
        (2, 0): (2, 0, 0),    # [h, e] = 2e
        (2, 1): (0, -2, 0),   # [h, f] = -2f
    })


def abelian_flat_la_ruth(n=2, c=1, v=1):
    """Abelian algebra, zero differential and connections, R2 = 0."""
    import itertools
    from .infinitesimal import LieAlgebraRuth
    return LieAlgebraRuth(abelian_lie(n), c, v, Matrix.zeros(v, c),
                          [Matrix.zeros(c, c)] * n, [Matrix.zeros(v, v)] * n,
                          {(i, j): Matrix.zeros(c, v)
                           for i, j in itertools.combinations(range(n), 2)})


def invertible_partial_la_ruth(lie=None, dim=2, seed=19):
    """Lie-algebra analogue of the invertible-differential recipe:

    nablaC = d^{-1} nablaV d and R2(a,b) = d^{-1}(nablaV[a,b] - [nablaV a, nablaV b]).
    """
    import itertools
    from .infinitesimal import LieAlgebraRuth
    if lie is None:
        lie = sl2_lie()
    rng = rng_for(seed, "la-invertible-%d" % dim)
    partial = random_invertible(rng, dim)
    dinv = inverse(partial)
    nabla_v = [random_invertible(rng, dim) for _ in range(lie.dim)]
    nabla_c = [dinv * m * partial for m in nabla_v]
    r2 = {}
    for i, j in itertools.combinations(range(lie.dim), 2):
        br = lie.basis_bracket(i, j)
        nv_br = Matrix.zeros(dim, dim)
        for k, coef in enumerate(br):
            if coef != 0:
                nv_br = nv_br + nabla_v[k].scale(coef)
        comm = nabla_v[i] * nabla_v[j] - nabla_v[j] * nabla_v[i]
        r2[(i, j)] = dinv * (nv_br - comm)
    return LieAlgebraRuth(lie, dim, dim, partial, nabla_c, nabla_v, r2)


def mutate_la_r2(r, seed=0, bump=Fraction(1)):
    import itertools
    from .infinitesimal import LieAlgebraRuth
    rng = rng_for(seed, "mutate-la-r2")
    keys = sorted(r.r2)
    i, j = keys[rng.randrange(len(keys))]
    m = r.r2[(i, j)]
    rows = [list(row) for row in m.data]
    rows[rng.randrange(m.rows)][rng.randrange(m.cols)] += bump
    r2 = dict(r.r2)
    r2[(i, j)] = Matrix(m.rows, m.cols, rows)
    return LieAlgebraRuth(r.lie, r.cdim, r.vdim, r.partial,
                          r.nabla_c, r.nabla_v, r2)
