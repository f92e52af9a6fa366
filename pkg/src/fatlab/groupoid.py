"""Finite groupoids, their nerves, and the standard example constructors.

Composition is function-style: g * h is defined when src(g) = tgt(h), the
unit laws read 1_{tgt g} * g = g = g * 1_{src g}, and a nerve tuple
(g_1, ..., g_n) is composable in the sense src(g_k) = tgt(g_{k+1}).  Face map
d_k skips the k-th basepoint (d_0 drops g_1, inner faces compose, d_n drops
g_n) and the degeneracy u_k repeats the k-th basepoint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import BadParams, MalformedTable, NerveCapExceeded

DEFAULT_NERVE_CAP = 4


@dataclass(frozen=True)
class Arrow:
    id: str
    src: str
    tgt: str


class FiniteGroupoid:
    """Fully tabulated finite groupoid.

    All structure (units, inverses, the composition table on composable
    pairs) is stored explicitly; the example groupoids are tiny, and the
    tables enable the exhaustive loops used by every verification suite.
    Instances are immutable after construction.
    """

    def __init__(self, objects, arrows, units, inverses, compose):
        self.objects = tuple(objects)
        self.arrows = {a.id: a for a in arrows}
        self.arrow_ids = tuple(a.id for a in arrows)
        self.units = dict(units)        # object id -> arrow id
        self.inverses = dict(inverses)  # arrow id -> arrow id
        self.compose_table = dict(compose)  # (g, h) -> gh  for src g = tgt h
        self._by_src = {}
        self._by_tgt = {}
        for a in arrows:
            self._by_src.setdefault(a.src, []).append(a.id)
            self._by_tgt.setdefault(a.tgt, []).append(a.id)
        self._check_tables()

    # -- raw structure -------------------------------------------------

    def src(self, g):
        return self.arrows[g].src

    def tgt(self, g):
        return self.arrows[g].tgt

    def unit(self, x):
        return self.units[x]

    def inv(self, g):
        return self.inverses[g]

    def mul(self, g, h):
        """Product gh, defined when src(g) = tgt(h)."""
        return self.compose_table[(g, h)]

    def is_composable(self, g, h):
        return self.src(g) == self.tgt(h)

    def arrows_from(self, x):
        return tuple(self._by_src.get(x, ()))

    def arrows_into(self, x):
        return tuple(self._by_tgt.get(x, ()))

    def is_unit(self, g):
        return self.units.get(self.arrows[g].src) == g and self.src(g) == self.tgt(g)

    def _check_tables(self):
        for x in self.objects:
            if x not in self.units or self.units[x] not in self.arrows:
                raise MalformedTable("missing unit arrow for object %r" % (x,))
        for g in self.arrow_ids:
            if g not in self.inverses or self.inverses[g] not in self.arrows:
                raise MalformedTable("missing inverse for arrow %r" % (g,))
        composable = {(g, h) for g in self.arrow_ids for h in self.arrow_ids
                      if self.src(g) == self.tgt(h)}
        if set(self.compose_table) != composable:
            raise MalformedTable("compose table does not cover exactly the composable pairs")
        for (g, h), k in self.compose_table.items():
            if k not in self.arrows:
                raise MalformedTable("compose result %r is not an arrow" % (k,))

    # -- nerve -----------------------------------------------------------

    def nerve(self, n, cap=DEFAULT_NERVE_CAP):
        """All composable n-tuples; n = 0 yields the objects (as 0-tuples keyed by object)."""
        if n < 0:
            raise BadParams("nerve degree must be >= 0")
        if cap is not None and n > cap:
            raise NerveCapExceeded("nerve degree %d exceeds cap %d" % (n, cap))
        if n == 0:
            return [() for _ in self.objects]
        tuples = [(g,) for g in self.arrow_ids]
        for _ in range(n - 1):
            tuples = [t + (h,) for t in tuples for h in self.arrows_into(self.src(t[-1]))]
        return tuples

    def nerve_basepoints(self, t):
        """Objects x_0 = tgt g_1, x_1 = src g_1, ..., x_n = src g_n of a tuple."""
        if not t:
            raise BadParams("0-tuples carry their object separately")
        pts = [self.tgt(t[0])]
        for g in t:
            pts.append(self.src(g))
        return pts

    def face(self, k, t):
        """d_k: skip the k-th basepoint."""
        n = len(t)
        if not 0 <= k <= n:
            raise BadParams("face index out of range")
        if n == 1:
            # d_0 = src and d_1 = tgt land in the objects (degree-0 keys)
            return self.src(t[0]) if k == 0 else self.tgt(t[0])
        if k == 0:
            return t[1:]
        if k == n:
            return t[:-1]
        return t[:k - 1] + (self.mul(t[k - 1], t[k]),) + t[k + 1:]

    def degeneracy(self, k, t, obj=None):
        """u_k: repeat the k-th basepoint by inserting a unit arrow.

        For the empty tuple the carrier object must be passed via `obj`.
        """
        if not t:
            if obj is None:
                raise BadParams("degeneracy of a 0-tuple needs its object")
            return (self.unit(obj),)
        n = len(t)
        if not 0 <= k <= n:
            raise BadParams("degeneracy index out of range")
        if k == 0:
            return (self.unit(self.tgt(t[0])),) + t
        return t[:k] + (self.unit(self.src(t[k - 1])),) + t[k:]

    def tuple_src(self, t, obj=None):
        return self.src(t[-1]) if t else obj

    def tuple_tgt(self, t, obj=None):
        return self.tgt(t[0]) if t else obj

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {
            "objects": list(self.objects),
            "arrows": [{"id": a.id, "src": a.src, "tgt": a.tgt}
                       for a in (self.arrows[g] for g in self.arrow_ids)],
            "units": dict(self.units),
            "inverse": dict(self.inverses),
            "compose": sorted([g, h, k] for (g, h), k in self.compose_table.items()),
        }

    @staticmethod
    def from_json(obj):
        try:
            arrows = [Arrow(a["id"], a["src"], a["tgt"]) for a in obj["arrows"]]
            compose = {(g, h): k for g, h, k in obj["compose"]}
            return FiniteGroupoid(obj["objects"], arrows, obj["units"],
                                  obj["inverse"], compose)
        except (KeyError, TypeError) as exc:
            raise MalformedTable("bad groupoid JSON: %s" % exc) from exc


@dataclass
class ValidationReport:
    """Outcome of an axiom sweep; `violations` lists (axiom, witness) pairs."""
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def add(self, axiom, witness):
        self.violations.append((axiom, witness))


def validate(g):
    """Exhaustively check all groupoid axioms; report violations with witnesses."""
    rep = ValidationReport()
    for x in g.objects:
        u = g.unit(x)
        if g.src(u) != x or g.tgt(u) != x:
            rep.add("unit-endpoints", {"object": x, "unit": u})
    for a in g.arrow_ids:
        lt = g.mul(g.unit(g.tgt(a)), a)
        rt = g.mul(a, g.unit(g.src(a)))
        if lt != a:
            rep.add("left-unit-law", {"arrow": a, "got": lt})
        if rt != a:
            rep.add("right-unit-law", {"arrow": a, "got": rt})
        ai = g.inv(a)
        if g.src(ai) != g.tgt(a) or g.tgt(ai) != g.src(a):
            rep.add("inverse-endpoints", {"arrow": a, "inverse": ai})
        else:
            if g.mul(a, ai) != g.unit(g.tgt(a)):
                rep.add("right-inverse-law", {"arrow": a})
            if g.mul(ai, a) != g.unit(g.src(a)):
                rep.add("left-inverse-law", {"arrow": a})
    for (a, b) in g.compose_table:
        ab = g.mul(a, b)
        if g.src(ab) != g.src(b) or g.tgt(ab) != g.tgt(a):
            rep.add("composition-endpoints", {"pair": (a, b), "got": ab})
    for a in g.arrow_ids:
        for b in g.arrows_into(g.src(a)):
            for c in g.arrows_into(g.src(b)):
                if g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)):
                    rep.add("associativity", {"triple": (a, b, c)})
    return rep


# -- example constructors ----------------------------------------------------


def pair_groupoid(n):
    """Pair groupoid on n points: one arrow (i <- j) for each ordered pair."""
    if not 1 <= n <= 6:
        raise BadParams("pair(n) needs 1 <= n <= 6")
    objects = ["p%d" % i for i in range(n)]
    arrows = [Arrow("a%d_%d" % (i, j), "p%d" % j, "p%d" % i)
              for i in range(n) for j in range(n)]
    units = {"p%d" % i: "a%d_%d" % (i, i) for i in range(n)}
    inverses = {"a%d_%d" % (i, j): "a%d_%d" % (j, i) for i in range(n) for j in range(n)}
    compose = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                compose[("a%d_%d" % (i, j), "a%d_%d" % (j, k))] = "a%d_%d" % (i, k)
    return FiniteGroupoid(objects, arrows, units, inverses, compose)


def cyclic_groupoid(k):
    """Z/k as a one-object groupoid."""
    if not 1 <= k <= 6:
        raise BadParams("cyclic(k) needs 1 <= k <= 6")
    objects = ["o"]
    arrows = [Arrow("r%d" % i, "o", "o") for i in range(k)]
    units = {"o": "r0"}
    inverses = {"r%d" % i: "r%d" % ((-i) % k) for i in range(k)}
    compose = {("r%d" % i, "r%d" % j): "r%d" % ((i + j) % k)
               for i in range(k) for j in range(k)}
    return FiniteGroupoid(objects, arrows, units, inverses, compose)


def unit_groupoid(n):
    """Only identity arrows over n objects."""
    if not 1 <= n <= 6:
        raise BadParams("unit(n) needs 1 <= n <= 6")
    objects = ["u%d" % i for i in range(n)]
    arrows = [Arrow("e%d" % i, "u%d" % i, "u%d" % i) for i in range(n)]
    units = {"u%d" % i: "e%d" % i for i in range(n)}
    inverses = {"e%d" % i: "e%d" % i for i in range(n)}
    compose = {("e%d" % i, "e%d" % i): "e%d" % i for i in range(n)}
    return FiniteGroupoid(objects, arrows, units, inverses, compose)


def action_groupoid(k, n):
    """Action groupoid of Z/k cyclically permuting n points (k must divide n).

    The generator sends point i to point i+1 (mod n); an arrow (m, i) goes
    from object i to object i + m.
    """
    if not (1 <= k <= 6 and 1 <= n <= 6):
        raise BadParams("action(k,n) needs parameters between 1 and 6")
    if n % k != 0:
        raise BadParams("action(k,n) needs k | n")
    objects = ["x%d" % i for i in range(n)]
    arrows = [Arrow("t%d_%d" % (m, i), "x%d" % i, "x%d" % ((i + m * (n // k)) % n))
              for m in range(k) for i in range(n)]
    units = {"x%d" % i: "t0_%d" % i for i in range(n)}
    inverses = {}
    compose = {}
    step = n // k
    for m in range(k):
        for i in range(n):
            inverses["t%d_%d" % (m, i)] = "t%d_%d" % ((-m) % k, (i + m * step) % n)
    for m1 in range(k):
        for m2 in range(k):
            for i in range(n):
                # src of (m1, j) must be tgt of (m2, i) = i + m2*step
                j = (i + m2 * step) % n
                compose[("t%d_%d" % (m1, j), "t%d_%d" % (m2, i))] = \
                    "t%d_%d" % ((m1 + m2) % k, i)
    return FiniteGroupoid(objects, arrows, units, inverses, compose)


def build_example(name):
    """Build a named example: pair(n), cyclic(k), unit(n) or action(k,n)."""
    name = name.strip()
    try:
        kind, args = name.split("(", 1)
        args = [int(s) for s in args.rstrip(")").split(",")]
    except ValueError as exc:
        raise BadParams("cannot parse example name %r" % name) from exc
    if kind == "pair" and len(args) == 1:
        return pair_groupoid(args[0])
    if kind == "cyclic" and len(args) == 1:
        return cyclic_groupoid(args[0])
    if kind == "unit" and len(args) == 1:
        return unit_groupoid(args[0])
    if kind == "action" and len(args) == 2:
        return action_groupoid(args[0], args[1])
    raise BadParams("unknown example %r" % name)
