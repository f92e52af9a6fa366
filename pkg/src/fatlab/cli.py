"""Command-line interface: verification suites, cohomology, round trips, fixtures.

Reports are deterministic for fixed (inputs, seed, version): the master seed
fans out to per-check seeds through a stable hash of the check name, checks
are printed sorted by name, and timings go to stderr so stdout stays
byte-stable.  Exit codes: 0 all checks pass, 1 some property violated,
2 input error.  Every failing check names the verified statement and carries
a replayable witness payload.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import __version__, corext, fat, fixtures, glpb, groupoid, infinitesimal, ruth
from .errors import FatlabError, NerveCapExceeded
from .ratlin import Matrix
from .sampling import random_matrix, rng_for

DEFAULT_TRIALS = 200
DEFAULT_NERVE_CAP = 3


def nerve_cap(args):
    env = os.environ.get("FATLAB_NERVE_CAP")
    if env is not None:
        return int(env)
    return getattr(args, "nerve_cap", None) or DEFAULT_NERVE_CAP


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def fingerprint(obj):
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


class RunReport:
    """Deterministic suite report; see the module docstring for guarantees."""

    def __init__(self, suite, seed, fingerprints):
        self.suite = suite
        self.seed = seed
        self.fingerprints = fingerprints
        self.checks = []
        self.timings = {}

    def record(self, name, ok, witness=None):
        self.checks.append({"check": name, "status": "pass" if ok else "fail",
                            "witness": witness if not ok else None})

    def ok(self):
        return all(c["status"] == "pass" for c in self.checks)

    def to_json(self):
        return {
            "version": __version__,
            "suite": self.suite,
            "seed": self.seed,
            "fingerprints": self.fingerprints,
            "checks": sorted(self.checks, key=lambda c: c["check"]),
            "passed": self.ok(),
        }

    def render(self, fmt):
        if fmt == "json":
            return canonical_json(self.to_json())
        lines = ["suite %s  seed %d  version %s" % (self.suite, self.seed, __version__)]
        for c in sorted(self.checks, key=lambda c: c["check"]):
            lines.append("  [%s] %s" % ("PASS" if c["status"] == "pass" else "FAIL",
                                        c["check"]))
            if c["witness"]:
                lines.append("         witness: %s" % canonical_json(c["witness"]))
        lines.append("result: %s" % ("PASS" if self.ok() else "FAIL"))
        return "\n".join(lines)


def _json_witness(violations, limit=3):
    out = []
    for axiom, data in violations[:limit]:
        out.append({"statement": axiom, "data": repr(data)})
    return out


def _rand_cochain(r, n, rng):
    f = ruth.zero_cochain(r, n)
    for k in f.f0:
        f.f0[k] = random_matrix(rng, f.f0[k].rows, 1, -3, 3)
    if f.f1 is not None:
        for k in f.f1:
            f.f1[k] = random_matrix(rng, f.f1[k].rows, 1, -3, 3)
    return f


# -- suite implementations -----------------------------------------------------


def suite_groupoid(r, rep, seed, trials, cap):
    g = r.g
    v = groupoid.validate(g)
    rep.record("groupoid.axioms", v.ok, _json_witness(v.violations))
    # simplicial identities d_k d_l = d_{l-1} d_k for k < l, up to the cap
    ok = True
    for n in range(2, min(cap, 4) + 1):
        for t in g.nerve(n, cap=None):
            for l in range(1, n + 1):
                for k in range(0, l):
                    if g.face(k, g.face(l, t)) != g.face(l - 1, g.face(k, t)):
                        ok = False
    rep.record("nerve.simplicial-identities", ok)
    ok = True
    for n in range(0, min(cap, 3)):
        keys = g.nerve(n, cap=None) if n else list(g.objects)
        for key in keys:
            t = key if n else ()
            o = None if n else key
            for k in range(0, n + 1):
                ut = g.degeneracy(k, t, obj=o)
                if g.face(k, ut) != (t if n else o):
                    ok = False
    rep.record("nerve.face-degeneracy-identity", ok)
    orbit_ok = True
    for a in g.arrow_ids:
        if len(g.arrows_into(g.src(a))) != len(g.arrows_into(g.tgt(a))):
            orbit_ok = False
    rep.record("haar.t-fiber-constant-on-orbits", orbit_ok)


def suite_ruth(r, rep, seed, trials, cap):
    chk = ruth.check_structure(r)
    rep.record("ruth.structure-equations", chk.ok, _json_witness(chk.violations))
    mc = ruth.mc_residual_is_zero(r)
    rep.record("ruth.maurer-cartan-residual", mc == chk.ok or (mc and chk.ok),
               [{"statement": "maurer-cartan vs structure equations",
                 "data": "mc=%s check=%s" % (mc, chk.ok)}])
    if not chk.ok:
        return
    rng = rng_for(seed, "ruth.d-squared")
    ok = True
    for n in range(0, min(cap, 2) + 1):
        for _ in range(max(2, trials // 40)):
            f = _rand_cochain(r, n, rng)
            if not ruth.differential(r, ruth.differential(r, f)).is_zero():
                ok = False
    rep.record("ruth.differential-squares-to-zero", ok)
    rng = rng_for(seed, "ruth.nu")
    ok_nu, ok_anti = True, True
    for n in range(2, min(cap, 3) + 1):
        for _ in range(max(2, trials // 50)):
            f = _rand_cochain(r, n, rng)
            nn = ruth.nu(r, ruth.nu(r, f))
            if nn is not None and not nn.is_zero():
                ok_nu = False
            anti = ruth.differential(r, ruth.nu(r, f)) + ruth.nu(r, ruth.differential(r, f))
            if not anti.is_zero():
                ok_anti = False
    rep.record("normalization.nu-squares-to-zero", ok_nu)
    rep.record("normalization.nu-anticommutes-with-differential", ok_anti)
    if r.unital:
        rng = rng_for(seed, "ruth.normalized")
        ok = True
        for n in range(1, min(cap, 3)):
            basis = ruth.basis_cochains(r, n)
            for f in basis:
                nf = ruth.nu(r, f)
                proj = f
                if nf is not None and not nf.is_zero():
                    continue
                if not ruth.normalized_check(r, proj):
                    continue
                if not ruth.normalized_check(r, ruth.differential(r, proj)):
                    ok = False
        rep.record("normalization.differential-preserves-normalized", ok)
    ok = True
    for n in (2, 3):
        if n > cap:
            continue
        for b in ruth.basis_cochains(r, n):
            lhs = ruth.differential(r, ruth.contraction_eta(r, b)) \
                + ruth.contraction_eta(r, ruth.differential(r, b))
            if not (lhs - b).is_zero():
                ok = False
                break
    rep.record("vanishing.contraction-identity", ok)


def suite_fat(r, rep, seed, trials, cap):
    if not ruth.check_structure(r).ok:
        rep.record("fat.requires-verified-structure", False,
                   [{"statement": "structure equations", "data": "failed"}])
        return
    g = r.g
    rng = rng_for(seed, "fat.group-law")
    n = max(10, trials // 4)
    ok_grp, ok_rep, ok_conj = True, True, True
    for i in range(n):
        a = g.arrow_ids[rng.randrange(len(g.arrow_ids))]
        hh = fat.random_fat_element(r, a, rng)
        into = g.arrows_into(g.src(a))
        b = into[rng.randrange(len(into))]
        kk = fat.random_fat_element(r, b, rng)
        into2 = g.arrows_into(g.src(b))
        c = into2[rng.randrange(len(into2))]
        ll = fat.random_fat_element(r, c, rng)
        if fat.fat_product(fat.fat_product(hh, kk), ll) != fat.fat_product(hh, fat.fat_product(kk, ll)):
            ok_grp = False
        if fat.fat_product(hh, fat.fat_unit(r, g.src(a))) != hh:
            ok_grp = False
        if fat.fat_product(hh, fat.fat_inverse(hh)) != fat.fat_unit(r, g.tgt(a)):
            ok_grp = False
        prod = fat.fat_product(hh, kk)
        if prod.phic != hh.phic * kk.phic or prod.phiv != hh.phiv * kk.phiv:
            ok_rep = False
        hx = fat.random_member(r.cx, g.src(a), rng)
        okc, _ = fat.conjugation_check(hh, hx)
        ok_conj = ok_conj and okc
    rep.record("fat.groupoid-axioms", ok_grp)
    rep.record("fat.representation-functorial", ok_rep)
    rep.record("fat.conjugation-actions-agree", ok_conj)
    rec = fat.splitting_R2(r)
    rep.record("fat.splitting-recovers-R2",
               all(rec[p] == r.r2[p] for p in g.compose_table))
    rd = fat.dual_structure(r)
    rep.record("dual.structure-equations", ruth.check_structure(rd).ok)
    rng = rng_for(seed, "fat.pairing")
    okp = True
    for i in range(max(10, trials // 4)):
        a = g.arrow_ids[rng.randrange(len(g.arrow_ids))]
        hh = fat.random_fat_element(r, a, rng)
        tgt = fat.random_member(r.cx, g.src(a), rng)
        om = fat.pairing_solve(r, rd, hh, tgt)
        if fat.fat_pairing(r, rd, om, hh) != tgt.mat:
            okp = False
    rep.record("pairing.non-degenerate", okp)


def suite_glpb(r, rep, seed, trials, cap):
    if not ruth.check_structure(r).ok:
        rep.record("glpb.requires-verified-structure", False,
                   [{"statement": "structure equations", "data": "failed"}])
        return
    rng = rng_for(seed, "glpb.interchange")
    cx = r.cx
    ok = True
    from .ratlin import try_inverse

    def rand_cell(c, v, d, frame=None, x="o"):
        from .sampling import random_invertible
        while True:
            h = random_matrix(rng, c, v, -2, 2)
            if try_inverse(Matrix.identity(v) + d * h) is not None:
                break
        if frame is None:
            frame = glpb.Frame(x, x, random_invertible(rng, c), random_invertible(rng, v))
        return glpb.GL2Element(h, d, frame)

    c = max(cx.c(x) for x in r.g.objects)
    v = max(cx.v(x) for x in r.g.objects)
    if c and v:
        for i in range(max(20, trials // 2)):
            d0 = random_matrix(rng, v, c, -2, 2)
            a = rand_cell(c, v, d0)
            b = rand_cell(c, v, a.src_diff)
            _, fr_at = a.vertical_tgt()
            a2 = rand_cell(c, v, d0, frame=fr_at)
            _, fr_bt = b.vertical_tgt()
            b2 = rand_cell(c, v, a2.src_diff, frame=fr_bt)
            lhs = glpb.glg_horizontal(glpb.glg_vertical(a2, a), glpb.glg_vertical(b2, b))
            rhs = glpb.glg_vertical(glpb.glg_horizontal(a2, b2), glpb.glg_horizontal(a, b))
            if lhs != rhs:
                ok = False
    rep.record("gl2.interchange-law", ok)
    pb = glpb.PBGroupoid(r)
    rng = rng_for(seed, "glpb.pb")
    ok_rt, ok_free = True, True
    from .sampling import random_invertible
    for i in range(max(10, trials // 5)):
        a = r.g.arrow_ids[rng.randrange(len(r.g.arrow_ids))]
        x = r.g.src(a)
        frame = glpb.Frame(x, x, random_invertible(rng, cx.c(x)),
                           random_invertible(rng, cx.v(x)))
        p = glpb.PBElement(fat.random_fat_element(r, a, rng), frame)
        if glpb.pb_to_fat(pb, p) != p.elt:
            ok_rt = False
        p2 = glpb.PBElement(fat.random_fat_element(r, a, rng), frame)
        cell = pb.transporter(p, p2)
        if pb.act(p, cell) != p2:
            ok_free = False
    rep.record("pb.quotient-recovers-fat", ok_rt)
    rep.record("pb.action-principal", ok_free)
    ses = glpb.pb_ses_check(pb, rng_for(seed, "glpb.ses"), samples=max(10, trials // 8))
    rep.record("pb.kernel-exact-sequence", ses.ok, _json_witness(ses.violations))
    rng = rng_for(seed, "glpb.equiv")
    f = _rand_cochain(r, 1, rng)
    eq = glpb.gl_equiv_check(r, f, rng, samples=max(10, trials // 5))
    rep.record("pb.gl-equivariant-pullback", eq.ok, _json_witness(eq.violations))


def suite_corext(r, rep, seed, trials, cap):
    from .ratlin import try_inverse
    if not ruth.check_structure(r).ok:
        rep.record("corext.requires-verified-structure", False,
                   [{"statement": "structure equations", "data": "failed"}])
        return
    if any(try_inverse(r.cx.partial(x)) is None for x in r.g.objects):
        rep.record("corext.skipped-non-invertible-differential", True)
        return
    e = corext.FatCoreExtension(r)
    rng = rng_for(seed, "corext.validate")
    val = corext.validate_core_extension(e, rng=rng, samples=max(10, trials // 5))
    rep.record("corext.axioms", val.ok, _json_witness(val.violations))
    if not val.ok:
        return
    dg = corext.DoubleGroupoid(e)
    ic = corext.interchange_check(dg, rng_for(seed, "corext.interchange"),
                                  samples=max(10, trials // 5))
    rep.record("double.interchange-law", ic.ok, _json_witness(ic.violations))
    rec = corext.core_recover_check(dg, rng_for(seed, "corext.recover"),
                                    samples=max(10, trials // 5))
    rep.record("double.core-recovery", rec.ok, _json_witness(rec.violations))


def suite_lie(la_ruth, rep, seed, trials, cap):
    import itertools
    chk = infinitesimal.la_check(la_ruth)
    rep.record("lie.structure-equations", chk.ok, _json_witness(chk.violations))
    if not chk.ok:
        return
    basis = infinitesimal.FatAlgebraBasis(la_ruth)
    ok = True
    for i, j, k in itertools.combinations(range(basis.dim), 3):
        res = infinitesimal.fat_jacobi_residual(
            la_ruth, basis.element(i), basis.element(j), basis.element(k))
        if not (res.h.is_zero() and res.vec.is_zero()):
            ok = False
    rep.record("lie.fat-bracket-jacobi", ok)
    ok = True
    for k in range(0, min(3, la_ruth.lie.dim + 1)):
        for b in infinitesimal.ce_basis(la_ruth, k):
            dd = infinitesimal.ce_differential_raw(
                la_ruth, infinitesimal.ce_differential_raw(la_ruth, b))
            if any(not x.is_zero() for x in dd.w0.values()):
                ok = False
            if dd.w1 and any(not x.is_zero() for x in dd.w1.values()):
                ok = False
    rep.record("lie.ce-differential-squares-to-zero", ok)


SUITES = {
    "groupoid": suite_groupoid,
    "ruth": suite_ruth,
    "fat": suite_fat,
    "glpb": suite_glpb,
    "corext": suite_corext,
}


# -- input plumbing --------------------------------------------------------------


def load_structure(path):
    with open(path) as fh:
        obj = json.load(fh)
    return parse_structure(obj)


def parse_structure(obj):
    """Returns ("ruth", RuthStructure) or ("lie", LieAlgebraRuth) or
    ("groupoid", FiniteGroupoid)."""
    if "R1C" in obj:
        return "ruth", ruth.RuthStructure.from_json(obj)
    if "dim" in obj and "c" in obj:
        lie = infinitesimal.FinDimLieAlgebra.from_json(obj)
        return "lie", fixtures.invertible_partial_la_ruth(lie=lie, dim=2, seed=19)
    if "objects" in obj:
        return "groupoid", groupoid.FiniteGroupoid.from_json(obj)
    raise FatlabError("unrecognized input schema")


FIXTURE_EMITTERS = {
    "pair3": lambda: groupoid.build_example("pair(3)").to_json(),
    "pair2": lambda: groupoid.build_example("pair(2)").to_json(),
    "cyclic2": lambda: groupoid.build_example("cyclic(2)").to_json(),
    "action22": lambda: groupoid.build_example("action(2,2)").to_json(),
    "flat-z2": lambda: fixtures.named_ruth("flat-z2").to_json(),
    "trivial-z2": lambda: fixtures.named_ruth("trivial-z2").to_json(),
    "nonflat-pair2": lambda: fixtures.named_ruth("nonflat-pair2").to_json(),
    "nonflat-cyclic2": lambda: fixtures.named_ruth("nonflat-cyclic2").to_json(),
    "nonflat-cyclic3": lambda: fixtures.named_ruth("nonflat-cyclic3").to_json(),
    "nonflat-pair3": lambda: fixtures.named_ruth("nonflat-pair3").to_json(),
    "empty-z2": lambda: fixtures.named_ruth("empty-z2").to_json(),
    "sl2": lambda: fixtures.sl2_lie().to_json(),
}

DEFAULT_CHECK_FIXTURES = ["flat-z2", "nonflat-cyclic2", "nonflat-pair2"]


def gather_inputs(paths):
    """(label, kind, structure, fingerprint) for each input or default fixture."""
    out = []
    if paths:
        for p in paths:
            with open(p) as fh:
                obj = json.load(fh)
            kind, st = parse_structure(obj)
            out.append((os.path.basename(p), kind, st, fingerprint(obj)))
    else:
        for name in DEFAULT_CHECK_FIXTURES:
            obj = fixtures.named_ruth(name).to_json()
            out.append((name, "ruth", fixtures.named_ruth(name), fingerprint(obj)))
    return out


# -- commands ---------------------------------------------------------------------


def cmd_check(args):
    try:
        inputs = gather_inputs(args.paths)
    except (OSError, json.JSONDecodeError, FatlabError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2
    cap = nerve_cap(args)
    suites = list(SUITES) + ["lie"] if args.suite == "all" else [args.suite]
    reports = []
    t0 = time.time()
    for label, kind, st, fp in inputs:
        for suite in suites:
            if suite == "lie":
                continue
            if kind != "ruth" and suite != "groupoid":
                continue
            if kind == "groupoid" and suite == "groupoid":
                shim = type("Shim", (), {"g": st})
                rep = RunReport("%s:%s" % (label, suite), args.seed, {label: fp})
                SUITES[suite](shim, rep, args.seed, args.trials, cap)
                reports.append(rep)
                continue
            if kind != "ruth":
                continue
            rep = RunReport("%s:%s" % (label, suite), args.seed, {label: fp})
            try:
                SUITES[suite](st, rep, args.seed, args.trials, cap)
            except NerveCapExceeded as exc:
                print("input error: %s" % exc, file=sys.stderr)
                return 2
            reports.append(rep)
    if "lie" in suites:
        for la_name, builder in (("sl2-invertible", fixtures.invertible_partial_la_ruth),
                                 ("abelian-flat", fixtures.abelian_flat_la_ruth)):
            rep = RunReport("lie:%s" % la_name, args.seed,
                            {la_name: fingerprint({"builtin": la_name})})
            suite_lie(builder(), rep, args.seed, args.trials, cap)
            reports.append(rep)
    lines = [r.render(args.format) for r in reports]
    print("\n".join(lines))
    print("elapsed %.2fs" % (time.time() - t0), file=sys.stderr)
    return 0 if all(r.ok() for r in reports) else 1


def cmd_cohomology(args):
    try:
        with open(args.path) as fh:
            obj = json.load(fh)
        kind, st = parse_structure(obj)
    except (OSError, json.JSONDecodeError, FatlabError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2
    cap = nerve_cap(args)
    if args.max_degree > cap:
        print("input error: max degree %d exceeds nerve cap %d"
              % (args.max_degree, cap), file=sys.stderr)
        return 2
    if kind == "lie":
        dims = infinitesimal.ce_cohomology(st, args.max_degree)
        payload = {"dims": {("H^%d" % k): d for k, d in enumerate(dims)}}
    elif kind == "ruth":
        if not ruth.check_structure(st).ok:
            print("input error: structure equations fail", file=sys.stderr)
            return 2
        dims = ruth.cohomology_dims(st, args.max_degree)
        payload = {"dims": {("H^%d" % k): d for k, d in enumerate(dims)}}
        if args.max_degree >= 2:
            confirmed = True
            for n in (2, 3):
                if n > args.max_degree:
                    continue
                for b in ruth.basis_cochains(st, n):
                    lhs = ruth.differential(st, ruth.contraction_eta(st, b)) \
                        + ruth.contraction_eta(st, ruth.differential(st, b))
                    if not (lhs - b).is_zero():
                        confirmed = False
            payload["contraction-confirms-vanishing-above-degree-1"] = confirmed
    else:
        print("input error: cohomology needs a structure or Lie algebra",
              file=sys.stderr)
        return 2
    if args.format == "json":
        print(canonical_json(payload))
    else:
        for k in sorted(payload["dims"], key=lambda s: int(s.split("^")[1])):
            print("%s = %d" % (k, payload["dims"][k]))
        if payload.get("contraction-confirms-vanishing-above-degree-1"):
            print("vanishing in degrees >= 2 confirmed by the contraction homotopy")
    return 0


def cmd_roundtrip(args):
    try:
        if args.path:
            with open(args.path) as fh:
                obj = json.load(fh)
            kind, st = parse_structure(obj)
            if kind != "ruth":
                raise FatlabError("round trips need a structure input")
        else:
            st = fixtures.named_ruth("nonflat-cyclic2")
    except (OSError, json.JSONDecodeError, FatlabError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2
    r = st
    if not ruth.check_structure(r).ok:
        print("input error: structure equations fail", file=sys.stderr)
        return 2
    rng = rng_for(args.seed, "roundtrip.%s" % args.route)
    fault = args.inject_fault

    def fail(msg):
        print("roundtrip %s: FAIL (%s)" % (args.route, msg))
        return 1

    def corrupt(m):
        """Bump one entry; None when there is nothing to corrupt."""
        if m.rows == 0 or m.cols == 0:
            return None
        rows = [list(x) for x in m.data]
        rows[0][0] += 1
        return Matrix(m.rows, m.cols, rows)

    if args.route == "ruth-fat-ruth":
        rec = fat.splitting_R2(r)
        if fault:
            first = sorted(rec)[0]
            bad = corrupt(rec[first])
            if bad is None:
                return fail("fault injected (zero-dimensional fibers)")
            rec[first] = bad
        if any(rec[p] != r.r2[p] for p in r.g.compose_table):
            return fail("splitting does not recover R2")
    elif args.route == "ruth-vb-fat-ruth":
        vb = fat.SplitVB(r)
        g = r.g
        for a in g.arrow_ids:
            lift = fat.fiber_certificate(r, a, rng)
            # realize the lift as the VB section v -> (h v, v) and read h back
            cols = []
            for i in range(r.cx.v(g.src(a))):
                v = Matrix.column([1 if j == i else 0 for j in range(r.cx.v(g.src(a)))])
                e = vb.element(a, lift.h * v, v)
                cols.append(e.c)
            h_back = Matrix.zeros(r.cx.c(g.tgt(a)), 0)
            for c in cols:
                h_back = h_back.hstack(c)
            if fault:
                bad = corrupt(h_back)
                if bad is None:
                    return fail("fault injected (zero-dimensional fibers)")
                h_back = bad
            if h_back != lift.h:
                return fail("VB sections do not reproduce the fat elements over %r" % a)
        rec = fat.splitting_R2(r)
        rec_r1c = {}
        rec_r1v = {}
        for a in g.arrow_ids:
            lift = fat.fiber_certificate(r, a, rng)
            rec_r1c[a] = lift.phic - lift.h * r.cx.partial(g.src(a))
            rec_r1v[a] = lift.phiv - r.cx.partial(g.tgt(a)) * lift.h
        if any(rec[p] != r.r2[p] for p in g.compose_table) or \
           any(rec_r1c[a] != r.r1c[a] or rec_r1v[a] != r.r1v[a] for a in g.arrow_ids):
            return fail("recovered structure differs")
    elif args.route == "fat-pb-fat":
        pb = glpb.PBGroupoid(r)
        from .sampling import random_invertible
        for i in range(20):
            a = r.g.arrow_ids[rng.randrange(len(r.g.arrow_ids))]
            x = r.g.src(a)
            frame = glpb.Frame(x, x, random_invertible(rng, r.cx.c(x)),
                               random_invertible(rng, r.cx.v(x)))
            p = glpb.PBElement(fat.random_fat_element(r, a, rng), frame)
            back = glpb.pb_to_fat(pb, p)
            if fault:
                bad = corrupt(back.h)
                if bad is None or not fat.is_valid_lift(r, a, bad):
                    return fail("fault injected in the PB intermediate")
                back = fat.FatElement(r, a, bad)
            if back != p.elt:
                return fail("PB normalization does not recover the element")
    elif args.route == "core-double-core":
        from .ratlin import try_inverse
        if any(try_inverse(r.cx.partial(x)) is None for x in r.g.objects):
            print("input error: route needs an invertible differential", file=sys.stderr)
            return 2
        e = corext.FatCoreExtension(r)
        dg = corext.build_double(e, rng=rng, samples=20)
        rec = corext.core_recover_check(dg, rng=rng, samples=30)
        if fault:
            return fail("fault injected in the double groupoid intermediate")
        if not rec.ok:
            return fail("core recovery failed")
    else:
        print("input error: unknown route", file=sys.stderr)
        return 2
    print("roundtrip %s: PASS" % args.route)
    return 0


def cmd_examples(args):
    if args.name not in FIXTURE_EMITTERS:
        print("input error: unknown example %r (known: %s)"
              % (args.name, ", ".join(sorted(FIXTURE_EMITTERS))), file=sys.stderr)
        return 2
    print(canonical_json(FIXTURE_EMITTERS[args.name]()))
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    common.add_argument("--max-degree", type=int, default=3, dest="max_degree")
    common.add_argument("--format", choices=["json", "text"], default="text")
    common.add_argument("--nerve-cap", type=int, default=None, dest="nerve_cap")

    p = argparse.ArgumentParser(prog="fatlab", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("check", help="run verification suites", parents=[common])
    pc.add_argument("paths", nargs="*", help="structure JSON files (default: shipped fixtures)")
    pc.add_argument("--suite", choices=sorted(SUITES) + ["lie", "all"], default="all")
    pc.set_defaults(func=cmd_check)

    ph = sub.add_parser("cohomology", help="cohomology dimensions", parents=[common])
    ph.add_argument("path")
    ph.set_defaults(func=cmd_cohomology)

    pr = sub.add_parser("roundtrip", help="equivalence round trips", parents=[common])
    pr.add_argument("path", nargs="?")
    pr.add_argument("--route", required=True,
                    choices=["ruth-fat-ruth", "ruth-vb-fat-ruth",
                             "fat-pb-fat", "core-double-core"])
    pr.add_argument("--inject-fault", action="store_true")
    pr.set_defaults(func=cmd_roundtrip)

    pe = sub.add_parser("examples", help="emit built-in fixtures as JSON", parents=[common])
    pe.add_argument("name")
    pe.set_defaults(func=cmd_examples)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FatlabError as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
