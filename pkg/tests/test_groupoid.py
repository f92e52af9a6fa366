import pytest

from fatlab import groupoid
from fatlab.errors import BadParams, MalformedTable
from fatlab.groupoid import build_example, validate


@pytest.mark.parametrize("name,n_obj,n_arr", [
    ("pair(3)", 3, 9),
    ("pair(2)", 2, 4),
    ("cyclic(2)", 1, 2),
    ("cyclic(6)", 1, 6),
    ("unit(4)", 4, 4),
    ("action(2,2)", 2, 4),
    ("action(3,6)", 6, 18),
])
def test_examples_validate(name, n_obj, n_arr):
    g = build_example(name)
    assert len(g.objects) == n_obj
    assert len(g.arrow_ids) == n_arr
    assert validate(g).ok


def test_bad_example_parameters():
    with pytest.raises(BadParams):
        build_example("action(2,3)")   # 2 does not divide 3
    with pytest.raises(BadParams):
        build_example("pair(9)")
    with pytest.raises(BadParams):
        build_example("dodecahedron(1)")


def test_corrupted_inverse_table_fails_with_witness():
    g = build_example("cyclic(2)")
    bad = dict(g.inverses)
    bad["r1"] = "r0"
    g2 = groupoid.FiniteGroupoid(
        g.objects, [g.arrows[a] for a in g.arrow_ids], g.units, bad, g.compose_table)
    rep = validate(g2)
    assert not rep.ok
    assert any(ax in ("left-inverse-law", "right-inverse-law") for ax, _ in rep.violations)


def test_incomplete_compose_table_rejected():
    g = build_example("cyclic(2)")
    table = dict(g.compose_table)
    del table[("r1", "r1")]
    with pytest.raises(MalformedTable):
        groupoid.FiniteGroupoid(g.objects, [g.arrows[a] for a in g.arrow_ids],
                                g.units, g.inverses, table)


def test_nerve_counts():
    g = build_example("pair(2)")
    assert len(g.nerve(0)) == 2
    assert len(g.nerve(1)) == 4
    # |G^(2)| = sum over x of |t^-1 x| |s^-1 x| = 2*2 + 2*2
    assert len(g.nerve(2)) == 8
    g3 = build_example("pair(3)")
    assert len(g3.nerve(2)) == 27


def test_inner_face_is_composition():
    g = build_example("cyclic(3)")
    for (a, b), ab in g.compose_table.items():
        assert g.face(1, (a, b)) == (ab,)


def test_simplicial_identities_exhaustive():
    for name in ("pair(2)", "cyclic(3)", "action(2,2)"):
        g = build_example(name)
        for n in range(2, 5):
            for t in g.nerve(n, cap=None):
                for l in range(1, n + 1):
                    for k in range(l):
                        assert g.face(k, g.face(l, t)) == g.face(l - 1, g.face(k, t))


def test_face_degeneracy_identity():
    for name in ("pair(2)", "cyclic(2)"):
        g = build_example(name)
        for n in range(0, 4):
            keys = g.nerve(n, cap=None) if n else list(g.objects)
            for key in keys:
                t = key if n else ()
                obj = None if n else key
                for k in range(n + 1):
                    ut = g.degeneracy(k, t, obj=obj)
                    assert g.face(k, ut) == (t if n else obj)


def test_t_fibers_constant_on_orbits():
    for name in ("pair(3)", "cyclic(4)", "action(2,4)"):
        g = build_example(name)
        for a in g.arrow_ids:
            assert len(g.arrows_into(g.src(a))) == len(g.arrows_into(g.tgt(a)))


def test_json_roundtrip():
    g = build_example("action(2,2)")
    g2 = groupoid.FiniteGroupoid.from_json(g.to_json())
    assert g2.to_json() == g.to_json()
    assert validate(g2).ok
