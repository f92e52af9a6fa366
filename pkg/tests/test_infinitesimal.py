import itertools
from math import comb

import pytest

from fatlab import fixtures
from fatlab import infinitesimal as inf
from fatlab.errors import CheckRequired
from fatlab.ratlin import Matrix
from fatlab.sampling import random_matrix, rng_for


def test_lie_algebra_axioms():
    assert fixtures.sl2_lie().check_jacobi().ok
    assert fixtures.abelian_lie(3).check_jacobi().ok
    bad = inf.FinDimLieAlgebra(2, {(0, 1): (1, 0)})
    # [e0,e1] = e0 alone satisfies Jacobi in dim 2; a genuine violation needs dim 3
    assert bad.check_jacobi().ok
    bad3 = inf.FinDimLieAlgebra(3, {(0, 1): (0, 0, 1), (0, 2): (1, 0, 0),
                                    (1, 2): (0, 0, 1)})
    assert not bad3.check_jacobi().ok


def test_la_check_fixtures():
    assert inf.la_check(fixtures.abelian_flat_la_ruth()).ok
    r = fixtures.invertible_partial_la_ruth()
    assert inf.la_check(r).ok
    bad = fixtures.mutate_la_r2(r, seed=4)
    rep = inf.la_check(bad)
    assert not rep.ok


def jacobi_holds_on_basis(r):
    basis = inf.FatAlgebraBasis(r)
    for i, j, k in itertools.combinations(range(basis.dim), 3):
        res = inf.fat_jacobi_residual(r, basis.element(i), basis.element(j),
                                      basis.element(k))
        if not (res.h.is_zero() and res.vec.is_zero()):
            return False
    return True


def test_jacobi_iff_la_check():
    r = fixtures.invertible_partial_la_ruth()
    assert jacobi_holds_on_basis(r)
    for seed in range(5):
        bad = fixtures.mutate_la_r2(r, seed=seed)
        assert not jacobi_holds_on_basis(bad)


def test_fat_bracket_degenerations(rng):
    r = fixtures.invertible_partial_la_ruth()
    d = r.partial
    n = r.lie.dim
    # pure homotopies bracket by the infinitesimal Hom bracket
    x = inf.FatLieElement(random_matrix(rng, r.cdim, r.vdim, -2, 2), Matrix.zeros(n, 1))
    y = inf.FatLieElement(random_matrix(rng, r.cdim, r.vdim, -2, 2), Matrix.zeros(n, 1))
    b = inf.fat_bracket(r, x, y)
    assert b.h == y.h * d * x.h - x.h * d * y.h
    assert b.vec.is_zero()
    # pure algebra vectors produce the correction term
    e0 = inf.FatLieElement(Matrix.zeros(r.cdim, r.vdim), Matrix.column([1, 0, 0]))
    e1 = inf.FatLieElement(Matrix.zeros(r.cdim, r.vdim), Matrix.column([0, 1, 0]))
    b = inf.fat_bracket(r, e0, e1)
    assert b.h == r.r2_at(0, 1)
    assert b.vec == Matrix.column(r.lie.basis_bracket(0, 1))
    # antisymmetry
    assert inf.fat_bracket(r, y, x).h == -inf.fat_bracket(r, x, y).h


def test_fat_bracket_requires_check():
    bad = fixtures.mutate_la_r2(fixtures.invertible_partial_la_ruth(), seed=2)
    x = inf.FatLieElement(Matrix.zeros(bad.cdim, bad.vdim), Matrix.column([1, 0, 0]))
    with pytest.raises(CheckRequired):
        inf.fat_bracket(bad, x, x)


def ce_d2_zero(r, kmax=3):
    for k in range(kmax):
        for b in inf.ce_basis(r, k):
            dd = inf.ce_differential_raw(r, inf.ce_differential_raw(r, b))
            if any(not v.is_zero() for v in dd.w0.values()):
                return False
            if dd.w1 and any(not v.is_zero() for v in dd.w1.values()):
                return False
    return True


def test_ce_differential_squares_to_zero_iff_la_check():
    r = fixtures.invertible_partial_la_ruth()
    assert ce_d2_zero(r)
    for seed in range(5):
        assert not ce_d2_zero(fixtures.mutate_la_r2(r, seed=seed))


def test_ce_zero_maps_to_zero():
    r = fixtures.invertible_partial_la_ruth()
    z = inf.ce_zero(r, 1)
    dz = inf.ce_differential(r, z)
    assert all(v.is_zero() for v in dz.w0.values())
    assert all(v.is_zero() for v in dz.w1.values())


def test_ce_cohomology_abelian_trivial():
    # delta vanishes identically, so H^k carries the full pair space
    r = fixtures.abelian_flat_la_ruth(n=2, c=1, v=1)
    dims = inf.ce_cohomology(r, 3)
    assert dims == [comb(2, k) + (comb(2, k - 1) if k >= 1 else 0) for k in range(4)]


def test_ce_cohomology_vanishes_for_invertible_partial():
    r = fixtures.invertible_partial_la_ruth()
    assert inf.ce_cohomology(r, 4) == [0, 0, 0, 0, 0]


# -- invariant forms -------------------------------------------------------------


def random_dual_pair(r, rd, k, rng):
    pair = inf.ce_zero(rd, k)
    for s in pair.w0:
        pair.w0[s] = random_matrix(rng, rd.cdim, 1, -2, 2)
    if pair.w1 is not None:
        for s in pair.w1:
            pair.w1[s] = random_matrix(rng, rd.vdim, 1, -2, 2)
    return pair


def test_dual_and_fat_structures_check():
    r = fixtures.invertible_partial_la_ruth()
    assert inf.la_check(inf.dual_la_ruth(r)).ok
    basis = inf.FatAlgebraBasis(r)
    assert inf.la_check(inf.fat_la_ruth(r, basis)).ok


def test_invariant_form_check_ideal_killing_case():
    r = fixtures.invertible_partial_la_ruth()
    basis = inf.FatAlgebraBasis(r)
    # omega1 = 0 with omega0 supported away from the homotopy directions
    om0 = inf.zero_form(2, basis.dim, r.vdim)
    rng = rng_for(3, "forms")
    n_hom = len(basis.hom_indices)
    for s in om0.values:
        if all(i >= n_hom for i in s):
            om0.values[s] = random_matrix(rng, r.vdim, 1, -2, 2)
    om1 = inf.zero_form(1, r.lie.dim, r.cdim)
    ok, _ = inf.invariant_form_check(r, basis, om0, om1)
    assert ok


@pytest.mark.parametrize("k", [1, 2])
def test_split_iso_pairs_are_invariant(k, rng):
    r = fixtures.invertible_partial_la_ruth()
    rd = inf.dual_la_ruth(r)
    basis = inf.FatAlgebraBasis(r)
    pair = random_dual_pair(r, rd, k, rng)
    big = inf.split_iso_pair(r, basis, pair)
    om0 = inf.AlternatingForm(k, basis.dim, r.vdim, big.w0)
    om1 = inf.AlternatingForm(k - 1, r.lie.dim, r.cdim, pair.w1)
    ok, witness = inf.invariant_form_check(r, basis, om0, om1)
    assert ok, witness
    # a mismatched pair fails whenever omega1 is nonzero
    om1bad = inf.AlternatingForm(k - 1, r.lie.dim, r.cdim,
                                 {s: v.scale(2) for s, v in pair.w1.items()})
    okb, _ = inf.invariant_form_check(r, basis, om0, om1bad)
    assert okb == all(v.is_zero() for v in pair.w1.values())


@pytest.mark.parametrize("k", [0, 1, 2])
def test_split_iso_intertwines_differentials(k, rng):
    r = fixtures.invertible_partial_la_ruth()
    rd = inf.dual_la_ruth(r)
    basis = inf.FatAlgebraBasis(r)
    rf = inf.fat_la_ruth(r, basis)
    for _ in range(4):
        pair = random_dual_pair(r, rd, k, rng)
        lhs = inf.ce_differential_raw(rf, inf.split_iso_pair(r, basis, pair))
        rhs = inf.split_iso_pair(r, basis, inf.ce_differential_raw(rd, pair))
        assert all(lhs.w0[s] == rhs.w0[s] for s in lhs.w0)
        if lhs.w1 is not None:
            assert all(lhs.w1[s] == rhs.w1[s] for s in lhs.w1)


def test_lie_json_roundtrip():
    lie = fixtures.sl2_lie()
    again = inf.FinDimLieAlgebra.from_json(lie.to_json())
    for i in range(3):
        for j in range(3):
            assert again.basis_bracket(i, j) == lie.basis_bracket(i, j)
