"""Field towers, restriction of scalars, embedding identities, and
membership criteria for X(E) and X[L]."""

import pytest

from btlab.building import LatticeChain, SimplexX, are_conjugate, transform_chain
from btlab.coeffring import FiniteField, LaurentSeries
from btlab.errors import BadPeriod, NotAChamber
from btlab.latmod import Lattice, quotient_length
from btlab.tower import (ChainOverFloor, TowerField, XLSimplex, XLVertex,
                         chamber_decomposition, criterion_XE, j_embed,
                         support_XL, vertex_label)

from util import random_invertible, rng_for


def tower(q, floors, n=None):
    return TowerField(FiniteField.get(q, 1), floors, n=n)


# -- scalar coordinates ----------------------------------------------------------

def test_base_coords_roundtrip():
    rng = rng_for("coords")
    for floors in [[(2, 1)], [(1, 2)], [(2, 2)], [(1, 2), (2, 1)], [(3, 1)], [(1, 3)]]:
        tw = tower(2, floors)
        lvl = tw.num_floors
        R = tw.residue_field(lvl)
        for _ in range(15):
            ln = rng.randint(1, 4)
            codes = [rng.randrange(R.q) for _ in range(ln)]
            codes[0] = rng.randrange(1, R.q)
            z = LaurentSeries(R, rng.randint(-2, 2), codes)
            coords = tw.to_base_coords(lvl, z)
            back = tw.from_base_coords(lvl, coords)
            assert back == z


def test_base_coords_multiplicative():
    """Multiplication by z agrees with the regular-representation matrix."""
    rng = rng_for("coords-mult")
    for floors in [[(2, 1)], [(1, 2)], [(2, 2)]]:
        tw = tower(2, floors)
        lvl = tw.num_floors
        R = tw.residue_field(lvl)
        for _ in range(10):
            z = LaurentSeries(R, rng.randint(-1, 1),
                              [rng.randrange(1, R.q)] +
                              [rng.randrange(R.q) for _ in range(2)])
            w = LaurentSeries(R, rng.randint(0, 1),
                              [rng.randrange(1, R.q)])
            mat = tw.scalar_matrix(lvl, z, 1)
            coords_w = tw.from_base_coords
            vec = tw.to_base_coords(lvl, w)
            out = mat.apply_vector(vec)
            assert tw.from_base_coords(lvl, list(out)) == z * w


# -- restriction of scalars -------------------------------------------------------

def test_restrict_ramified_quadratic():
    tw = tower(2, [(2, 1)])
    R = tw.residue_field(1)
    o_e = Lattice.standard(R, 1)
    res = tw.restrict_scalars(1, o_e)
    assert res == Lattice.standard(tw.base_field, 2)
    s_oe = o_e.scale(1)  # s * o_E at the floor level
    res_s = tw.restrict_scalars(1, s_oe)
    assert res.contains(res_s)
    assert quotient_length(res, res_s) == 1


def test_restrict_unramified_quadratic():
    tw = tower(2, [(1, 2)])
    R = tw.residue_field(1)
    o_e = Lattice.standard(R, 1)
    res = tw.restrict_scalars(1, o_e)
    assert res == Lattice.standard(tw.base_field, 2)
    # s = t when e = 1: the shifted lattice restricts to t * standard
    res_s = tw.restrict_scalars(1, o_e.scale(1))
    assert res_s == Lattice.standard(tw.base_field, 2).scale(1)
    assert quotient_length(res, res_s) == 2


def test_restrict_functorial():
    """restrict(z * M) equals scalar_matrix(z) applied to restrict(M)."""
    rng = rng_for("functorial")
    from btlab.building import transform_lattice
    for floors in [[(2, 1)], [(1, 2)], [(2, 2)]]:
        tw = tower(2, floors)
        lvl = tw.num_floors
        R = tw.residue_field(lvl)
        for _ in range(6):
            lat = Lattice.from_diag(R, (rng.randint(0, 2),))
            z = LaurentSeries(R, rng.randint(0, 1), [rng.randrange(1, R.q)])
            left = tw.restrict_scalars(lvl, transform_lattice(
                __import__("btlab.latmod", fromlist=["FMatrix"]).FMatrix(R, [[z]]), lat))
            right = transform_lattice(tw.scalar_matrix(lvl, z, 1),
                                      tw.restrict_scalars(lvl, lat))
            assert left == right


# -- j_embed ------------------------------------------------------------------------

def test_j_embed_ramified_vertex_is_chamber():
    tw = tower(2, [(2, 1)])
    cf = ChainOverFloor.standard(tw, 1, (1,))
    chain, simplex = j_embed(tw, cf)
    assert chain.period == 2
    assert chain.d_sequence() == (1, 1)
    assert simplex.dim == 1


def test_j_embed_unramified_vertex_is_vertex():
    tw = tower(2, [(1, 2)])
    cf = ChainOverFloor.standard(tw, 1, (1,))
    chain, simplex = j_embed(tw, cf)
    assert chain.period == 1
    assert chain.d_sequence() == (2,)
    assert simplex.dim == 0


@pytest.mark.parametrize("floors", [[(1, 2)], [(2, 1)], [(2, 2)]])
def test_j_embed_d_identity_random(floors):
    """d(A(B))_k = f(E/F) * d_E(B)_k, on random chains."""
    rng = rng_for("d-identity-%s" % floors)
    tw = tower(2, floors)
    lvl = tw.num_floors
    R = tw.residue_field(lvl)
    f = tw.f_of(lvl)
    e_rel = tw.e_of(lvl)
    comps = [(1,), (2,), (1, 1), (1, 2), (2, 1), (1, 1, 1)]
    count = 0
    while count < 50:
        comp = comps[rng.randrange(len(comps))]
        m = sum(comp)
        base_chain = LatticeChain.standard(R, comp)
        g = random_invertible(rng, R, m, vmin=0, vmax=1)
        chain_e = transform_chain(g, base_chain)
        cf = ChainOverFloor(tw, lvl, chain_e)
        chain_f, _ = j_embed(tw, cf)
        d_e = chain_e.d_sequence()
        d_f = chain_f.d_sequence()
        assert chain_f.period == chain_e.period * e_rel
        e_b = chain_e.period
        for k in range(chain_f.period):
            assert d_f[k] == f * d_e[k % e_b]
        count += 1


def test_j_embed_period_identity():
    """e(A(B)) over F equals e(B) * e(E/F)."""
    for floors, comps in [([(2, 1)], [(1,), (1, 1)]), ([(2, 2)], [(1,), (2,)])]:
        tw = tower(2, floors)
        lvl = tw.num_floors
        R = tw.residue_field(lvl)
        for comp in comps:
            cf = ChainOverFloor.standard(tw, lvl, comp)
            chain, _ = j_embed(tw, cf)
            assert chain.period == len(comp) * tw.e_of(lvl)


# -- criterion for X(E) ---------------------------------------------------------------

def test_criterion_gl4_unramified_quadratic():
    """GL_4, E/F unramified quadratic: all vertices in X(E); edges in
    X(E) exactly when both steps have dimension 2."""
    tw = tower(2, [(1, 2)], n=4)
    F = tw.base_field
    vertex = LatticeChain.standard(F, (4,))
    assert criterion_XE(tw, vertex)
    assert criterion_XE(tw, LatticeChain.standard(F, (2, 2)))
    assert not criterion_XE(tw, LatticeChain.standard(F, (1, 3)))
    assert not criterion_XE(tw, LatticeChain.standard(F, (1, 1, 2)))
    assert not criterion_XE(tw, LatticeChain.standard(F, (1, 1, 1, 1)))


def test_criterion_trivial_floor():
    tw = TowerField(FiniteField.get(2, 1), [], n=2)
    F = tw.base_field
    for comp in [(2,), (1, 1)]:
        assert criterion_XE(tw, LatticeChain.standard(F, comp))


def test_criterion_ramified_uses_least_period():
    """e(E/F) must divide e/p; a principal chain of period 2 has p = 1."""
    tw = tower(2, [(2, 1)], n=4)
    F = tw.base_field
    assert criterion_XE(tw, LatticeChain.standard(F, (2, 2)))   # e/p = 2
    assert not criterion_XE(tw, LatticeChain.standard(F, (4,)))  # e/p = 1
    assert criterion_XE(tw, LatticeChain.standard(F, (1, 1, 1, 1)))  # e/p = 4? p=1 e=4
    assert not criterion_XE(tw, LatticeChain.standard(F, (1, 2, 1)))  # p = e = 3


def test_criterion_conjugation_invariant():
    rng = rng_for("crit-conj")
    tw = tower(2, [(1, 2)], n=4)
    F = tw.base_field
    for comp in [(2, 2), (1, 3), (4,)]:
        chain = LatticeChain.standard(F, comp)
        expected = criterion_XE(tw, chain)
        for _ in range(5):
            g = random_invertible(rng, F, 4, vmin=0, vmax=1)
            assert criterion_XE(tw, transform_chain(g, chain)) == expected


# -- support of X[L] -------------------------------------------------------------------

def test_support_xl_trivial():
    tw = tower(2, [(1, 2)])
    cf = ChainOverFloor.standard(tw, 1, (1, 1))
    assert support_XL(tw, cf, 2)  # e_param = n_E: always true


def test_support_xl_cases():
    tw = tower(2, [(1, 2)])
    vert = ChainOverFloor.standard(tw, 1, (2,))
    assert support_XL(tw, vert, 1)
    edge = ChainOverFloor.standard(tw, 1, (1, 1))
    assert not support_XL(tw, edge, 1)
    with pytest.raises(BadPeriod):
        support_XL(tw, edge, 3)


def test_support_xl_consistency_with_criterion():
    """support_XL over the floor E with parameter e agrees with the
    X(L')-criterion over base E for L'/E unramified of degree n_E/e."""
    rng = rng_for("xl-consistency")
    tw = tower(2, [(1, 2)])
    lvl = 1
    R = tw.residue_field(lvl)
    comps = [(1,), (2,), (4,), (1, 1), (2, 2), (1, 3), (2, 1, 1), (1, 1, 1, 1)]
    count = 0
    while count < 50:
        comp = comps[rng.randrange(len(comps))]
        n_e = sum(comp)
        chain = LatticeChain.standard(R, comp)
        g = random_invertible(rng, R, n_e, vmin=0, vmax=1)
        chain = transform_chain(g, chain)
        cf = ChainOverFloor(tw, lvl, chain)
        for e_param in [d for d in range(1, n_e + 1) if n_e % d == 0]:
            # unramified extension L'/E of degree n_e/e_param, over base E
            tw_l = TowerField(R, [(1, n_e // e_param)], n=n_e)
            assert support_XL(tw, cf, e_param) == criterion_XE(tw_l, chain)
        count += 1


# -- chamber decomposition ---------------------------------------------------------

@pytest.mark.parametrize("n,f,e_l,expected", [
    (4, 2, 1, 2),
    (6, 2, 1, 2),
    (6, 3, 1, 3),
    (4, 1, 2, 1),
])
def test_chamber_decomposition_counts(n, f, e_l, expected):
    tw = tower(2, [(e_l, f)], n=n)
    F = tw.base_field
    cham = LatticeChain.standard(F, (1,) * n)
    parts = chamber_decomposition(tw, cham)
    assert len(parts) == expected == f
    m = n // (f * e_l)
    seen = set()
    for s in parts:
        assert len(s.vertices) == m
        ks = set()
        for v in s.vertices:
            assert len(v.reps) == e_l
            for r in v.reps:
                ks.add(r.key())
        assert not (seen & ks)  # pairwise vertex-disjoint
        seen |= ks


def test_chamber_decomposition_requires_chamber():
    tw = tower(2, [(1, 2)], n=4)
    F = tw.base_field
    with pytest.raises(NotAChamber):
        chamber_decomposition(tw, LatticeChain.standard(F, (2, 2)))


def test_chamber_decomposition_support():
    """Each X[L]-chamber from the decomposition passes the support
    criterion for the underlying base chain (steps all equal f)."""
    tw = tower(2, [(1, 2)], n=4)
    F = tw.base_field
    cham = LatticeChain.standard(F, (1,) * 4)
    for s in chamber_decomposition(tw, cham):
        base = s.base_simplex().to_chain()
        assert set(base.d_sequence()) == {tw.f_of(1)}
        assert criterion_XE(tw, base)


# -- labelling -------------------------------------------------------------------------

def test_vertex_label_standard():
    tw = tower(2, [(1, 2)], n=4)
    v = XLVertex([Lattice.standard(tw.base_field, 4)])
    assert vertex_label(v, tw, n=4) == 0


def test_vertex_label_distinct_on_chamber():
    """n = 4, f(L/F) = 2, e = m = 2: chamber labels {0, 2}."""
    tw = tower(2, [(1, 2)], n=4)
    F = tw.base_field
    cham = LatticeChain.standard(F, (1,) * 4)
    parts = chamber_decomposition(tw, cham)
    labels = sorted(vertex_label(v, tw, n=4) for v in parts[0].vertices)
    assert labels == [0, 2]
    labels2 = sorted(vertex_label(v, tw, n=4) for v in parts[1].vertices)
    assert labels2 == [1, 3]


def test_vertex_label_unit_det_invariance():
    rng = rng_for("label-g")
    tw = tower(2, [(1, 2)], n=4)
    F = tw.base_field
    cham = LatticeChain.standard(F, (1,) * 4)
    part = chamber_decomposition(tw, cham)[0]
    from btlab.building import transform_lattice
    from btlab.latmod import FMatrix
    # unit-determinant transformation: permutation-free elementary matrix
    g = FMatrix.from_int_rows(F, [[1, 0, 0, 0], [1, 1, 0, 0],
                                  [0, 0, 1, 0], [0, 1, 0, 1]])
    for v in part.vertices:
        moved = XLVertex([transform_lattice(g, r) for r in v.reps])
        assert vertex_label(moved, tw, n=4) == vertex_label(v, tw, n=4)
