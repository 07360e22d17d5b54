"""Chains, simplices, conjugacy, flags, apartments."""

import itertools
from fractions import Fraction

import pytest

from btlab.building import (AffineEmbedding, ApartmentPoint, FlagSd,
                            LatticeChain, SimplexX, apartment_coords,
                            are_conjugate, chain_invariants,
                            chambers_containing, embed_affine,
                            is_semistandard, sd_flags, simplex_relations,
                            sq_dist_mod_diag, standard_chamber,
                            standard_vertex, transform_chain,
                            transform_simplex)
from btlab.coeffring import FiniteField
from btlab.errors import NotAChain, NotASimplex
from btlab.latmod import FMatrix, Lattice

from util import random_invertible, rng_for


def F2():
    return FiniteField.get(2, 1)


# -- chains and invariants -----------------------------------------------------

def test_chain_invariants_examples():
    F = F2()
    d, e, p = chain_invariants(LatticeChain.standard(F, (2, 2)))
    assert (d, e, p) == ((2, 2), 2, 1)
    d, e, p = chain_invariants(LatticeChain.standard(F, (1, 2, 1, 2)))
    assert (d, e, p) == ((1, 2, 1, 2), 4, 2)
    d, e, p = chain_invariants(LatticeChain.standard(F, (1, 1, 1)))
    assert (d, e, p) == ((1, 1, 1), 3, 1)


def test_chain_validation():
    F = F2()
    std = Lattice.standard(F, 2)
    with pytest.raises(NotAChain):
        LatticeChain([std, std])  # not strict
    with pytest.raises(NotAChain):
        LatticeChain([std, std.scale(2)])  # skips t*std


def test_d_sum_is_n():
    rng = rng_for("dsum")
    F = F2()
    for comp in [(1, 1), (2,), (1, 2, 1), (3, 1), (1, 1, 1, 1)]:
        chain = LatticeChain.standard(F, comp)
        assert sum(chain.d_sequence()) == chain.n
        g = random_invertible(rng, F, chain.n)
        moved = transform_chain(g, chain)
        assert sum(moved.d_sequence()) == chain.n


def test_are_conjugate_shift():
    F = F2()
    c1 = LatticeChain.standard(F, (1, 2, 1, 2))
    c2 = LatticeChain.standard(F, (2, 1, 2, 1))
    assert are_conjugate(c1, c2)
    c3 = LatticeChain.standard(F, (1, 3))
    c4 = LatticeChain.standard(F, (2, 2))
    assert not are_conjugate(c3, c4)


def test_are_conjugate_under_group_action():
    rng = rng_for("conj-g")
    F = F2()
    for comp in [(1, 1), (1, 2), (2, 1, 1)]:
        chain = LatticeChain.standard(F, comp)
        for _ in range(8):
            g = random_invertible(rng, F, chain.n)
            assert are_conjugate(chain, transform_chain(g, chain))


def test_are_conjugate_equivalence_relation():
    F = F2()
    comps = [(1, 1, 2), (2, 1, 1), (1, 2, 1), (4,), (2, 2), (1, 3)]
    chains = [LatticeChain.standard(F, c) for c in comps]
    for a in chains:
        assert are_conjugate(a, a)
        for b in chains:
            assert are_conjugate(a, b) == are_conjugate(b, a)
            for c in chains:
                if are_conjugate(a, b) and are_conjugate(b, c):
                    assert are_conjugate(a, c)


# -- simplices ---------------------------------------------------------------------

def test_simplex_faces_and_relations():
    F = F2()
    cham = standard_chamber(F, 3)
    vert = standard_vertex(F, 3)
    assert simplex_relations(vert, cham, "face")
    assert simplex_relations(cham, cham, "face")
    assert simplex_relations(cham, cham, "equal")
    assert len(cham.faces()) == 7
    assert cham.dim == 2


def test_gl4_opposite_edges_not_faces():
    """The two X(E)-edges of a GL_4 chamber are not faces of one another."""
    F = F2()
    cham = standard_chamber(F, 4)
    chain = cham.to_chain()
    e02 = SimplexX([chain.lats[0], chain.lats[2]])
    e13 = SimplexX([chain.lats[1], chain.lats[3]])
    assert not e02.is_face_of(e13)
    assert not e13.is_face_of(e02)
    assert e02.is_face_of(cham) and e13.is_face_of(cham)


def test_to_chain_recovers_invariants():
    rng = rng_for("tochain")
    F = F2()
    for comp in [(1, 1), (1, 2), (2, 2), (1, 1, 1)]:
        chain = LatticeChain.standard(F, comp)
        s = SimplexX.from_chain(chain)
        back = s.to_chain()
        assert are_conjugate(chain, back)
        g = random_invertible(rng, F, chain.n)
        s2 = transform_simplex(g, s)
        assert are_conjugate(s2.to_chain(), chain)


def test_transformed_chamber_equality():
    """Simplex equality decides G-translates without group search."""
    rng = rng_for("translate")
    F = F2()
    cham = standard_chamber(F, 2)
    # an element fixing the chamber classes: diagonal units
    u = FMatrix.from_int_rows(F, [[1, 0], [0, 1]])
    assert transform_simplex(u, cham) == cham


# -- chambers containing a panel ------------------------------------------------

@pytest.mark.parametrize("q,count", [(2, 3), (3, 4)])
def test_chambers_containing_counts(q, count):
    """q + 1 chambers over a panel in GL_2, matching line counts in P^1."""
    F = FiniteField.get(q, 1)
    panel = standard_vertex(F, 2)
    chams = chambers_containing(panel)
    assert len(chams) == count
    # brute-force oracle: lines of F_q^2
    lines = set()
    for vec in itertools.product(range(q), repeat=2):
        if vec == (0, 0):
            continue
        line = frozenset(tuple(F.mul(c, x) for x in vec) for c in range(q))
        lines.add(line)
    assert len(chams) == len(lines)
    for c in chams:
        assert panel.is_face_of(c)
        assert c.dim == 1


def test_chambers_containing_gl3():
    F = F2()
    chain = LatticeChain.standard(F, (1, 2))
    panel = SimplexX.from_chain(chain)
    chams = chambers_containing(panel)
    assert len(chams) == 3  # lines of F_2^2 inside the d=2 gap
    for c in chams:
        assert panel.is_face_of(c) and c.dim == 2


# -- flags ---------------------------------------------------------------------------

def test_sd_flags_edge_count():
    """Subdivision of a segment: 3 vertices + 2 edges = 5 flags."""
    F = F2()
    chain = LatticeChain.standard(F, (1, 1))
    edge = SimplexX.from_chain(chain)
    flags = sd_flags(edge)
    assert len(flags) == 5
    lengths = sorted(len(f) for f in flags)
    assert lengths == [1, 1, 1, 2, 2]


def test_sd_flags_chamber_count():
    """Subdivision of a triangle: 7 vertices, 12 edges, 6 triangles."""
    F = F2()
    cham = standard_chamber(F, 3)
    flags = sd_flags(cham)
    by_len = {}
    for f in flags:
        by_len[len(f)] = by_len.get(len(f), 0) + 1
    assert by_len == {1: 7, 2: 12, 3: 6}


def test_is_semistandard():
    F = F2()
    cham = standard_chamber(F, 2)
    chain = cham.to_chain()
    vert = SimplexX([chain.lats[0]])
    assert is_semistandard(FlagSd([vert, cham]))
    assert is_semistandard(FlagSd([vert]))
    assert not is_semistandard(FlagSd([cham]))
    cham3 = standard_chamber(F, 3)
    edge = SimplexX(cham3.to_chain().lats[:2])
    assert not is_semistandard(FlagSd([edge, cham3]))


# -- apartments ---------------------------------------------------------------------

def test_apartment_coords_diagonal():
    F = F2()
    basis = FMatrix.identity(F, 3)
    lat = Lattice.from_diag(F, (2, 0, 1))
    s = SimplexX([lat])
    pts = apartment_coords(s, basis)
    assert pts == [ApartmentPoint((2, 0, 1))]
    # homothety: same point
    s2 = SimplexX([lat.scale(5)])
    assert apartment_coords(s2, basis) == pts


def test_apartment_coords_not_in_apartment():
    F = F2()
    basis = FMatrix.identity(F, 2)
    m = FMatrix.from_int_rows(F, [[1, 1], [0, 1]])
    lat = Lattice.from_matrix(m * Lattice.from_diag(F, (3, 0)).basis)
    from btlab.errors import NotInApartment
    with pytest.raises(NotInApartment):
        apartment_coords(SimplexX([lat]), basis)


def test_embed_affine_isometry_ratio():
    """e = 2, two offsets (degree 4 image): the three pairwise squared
    distances mod the diagonal all scale by the same constant."""
    emb = embed_affine(2, [Fraction(0), Fraction(1, 2)])
    pts = [(0, 0), (1, 0), (0, 1)]
    imgs = [emb(p) for p in pts]
    ratios = set()
    for a, b in itertools.combinations(range(3), 2):
        d0 = sq_dist_mod_diag(pts[a], pts[b])
        d1 = sq_dist_mod_diag(imgs[a], imgs[b])
        ratios.add(Fraction(d1, d0))
    assert len(ratios) == 1
    assert ratios.pop() == emb.sq_scale


def test_apartment_point_normalization():
    assert ApartmentPoint((1, 2, 3)) == ApartmentPoint((0, 1, 2))
    assert ApartmentPoint((1, 1)) == ApartmentPoint((5, 5))
    assert ApartmentPoint((0, 1)) != ApartmentPoint((1, 0))
