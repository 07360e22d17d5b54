"""Enumeration of finite face-closed regions of the building.

Balls are taken in the 1-skeleton metric (graph distance between
homothety classes); a ball region is the full subcomplex on its vertex
set, so every chain among ball vertices is a simplex of the region.
Large balls may stay vertex-only (no simplex lists materialized), which
is all a fixed-point scan needs.
"""

from .building import SimplexX, transform_lattice
from .chaincx import FiniteComplex
from .errors import GuardExceeded, NotASimplex
from .latmod import Lattice, enumerate_lattices_between

from .coeffring import LaurentSeries
from .latmod import FMatrix


def neighbors(vclass):
    """Adjacent homothety classes: canonical representatives of the
    lattices strictly between t*V and V."""
    rep = vclass.class_normalize()
    out = []
    for m in enumerate_lattices_between(rep.scale(1), rep):
        if m == rep or m == rep.scale(1):
            continue
        out.append(m.class_normalize())
    uniq = {m.key(): m for m in out}
    return sorted(uniq.values(), key=lambda l: l.key())


def vertex_ball(base, radius, guard=20000):
    """BFS ball in the adjacency graph of classes.

    Returns (reps, depth): canonical representative and BFS depth per
    class key.  GuardExceeded beyond `guard` vertices."""
    rep = base.class_normalize()
    reps = {rep.key(): rep}
    depth = {rep.key(): 0}
    frontier = [rep]
    for r in range(1, radius + 1):
        nxt = []
        for v in frontier:
            for w in neighbors(v):
                k = w.key()
                if k not in reps:
                    reps[k] = w
                    depth[k] = r
                    nxt.append(w)
                    if len(reps) > guard:
                        raise GuardExceeded("ball exceeds %d vertices" % guard)
        frontier = nxt
    return reps, depth


def interleaving_rep(v, w):
    """The unique representative M of the class of w with
    t*V < M < V, or None when the classes are not adjacent."""
    n = v.n
    delta = v.det_val() - w.det_val()
    if delta % n == 0:
        return None
    m = w.scale(delta // n + 1)
    if v.contains(m) and m.contains(v.scale(1)) and m != v and m != v.scale(1):
        return m
    return None


def ball_region(base, radius, vertex_guard=20000, materialize=True,
                simplex_guard=2000000, tag=None):
    """Ball region around a vertex class; full subcomplex on the ball.

    With materialize=False only the vertex data is computed (enough for
    fixed-point scans over the full subcomplex)."""
    reps, depth = vertex_ball(base, radius, vertex_guard)
    tag = tag or ("ball:r%d" % radius)
    if not materialize:
        return FiniteComplex(None, tag=tag, vertex_reps=reps,
                             vertex_depth=depth, full_on_vertices=True,
                             radius=radius)
    graded = {}
    count = 0
    verts = sorted(reps.values(), key=lambda l: l.key())
    for v in verts:
        # candidates: classes with a representative strictly inside (tV, V)
        cands = []
        for w in verts:
            if w.key() == v.key() or w.key() < v.key():
                continue
            m = interleaving_rep(v, w)
            if m is not None:
                cands.append(m)
        cands.sort(key=lambda m: m.det_val())
        contains = {}
        for i, a in enumerate(cands):
            for j, b in enumerate(cands):
                if i != j and a.det_val() < b.det_val() and a.contains(b):
                    contains.setdefault(i, []).append(j)

        def chains(start_indices, prefix):
            nonlocal count
            s = SimplexX([v] + [cands[i] for i in prefix])
            graded.setdefault(s.dim, []).append(s)
            count += 1
            if count > simplex_guard:
                raise GuardExceeded("simplex guard exceeded")
            for i in start_indices:
                chains(contains.get(i, []), prefix + [i])

        chains(range(len(cands)), [])
    for q in graded:
        graded[q] = sorted({s.key(): s for s in graded[q]}.values(),
                           key=lambda s: s.key())
    return FiniteComplex(graded, tag=tag, vertex_reps=reps,
                         vertex_depth=depth, full_on_vertices=True,
                         radius=radius)


def complex_from_simplices(simplices, tag=""):
    return FiniteComplex.from_simplices(simplices, tag=tag)


def star_region(fc, s):
    """Face closure of the set of simplices of fc containing s."""
    star = [x for x in fc.simplices() if s.is_face_of(x)]
    return FiniteComplex.from_simplices(star, tag=fc.tag + "|star")


def apartment_region(field, n, window):
    """The part of the standard apartment with diagonal exponent vectors
    in {0..window}^n (first coordinate normalized to 0), as a full
    subcomplex."""
    vecs = [[]]
    for _ in range(n - 1):
        vecs = [v + [a] for v in vecs for a in range(window + 1)]
    classes = [Lattice.from_diag(field, (0,) + tuple(v)).class_normalize()
               for v in vecs]
    uniq = {c.key(): c for c in classes}
    sims = []
    verts = sorted(uniq.values(), key=lambda l: l.key())
    for v in verts:
        cands = [m for m in (interleaving_rep(v, w) for w in verts
                             if w.key() > v.key()) if m is not None]
        cands.sort(key=lambda m: m.det_val())
        contains = {}
        for i, a in enumerate(cands):
            for j, b in enumerate(cands):
                if i != j and a.det_val() < b.det_val() and a.contains(b):
                    contains.setdefault(i, []).append(j)

        def chains(start_indices, prefix):
            sims.append(SimplexX([v] + [cands[i] for i in prefix]))
            for i in start_indices:
                chains(contains.get(i, []), prefix + [i])

        chains(range(len(cands)), [])
    graded = {}
    for s in sims:
        graded.setdefault(s.dim, []).append(s)
    for q in graded:
        graded[q] = sorted({s.key(): s for s in graded[q]}.values(),
                           key=lambda s: s.key())
    return FiniteComplex(graded, tag="apartment:w%d" % window,
                         full_on_vertices=True)


def random_region(field, n, radius, rng, tag=None):
    """Random face-closed region: ball around a random class, restricted
    to the closure of a random subset of its maximal simplices."""
    from .coeffring import LaurentSeries as _LS

    def random_unit_matrix():
        while True:
            rows = []
            for i in range(n):
                row = []
                for j in range(n):
                    ln = rng.randint(1, 2)
                    codes = [rng.randrange(field.q) for _ in range(ln)]
                    row.append(_LS(field, rng.randint(0, 1), codes))
                rows.append(row)
            m = FMatrix(field, rows)
            try:
                Lattice.from_matrix(m)
                return m
            except Exception:
                continue
    g = random_unit_matrix()
    center = transform_lattice(g, Lattice.standard(field, n)).class_normalize()
    ball = ball_region(center, radius)
    top = ball.dim
    maximal = []
    for q in range(top, -1, -1):
        for s in ball.simplices(q):
            if not any(s.is_face_of(x) and s != x for x in maximal):
                maximal.append(s)
    chosen = [s for s in maximal if rng.random() < 0.7] or maximal[:1]
    return FiniteComplex.from_simplices(
        chosen, tag=tag or ("random:r%d" % radius))
