"""Lattice chains, hereditary-order invariants, and simplices of the
building X of GL_n(F).

A simplex is the set of homothety classes of the lattices in a periodic
decreasing chain; hereditary orders are never materialized as rings, the
chain is the whole datum.  Simplex equality is class-set equality of
canonical lattice encodings, so G-translates compare without any group
search.
"""

from fractions import Fraction

from .coeffring import LaurentSeries
from .errors import (NotAChain, NotASimplex, NotInApartment, TooLarge)
from .latmod import (FMatrix, Lattice, enumerate_lattices_between,
                     matrix_inverse, quotient_length)


class LatticeChain:
    """Strictly decreasing chain L_0 > L_1 > ... > L_{e-1} > t L_0 of
    lattices, extended to all indices by L_{k+e} = t L_k."""

    __slots__ = ("field", "n", "lats", "_d")

    def __init__(self, lats, validate=True):
        lats = tuple(lats)
        if not lats:
            raise NotAChain("empty chain")
        self.field = lats[0].field
        self.n = lats[0].n
        self.lats = lats
        self._d = None
        if validate:
            closed = lats + (lats[0].scale(1),)
            for a, b in zip(closed, closed[1:]):
                if not a.contains(b) or a == b:
                    raise NotAChain("inclusions must be strict over one period")
            if sum(self.d_sequence()) != self.n:
                raise NotAChain("step dimensions must sum to n")

    @staticmethod
    def standard(field, d_composition):
        """The chain of standard-basis lattices with step sizes d_k:
        L_j spanned by t e_1, ..., t e_{s_j}, e_{s_j+1}, ..., e_n."""
        n = sum(d_composition)
        lats = []
        s = 0
        for d in d_composition:
            lats.append(Lattice.from_diag(field, (1,) * s + (0,) * (n - s)))
            s += d
        return LatticeChain(lats)

    @property
    def period(self):
        return len(self.lats)

    def lattice(self, k):
        """L_k for any integer k (t-periodic extension)."""
        e = self.period
        q, r = divmod(k, e)
        return self.lats[r].scale(q)

    def d_sequence(self):
        if self._d is None:
            closed = self.lats + (self.lats[0].scale(1),)
            self._d = tuple(quotient_length(a, b)
                            for a, b in zip(closed, closed[1:]))
        return self._d

    def least_period(self):
        d = self.d_sequence()
        e = len(d)
        for p in range(1, e + 1):
            if e % p == 0 and all(d[k] == d[(k + p) % e] for k in range(e)):
                return p
        return e

    def simplex(self):
        return SimplexX.from_chain(self)

    def rotate(self, shift):
        """The same chain re-indexed to start at L_shift."""
        e = self.period
        shift %= e
        return LatticeChain([self.lattice(shift + i) for i in range(e)],
                            validate=False)

    def __eq__(self, other):
        return isinstance(other, LatticeChain) and self.lats == other.lats

    def __hash__(self):
        return hash(tuple(l.key() for l in self.lats))

    def __repr__(self):
        return "LatticeChain(e=%d, d=%s)" % (self.period, list(self.d_sequence()))


def chain_invariants(chain):
    """(d-sequence over one period, period e, least positive period p)."""
    return chain.d_sequence(), chain.period, chain.least_period()


def are_conjugate(c1, c2):
    """Hereditary orders are conjugate iff the d-sequences agree up to a
    translation of the indexing."""
    if c1.n != c2.n:
        return False
    d1, d2 = c1.d_sequence(), c2.d_sequence()
    if len(d1) != len(d2):
        return False
    e = len(d1)
    return any(all(d1[(k + s) % e] == d2[k] for k in range(e)) for s in range(e))


# ---------------------------------------------------------------------------
# simplices
# ---------------------------------------------------------------------------

class SimplexX:
    """Simplex of X: the set of homothety classes of a chain, stored as
    canonical class representatives sorted by encoding."""

    __slots__ = ("classes", "_chain")

    def __init__(self, classes):
        reps = sorted({c.class_normalize().key(): c.class_normalize()
                       for c in classes}.values(), key=lambda l: l.key())
        self.classes = tuple(reps)
        self._chain = None

    @staticmethod
    def from_chain(chain):
        s = SimplexX(chain.lats)
        if len(s.classes) != chain.period:
            raise NotASimplex("chain lattices not in distinct classes")
        return s

    @property
    def dim(self):
        return len(self.classes) - 1

    def key(self):
        return tuple(c.key() for c in self.classes)

    def __eq__(self, other):
        return isinstance(other, SimplexX) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __len__(self):
        return len(self.classes)

    @property
    def vertices(self):
        return self.classes

    def faces(self, proper=False):
        """All nonempty subsets (each subset of a chain is again a chain)."""
        out = []
        m = len(self.classes)
        for mask in range(1, 1 << m):
            if proper and mask == (1 << m) - 1:
                continue
            out.append(SimplexX([self.classes[i] for i in range(m)
                                 if mask & (1 << i)]))
        return out

    def is_face_of(self, other):
        mine = set(c.key() for c in self.classes)
        theirs = set(c.key() for c in other.classes)
        return mine <= theirs

    def to_chain(self):
        """Reconstruct the nested chain starting from the class with the
        smallest encoding; unique once that choice is fixed."""
        if self._chain is not None:
            return self._chain
        l0 = self.classes[0]
        n = l0.n
        members = [l0]
        v0 = l0.det_val()
        for rep in self.classes[1:]:
            delta = v0 - rep.det_val()
            # unique c with v0 < det(t^c rep) < v0 + n
            if delta % n == 0:
                raise NotASimplex("two classes with the same determinant class")
            c = delta // n + 1
            m = rep.scale(c)
            if not (l0.contains(m) and m.contains(l0.scale(1))):
                raise NotASimplex("classes do not interleave into a chain")
            members.append(m)
        members.sort(key=lambda l: l.det_val())
        for a, b in zip(members, members[1:]):
            if not a.contains(b) or a == b:
                raise NotASimplex("classes are not totally ordered")
        self._chain = LatticeChain(members, validate=False)
        return self._chain

    def __repr__(self):
        return "SimplexX(dim=%d)" % self.dim


def simplex_relations(a, b, kind):
    """kind in {face, equal}."""
    if kind == "face":
        return a.is_face_of(b)
    if kind == "equal":
        return a == b
    raise ValueError("unknown kind %r" % kind)


def standard_vertex(field, n):
    return SimplexX([Lattice.standard(field, n)])


def standard_chamber(field, n):
    return SimplexX.from_chain(LatticeChain.standard(field, (1,) * n))


def chambers_containing(panel, guard=256):
    """All chambers having the codimension-1 panel as a face, by
    enumerating the lattices filling the unique gap with step 2."""
    if panel.classes[0].field.q ** panel.classes[0].n > guard:
        raise TooLarge("residue field too large for chamber enumeration")
    chain = panel.to_chain()
    n = chain.n
    if len(panel.classes) != n - 1:
        raise NotASimplex("panel must have codimension 1")
    d = chain.d_sequence()
    k = d.index(2)
    upper = chain.lats[k]
    lower = chain.lattice(k + 1)
    out = []
    for mid in enumerate_lattices_between(lower, upper):
        if mid == lower or mid == upper:
            continue
        out.append(SimplexX(list(chain.lats) + [mid]))
    return sorted(out, key=lambda s: s.key())


# ---------------------------------------------------------------------------
# barycentric subdivision flags
# ---------------------------------------------------------------------------

class FlagSd:
    """Simplex of sd(X): strictly increasing flag of simplices of X
    (equivalently a strictly decreasing flag of hereditary orders)."""

    __slots__ = ("simplices",)

    def __init__(self, simplices):
        simplices = tuple(simplices)
        for a, b in zip(simplices, simplices[1:]):
            if not (a.is_face_of(b) and a != b):
                raise NotAChain("flag must strictly increase")
        self.simplices = simplices

    def __len__(self):
        return len(self.simplices)

    def __eq__(self, other):
        return isinstance(other, FlagSd) and \
            tuple(s.key() for s in self.simplices) == \
            tuple(s.key() for s in other.simplices)

    def __hash__(self):
        return hash(tuple(s.key() for s in self.simplices))


def sd_flags(s):
    """All flags of faces of the closed simplex s: the simplices of the
    barycentric subdivision of s."""
    faces = s.faces()
    faces.sort(key=lambda f: (len(f.classes), f.key()))
    out = []

    def extend(flag):
        out.append(FlagSd(flag))
        top = flag[-1]
        for f in faces:
            if len(f.classes) > len(top.classes) and top.is_face_of(f):
                extend(flag + [f])

    for f in faces:
        extend([f])
    return out


def is_semistandard(flag):
    """True iff the smallest simplex of the flag is a vertex (i.e. the
    largest order in the decreasing flag is maximal)."""
    return len(flag.simplices[0].classes) == 1


# ---------------------------------------------------------------------------
# apartments
# ---------------------------------------------------------------------------

class ApartmentPoint:
    """Point of the standard apartment: a coordinate vector modulo the
    all-ones diagonal shift.  Normalized so the first coordinate is 0."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        coords = [Fraction(c) for c in coords]
        base = coords[0]
        self.coords = tuple(c - base for c in coords)

    def __eq__(self, other):
        return isinstance(other, ApartmentPoint) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "ApartmentPoint(%s)" % (list(self.coords),)


def sq_dist_mod_diag(u, v):
    """Squared euclidean distance between coordinate vectors taken
    modulo the diagonal line (exact rational)."""
    diff = [Fraction(a) - Fraction(b) for a, b in zip(u, v)]
    n = len(diff)
    s = sum(diff)
    return sum(d * d for d in diff) - s * s / n


def apartment_coords(s, basis):
    """Coordinates of the classes of s in the apartment determined by
    `basis`: each class must be spanned by t-power multiples of the
    basis columns, else NotInApartment."""
    binv = matrix_inverse(basis)
    pts = []
    for rep in s.classes:
        lat = Lattice.from_matrix(binv * rep.basis)
        for i in range(lat.n):
            for j in range(i + 1, lat.n):
                if lat.basis.rows[i][j].coeffs:
                    raise NotInApartment("class is not diagonal in this basis")
        pts.append(ApartmentPoint(lat.diag))
    return pts


class AffineEmbedding:
    """The apartment-level form of the centralizer embedding: coordinates
    x of length m map to (x_i / e + mu_j) over all pairs (i, j).  All
    pairwise squared distances modulo the diagonal scale by the single
    rational factor len(offsets) / e^2."""

    def __init__(self, e, offsets):
        if e < 1:
            raise ValueError("ramification index must be >= 1")
        self.e = e
        self.offsets = tuple(Fraction(m) for m in offsets)
        self.sq_scale = Fraction(len(self.offsets), e * e)

    def __call__(self, x):
        out = []
        for xi in x:
            for mu in self.offsets:
                out.append(Fraction(xi) / self.e + mu)
        return tuple(out)


def embed_affine(e, offsets):
    return AffineEmbedding(e, offsets)


# ---------------------------------------------------------------------------
# matrix actions (used by tests and the fixed-point machinery)
# ---------------------------------------------------------------------------

def transform_lattice(g, lat):
    """g * L for g an invertible FMatrix."""
    return Lattice.from_matrix(g * lat.basis)


def transform_chain(g, chain):
    return LatticeChain([transform_lattice(g, l) for l in chain.lats],
                        validate=False)


def transform_simplex(g, s):
    return SimplexX([transform_lattice(g, c) for c in s.classes])
