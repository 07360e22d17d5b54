"""Field towers F = floor 0 < E < L < ... with tame split uniformizers
(s_i^{e_i} = previous uniformizer), restriction of scalars to the base,
the centralizer-building embedding, and the numerical membership
criteria for X(E) and X[L].

Each floor is realized concretely: residue field F_{q^(f_1...f_i)} and
uniformizer s_i with s_i^(e_1...e_i) = t, so floor-i scalars are plain
Laurent series over the floor's residue field.  The fixed base-module
basis of the floor's integers is {zeta^a s^b : a < f, b < e} (index
a*e + b), which sends the floor's standard lattice to the base standard
lattice.
"""

from .building import LatticeChain, SimplexX
from .coeffring import INF_PREC, FiniteField, LaurentSeries
from .errors import (BadPeriod, DimensionMismatch, FieldMismatch,
                     NotAChamber)
from .latmod import FMatrix, Lattice


# -- small exact linear algebra over F_p --------------------------------------

def _fp_matrix_inverse(mat, p):
    n = len(mat)
    aug = [row[:] + [1 if i == j else 0 for j in range(n)]
           for i, row in enumerate(mat)]
    row = 0
    for col in range(n):
        piv = None
        for r in range(row, n):
            if aug[r][col] % p:
                piv = r
                break
        if piv is None:
            raise ValueError("singular change-of-basis matrix")
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = pow(aug[row][col], -1, p)
        aug[row] = [(x * inv) % p for x in aug[row]]
        for r in range(n):
            if r != row and aug[r][col] % p:
                c = aug[r][col]
                aug[r] = [(x - c * y) % p for x, y in zip(aug[r], aug[row])]
        row += 1
    return [r[n:] for r in aug]


def _code_digits(code, p, k):
    out = []
    for _ in range(k):
        out.append(code % p)
        code //= p
    return out


def _digits_code(digits, p):
    code = 0
    for d in reversed(digits):
        code = code * p + d
    return code


class TowerField:
    """Ramification data (e_i, f_i) per floor over the previous floor,
    realized over the base residue field."""

    def __init__(self, base_field, floors, n=None):
        self.base_field = base_field
        self.floors = tuple((int(e), int(f)) for (e, f) in floors)
        for e, f in self.floors:
            if e < 1 or f < 1:
                raise BadPeriod("floor invariants must be >= 1")
        self.n = n
        if n is not None and self.degree(self.num_floors) and n % self.degree(self.num_floors):
            raise DimensionMismatch("[top : F] must divide n")
        self._floor_data = {}

    @property
    def num_floors(self):
        return len(self.floors)

    def e_of(self, i):
        """Composite ramification index e(floor_i / F)."""
        out = 1
        for e, _f in self.floors[:i]:
            out *= e
        return out

    def f_of(self, i):
        out = 1
        for _e, f in self.floors[:i]:
            out *= f
        return out

    def degree(self, i):
        return self.e_of(i) * self.f_of(i)

    def residue_field(self, i):
        base = self.base_field
        return FiniteField.get(base.p, base.k * self.f_of(i))

    def uniformizer(self, i):
        return LaurentSeries.t_power(self.residue_field(i), 1)

    # -- base coordinates -------------------------------------------------------

    def _data(self, i):
        """Per-floor cached data: embedding of the base residue field and
        the inverse change-of-basis for coordinates over {zeta^a}."""
        if i in self._floor_data:
            return self._floor_data[i]
        base = self.base_field
        top = self.residue_field(i)
        f = self.f_of(i)
        emb = base.embedding_into(top)
        p = base.p
        k0 = base.k
        kk = top.k
        cols = []
        for a in range(f):
            # zeta^a as a code; the generator is the class of x, code p
            za = top.pow(top.p, a) if top.k > 1 else 1
            for c in range(k0):
                mu = emb[base.pow(base.p, c)] if base.k > 1 else emb[1]
                col = top.mul(za, mu)
                cols.append(_code_digits(col, p, kk))
        mat = [[cols[j][r] for j in range(kk)] for r in range(kk)]
        inv = _fp_matrix_inverse(mat, p)
        data = {"emb": emb, "inv": inv, "p": p, "k0": k0, "kk": kk, "f": f}
        self._floor_data[i] = data
        return data

    def residue_coords(self, i, code):
        """Coordinates of a floor-i residue element over the base residue
        field with respect to the basis {zeta^a : a < f}."""
        d = self._data(i)
        digits = _code_digits(code, d["p"], d["kk"])
        sol = [sum(d["inv"][r][c] * digits[c] for c in range(d["kk"])) % d["p"]
               for r in range(d["kk"])]
        out = []
        for a in range(d["f"]):
            out.append(_digits_code(sol[a * d["k0"]:(a + 1) * d["k0"]], d["p"]))
        return out

    def residue_embed(self, i, base_code):
        """Base residue element into the floor-i residue field."""
        return self._data(i)["emb"][base_code]

    def to_base_coords(self, i, z):
        """Floor-i scalar z (Laurent series in s_i) as a coordinate
        vector of e*f base scalars over the basis {zeta^a s^b}."""
        e, f = self.e_of(i), self.f_of(i)
        base = self.base_field
        if z.field != self.residue_field(i):
            raise FieldMismatch("scalar not in the floor's residue field")
        coords = [{} for _ in range(e * f)]
        prec = z.prec
        for idx, c in enumerate(z.coeffs):
            if not c:
                continue
            j = z.val + idx
            u, b = divmod(j, e)
            for a, cc in enumerate(self.residue_coords(i, c)):
                if cc:
                    coords[a * e + b][u] = cc
        out = []
        for pos in range(e * f):
            b = pos % e
            # precision of the t-coefficient stream at offset b
            if prec >= INF_PREC:
                bp = INF_PREC
            else:
                bp = (prec - b + e - 1) // e  # known for u < ceil((prec-b)/e)
            comp = coords[pos]
            if comp:
                lo = min(comp)
                hi = max(comp) + 1
                arr = [comp.get(u, 0) for u in range(lo, hi)]
                out.append(LaurentSeries(base, lo, arr, bp))
            else:
                out.append(LaurentSeries.zero(base, bp))
        return out

    def from_base_coords(self, i, coords):
        """Inverse of to_base_coords (exact coordinates)."""
        e = self.e_of(i)
        top = self.residue_field(i)
        acc = {}
        for pos, c in enumerate(coords):
            a, b = divmod(pos, e)
            za = top.pow(top.p, a) if top.k > 1 else 1
            for idx, code in enumerate(c.coeffs):
                if not code:
                    continue
                u = c.val + idx
                j = b + e * u
                lifted = top.mul(za, self.residue_embed(i, code))
                acc[j] = top.add(acc.get(j, 0), lifted)
        if not acc:
            return LaurentSeries.zero(top)
        lo, hi = min(acc), max(acc) + 1
        return LaurentSeries(top, lo, [acc.get(j, 0) for j in range(lo, hi)])

    def scalar_matrix(self, i, z, mdim):
        """Matrix of multiplication by the floor-i scalar z on the base
        vector space underlying (floor field)^mdim: block diagonal with
        mdim copies of the e*f regular-representation block."""
        e, f = self.e_of(i), self.f_of(i)
        top = self.residue_field(i)
        deg = e * f
        cols = []
        for a in range(f):
            za = top.pow(top.p, a) if top.k > 1 else 1
            for b in range(e):
                w = z.scale_code(za).shift(b)
                cols.append(self.to_base_coords(i, w))
        block = [[cols[x][r] for x in range(deg)] for r in range(deg)]
        zero = LaurentSeries.zero(self.base_field)
        rows = []
        for bi in range(mdim):
            for r in range(deg):
                row = []
                for bj in range(mdim):
                    if bi == bj:
                        row.extend(block[r])
                    else:
                        row.extend([zero] * deg)
                rows.append(row)
        return FMatrix(self.base_field, rows)

    def restrict_scalars(self, i, lat):
        """A floor-i lattice in (floor field)^m viewed as a base lattice
        in F^(m*e*f) via the fixed integral basis.  Functorial: commutes
        with the scalar action through scalar_matrix."""
        e, f = self.e_of(i), self.f_of(i)
        deg = e * f
        top = self.residue_field(i)
        if lat.field != top:
            raise DimensionMismatch("lattice not over the floor's field")
        m = lat.n
        n = m * deg
        cols = []
        for j in range(m):
            col = lat.basis.column(j)
            for a in range(f):
                za = top.pow(top.p, a) if top.k > 1 else 1
                for b in range(e):
                    newcol = []
                    for entry in col:
                        w = entry.scale_code(za).shift(b)
                        newcol.extend(self.to_base_coords(i, w))
                    cols.append(newcol)
        mat = FMatrix(self.base_field,
                      [[cols[c][r] for c in range(n)] for r in range(n)])
        return Lattice.from_matrix(mat)


class ChainOverFloor:
    """A lattice chain whose lattices are modules over a tower floor's
    valuation ring, in the floor's own ambient dimension."""

    __slots__ = ("tower", "floor", "chain")

    def __init__(self, tower, floor, chain):
        if chain.field != tower.residue_field(floor):
            raise DimensionMismatch("chain is not over the floor's field")
        self.tower = tower
        self.floor = floor
        self.chain = chain

    @staticmethod
    def standard(tower, floor, d_composition):
        field = tower.residue_field(floor)
        return ChainOverFloor(tower, floor, LatticeChain.standard(field, d_composition))

    def d_sequence(self):
        return self.chain.d_sequence()


def j_embed(tw, cf):
    """The base-field lattice chain underlying a floor chain: the lattice
    set {s^j * restrict(M_k)}, i.e. the chain itself read over the base.
    Returns (chain over F, its simplex)."""
    e_rel = tw.e_of(cf.floor)
    e_b = cf.chain.period
    lats = [tw.restrict_scalars(cf.floor, cf.chain.lattice(l))
            for l in range(e_b * e_rel)]
    chain = LatticeChain(lats)
    return chain, SimplexX.from_chain(chain)


def criterion_XE(tw, chain, floor=None):
    """Numerical membership test for X(E) (conjugate normalized by the
    floor's multiplicative group): f(E/F) divides every d_k and e(E/F)
    divides e/p."""
    if floor is None:
        floor = tw.num_floors
    f = tw.f_of(floor)
    e = tw.e_of(floor)
    d, period, p = chain.d_sequence(), chain.period, chain.least_period()
    return all(dk % f == 0 for dk in d) and (period // p) % e == 0


def support_XL(tw, cf, e_param):
    """Nonvanishing of the coefficient space: (n_E / e_param) divides
    every d_E-step of the chain, i.e. the simplex lies in X[L] for L
    unramified over the floor of degree n_E / e_param."""
    n_e = cf.chain.n
    if e_param < 1 or n_e % e_param:
        raise BadPeriod("e parameter must divide dim_E V")
    fl = n_e // e_param
    return all(dk % fl == 0 for dk in cf.d_sequence())


# ---------------------------------------------------------------------------
# X[L] vertices and simplices
# ---------------------------------------------------------------------------

class XLVertex:
    """Vertex of X[L]: the set of base homothety classes swept out by the
    uniformizer powers of one floor-L lattice class."""

    __slots__ = ("reps", "_key")

    def __init__(self, reps):
        uniq = {r.class_normalize().key(): r.class_normalize() for r in reps}
        self.reps = tuple(sorted(uniq.values(), key=lambda l: l.key()))
        self._key = tuple(r.key() for r in self.reps)

    def key(self):
        return self._key

    @property
    def n(self):
        return self.reps[0].n

    def det_val(self):
        """Determinant valuation of the smallest-encoding representative;
        used by labellings (well defined modulo the label modulus)."""
        return self.reps[0].det_val()

    def __eq__(self, other):
        return isinstance(other, XLVertex) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return "XLVertex(classes=%d)" % len(self.reps)


class XLSimplex:
    """Simplex of X[L]: a set of XLVertex values coming from one
    floor-L lattice chain (or a translate); equality is equality of the
    underlying base class sets."""

    __slots__ = ("verts", "tower_sig")

    def __init__(self, verts, tower_sig=None):
        verts = sorted(verts, key=lambda v: v.key())
        self.verts = tuple(verts)
        if tower_sig is None and verts and hasattr(verts[0], "_tower_sig"):
            tower_sig = verts[0]._tower_sig
        self.tower_sig = tower_sig

    @property
    def vertices(self):
        return self.verts

    @property
    def dim(self):
        return len(self.verts) - 1

    def key(self):
        return tuple(v.key() for v in self.verts)

    def faces(self, proper=False):
        out = []
        m = len(self.verts)
        for mask in range(1, 1 << m):
            if proper and mask == (1 << m) - 1:
                continue
            out.append(XLSimplex([self.verts[i] for i in range(m)
                                  if mask & (1 << i)], self.tower_sig))
        return out

    def base_simplex(self):
        """The underlying simplex of X spanned by all base classes."""
        classes = [r for v in self.verts for r in v.reps]
        return SimplexX(classes)

    def xl_orbit_key(self):
        base = self.base_simplex()
        chain = base.to_chain()
        d = chain.d_sequence()
        e = len(d)
        best = min(tuple(d[(k + s) % e] for k in range(e)) for s in range(e))
        return ("XL", self.tower_sig, chain.n, best, e, len(self.verts))

    def __eq__(self, other):
        return isinstance(other, XLSimplex) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "XLSimplex(dim=%d)" % self.dim


def chamber_decomposition(tw, chamber):
    """The chambers of X[L] inside a chamber of X: one per coset of
    f(L/F) in Z/n, vertex j of coset g built from the classes
    {L_(g + f(j + m b)) : b < e(L/F)} with m = n/[L:F]."""
    n = chamber.n
    if chamber.period != n or set(chamber.d_sequence()) != {1}:
        raise NotAChamber("input must be a chamber (period n, steps 1)")
    lvl = tw.num_floors
    f = tw.f_of(lvl)
    e_l = tw.e_of(lvl)
    if n % (f * e_l):
        raise DimensionMismatch("[L : F] must divide n")
    m = n // (f * e_l)
    sig = ("tower", tuple(tw.floors))
    out = []
    for g in range(f):
        verts = []
        for j in range(m):
            reps = [chamber.lattice(g + f * (j + m * b)) for b in range(e_l)]
            verts.append(XLVertex(reps))
        out.append(XLSimplex(verts, sig))
    return out


def vertex_label(v, tw, n=None):
    """Label of an X[L] vertex: determinant valuation of any
    representative, reduced modulo m * f(L/F) with m = n/[L:F].  The
    uniformizer shift moves the valuation by exactly that modulus, and
    the label is injective on the vertex set of every simplex."""
    lvl = tw.num_floors
    f = tw.f_of(lvl)
    e_l = tw.e_of(lvl)
    n = n or v.n
    m = n // (f * e_l)
    return v.det_val() % (m * f)
