"""Lattices in F^n and linear algebra over the valuation ring o = F_q[[t]].

A lattice is stored by its unique canonical basis: upper triangular with
diagonal t^{a_i} and entry (i, j > i) a finite t-polynomial reduced
modulo t^{a_i}.  Two lattices are equal as o-modules iff their canonical
encodings are identical, which makes every downstream equality test
(simplices, fixed points) bit-exact.
"""

from . import backend
from .coeffring import INF_PREC, LaurentSeries
from .errors import (NotContained, PrecisionExhausted, SingularMatrix,
                     TooLarge)

_CTX_CACHE = {}


def _field_ctx(field):
    key = (id(backend.get()), field.p, field.k, field.modulus)
    if key not in _CTX_CACHE:
        _CTX_CACHE[key] = backend.get().make_field_ctx(
            field.p, field.k, field.q, field._exp, field._log)
    return _CTX_CACHE[key]


# ---------------------------------------------------------------------------
# matrices over F((t))
# ---------------------------------------------------------------------------

class FMatrix:
    """Rectangular matrix of LaurentSeries over one coefficient field."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field, rows):
        rows = tuple(tuple(r) for r in rows)
        self.field = field
        self.nrows = len(rows)
        self.ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != self.ncols:
                raise ValueError("ragged matrix")
        self.rows = rows

    @staticmethod
    def identity(field, n):
        one = LaurentSeries.one(field)
        zero = LaurentSeries.zero(field)
        return FMatrix(field, [[one if i == j else zero for j in range(n)]
                               for i in range(n)])

    @staticmethod
    def diag_tpowers(field, exps):
        zero = LaurentSeries.zero(field)
        n = len(exps)
        return FMatrix(field, [[LaurentSeries.t_power(field, exps[i]) if i == j else zero
                                for j in range(n)] for i in range(n)])

    @staticmethod
    def from_int_rows(field, rows):
        """Integer entries, reduced into the prime field (exact)."""
        return FMatrix(field, [[LaurentSeries.from_int(field, v) for v in r]
                               for r in rows])

    def __getitem__(self, rc):
        return self.rows[rc[0]][rc[1]]

    def column(self, j):
        return tuple(self.rows[i][j] for i in range(self.nrows))

    def hstack(self, other):
        assert self.nrows == other.nrows and self.field == other.field
        return FMatrix(self.field, [self.rows[i] + other.rows[i]
                                    for i in range(self.nrows)])

    def transpose(self):
        return FMatrix(self.field, list(zip(*self.rows)))

    def scale(self, k):
        """Multiply every entry by t^k."""
        return FMatrix(self.field, [[e.shift(k) for e in r] for r in self.rows])

    def __add__(self, other):
        assert (self.nrows, self.ncols) == (other.nrows, other.ncols)
        return FMatrix(self.field, [[a + b for a, b in zip(ra, rb)]
                                    for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        assert (self.nrows, self.ncols) == (other.nrows, other.ncols)
        return FMatrix(self.field, [[a - b for a, b in zip(ra, rb)]
                                    for ra, rb in zip(self.rows, other.rows)])

    def __mul__(self, other):
        if not isinstance(other, FMatrix):
            raise TypeError
        assert self.ncols == other.nrows and self.field == other.field
        ctx = _field_ctx(self.field)
        av, ap, ad, ao = _flatten(self)
        bv, bp, bd, bo = _flatten(other)
        span_a = _degree_span(self)
        span_b = _degree_span(other)
        cap = span_a + span_b + 4
        out = backend.get().mat_mul(ctx, self.nrows, self.ncols, other.ncols,
                                    av, ap, ad, ao, bv, bp, bd, bo, cap)
        return _unflatten(self.field, self.nrows, other.ncols, *out)

    def apply_vector(self, vec):
        """Matrix @ column vector (tuple of LaurentSeries)."""
        col = FMatrix(self.field, [[v] for v in vec])
        return tuple((self * col).rows[i][0] for i in range(self.nrows))

    def min_entry_val(self):
        vals = [e.val for r in self.rows for e in r if e.coeffs]
        return min(vals) if vals else 0

    def entries_exact(self):
        return all(e.is_exact() for r in self.rows for e in r)

    def __eq__(self, other):
        return (isinstance(other, FMatrix) and self.field == other.field
                and self.rows == other.rows)

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        body = ";\n ".join(", ".join(repr(e) for e in r) for r in self.rows)
        return "FMatrix(\n %s)" % body


def _flatten(m):
    vals, precs, data, offs = [], [], [], [0]
    for r in m.rows:
        for e in r:
            vals.append(e.val)
            precs.append(e.prec)
            data.extend(e.coeffs)
            offs.append(len(data))
    return vals, precs, data, offs


def _unflatten(field, nr, nc, vals, precs, data, offs):
    rows = []
    idx = 0
    for i in range(nr):
        row = []
        for j in range(nc):
            codes = data[offs[idx]:offs[idx + 1]]
            row.append(LaurentSeries(field, vals[idx], codes, precs[idx]))
            idx += 1
        rows.append(row)
    return FMatrix(field, rows)


def _degree_span(m):
    lo, hi = 0, 1
    for r in m.rows:
        for e in r:
            if e.coeffs:
                lo = min(lo, e.val)
                hi = max(hi, e.val + len(e.coeffs))
    return hi - lo


# ---------------------------------------------------------------------------
# Hermite normal form over o
# ---------------------------------------------------------------------------

def exact_det(m):
    """Determinant of a square matrix with exact entries, by minor
    expansion with memoization on column subsets.  Exact Laurent series."""
    n = m.nrows
    field = m.field
    memo = {}

    def minor(r, cols):
        if r == n:
            return LaurentSeries.one(field)
        key = cols
        if key in memo:
            return memo[key]
        acc = LaurentSeries.zero(field)
        sign = 1
        for idx, c in enumerate(cols):
            e = m.rows[r][c]
            if e.coeffs:
                sub = minor(r + 1, cols[:idx] + cols[idx + 1:])
                term = e * sub
                acc = acc + (term if sign > 0 else -term)
            sign = -sign
        memo[key] = acc
        return acc

    return minor(0, tuple(range(n)))


def hermite_normal_form(m, want_transform=False):
    """Canonical column echelon form over o spanning the same column
    o-module, plus (optionally) the unimodular-over-o column transform U
    with m @ U = H.  Idempotent on canonical inputs.

    For square exact input the exact determinant fixes the working
    window upfront (and detects singularity); otherwise the window grows
    automatically for exact inputs, while finite-precision inputs get a
    single attempt and raise PrecisionExhausted if the form cannot be
    certified.
    """
    ctx = _field_ctx(m.field)
    vals, precs, data, offs = _flatten(m)
    exact = m.entries_exact()
    span = _degree_span(m)
    m0 = min(0, m.min_entry_val())
    cap = max(8, span + m.nrows + 4)
    if exact and m.nrows == m.ncols:
        det = exact_det(m)
        if det.is_exact_zero():
            raise SingularMatrix("exact determinant vanishes")
        req = det.val - (m.nrows - 1) * m0 + 1
        cap = max(cap, 2 * (req - m0) + span + m.nrows + 8)
    attempts = 0
    while True:
        try:
            out = backend.get().hnf(ctx, m.nrows, m.ncols, vals, precs, data,
                                    offs, cap, want_transform)
            break
        except PrecisionExhausted:
            attempts += 1
            if not exact or cap > 2 ** 14:
                raise
            cap *= 2
    h = _unflatten(m.field, m.nrows, m.nrows,
                   out["vals"], out["precs"], out["coeffdata"], out["offsets"])
    if not want_transform:
        return h, None, out["diag"], out["req"]
    u = _unflatten(m.field, m.ncols, m.ncols,
                   out["u_vals"], out["u_precs"], out["u_coeffdata"], out["u_offsets"])
    return h, u, out["diag"], out["req"]


def upper_tri_solve(h, diag, rhs):
    """Solve h @ X = rhs for canonical triangular h (diag t^{a_i}).

    Back-substitution only divides by exact monomials, so exact input
    stays exact.  Entries of X live in F((t)), not necessarily in o.
    """
    n = h.nrows
    field = h.field
    cols = []
    for j in range(rhs.ncols):
        x = [None] * n
        for i in range(n - 1, -1, -1):
            acc = rhs.rows[i][j]
            for r in range(i + 1, n):
                acc = acc - h.rows[i][r] * x[r]
            x[i] = acc.shift(-diag[i])
        cols.append(x)
    return FMatrix(field, [[cols[j][i] for j in range(rhs.ncols)]
                           for i in range(n)])


def matrix_inverse(m, prec=None):
    """Inverse of a square matrix over F((t)); finite precision in general
    (column transforms involve unit inverses)."""
    h, u, diag, _req = hermite_normal_form(m, want_transform=True)
    hinv = upper_tri_solve(h, diag, FMatrix.identity(m.field, m.nrows))
    inv = u * hinv
    if prec is not None:
        inv = FMatrix(m.field, [[e.truncate(prec) for e in r] for r in inv.rows])
    return inv


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------

class Lattice:
    """Full o-lattice in F^n, held by its canonical triangular basis."""

    __slots__ = ("field", "n", "basis", "diag", "prec", "_key")

    def __init__(self, field, n, basis, diag, prec):
        self.field = field
        self.n = n
        self.basis = basis
        self.diag = tuple(diag)
        self.prec = prec
        self._key = None

    @staticmethod
    def standard(field, n):
        return Lattice(field, n, FMatrix.identity(field, n), (0,) * n,
                       INF_PREC)

    @staticmethod
    def from_diag(field, exps):
        return Lattice(field, len(exps), FMatrix.diag_tpowers(field, exps),
                       tuple(exps), INF_PREC)

    @staticmethod
    def from_matrix(m, pad_square=True):
        """Canonicalize the column span of m (full row rank required)."""
        if m.nrows > m.ncols:
            raise SingularMatrix("fewer columns than the ambient dimension")
        h, _u, diag, req = hermite_normal_form(m)
        amax = max(diag)
        cert = max(req, amax + 2)
        return Lattice(m.field, m.nrows, h, diag, cert)

    def det_val(self):
        """t-valuation of det(basis); index data for quotients."""
        return sum(self.diag)

    def key(self):
        """Canonical hashable encoding; equality of keys = equality of
        o-modules."""
        if self._key is None:
            upper = []
            for i in range(self.n):
                for j in range(i + 1, self.n):
                    e = self.basis.rows[i][j]
                    upper.append((e.val, e.coeffs) if e.coeffs else (0, ()))
            self._key = (self.n, self.diag, tuple(upper))
        return self._key

    def __eq__(self, other):
        return (isinstance(other, Lattice) and self.field == other.field
                and self.key() == other.key())

    def __hash__(self):
        return hash(self.key())

    def scale(self, k):
        """t^k * L; canonical form shifts wholesale."""
        if k == 0:
            return self
        basis = self.basis.scale(k)
        return Lattice(self.field, self.n, basis,
                       tuple(a + k for a in self.diag),
                       min(self.prec + k, INF_PREC))

    def min_val(self):
        return self.basis.min_entry_val()

    def class_normalize(self):
        """The canonical homothety representative: minimal k with
        t^k L inside the standard lattice but not inside t * standard."""
        return self.scale(-self.min_val())

    def contains(self, other):
        """other is an o-submodule of self (exact test)."""
        if other.n != self.n or other.field != self.field:
            raise ValueError("ambient mismatch")
        x = upper_tri_solve(self.basis, self.diag, other.basis)
        return all(e.is_zero() or e.val >= 0 for r in x.rows for e in r)

    def sum(self, other):
        return Lattice.from_matrix(self.basis.hstack(other.basis))

    def dual(self):
        """{x : <x, L> in o}; basis = inverse transpose (exact here)."""
        hinv = upper_tri_solve(self.basis, self.diag,
                               FMatrix.identity(self.field, self.n))
        return Lattice.from_matrix(hinv.transpose())

    def intersect(self, other):
        return self.dual().sum(other.dual()).dual()

    def __repr__(self):
        return "Lattice(n=%d, diag=%s)" % (self.n, list(self.diag))


def quotient_length(outer, inner):
    """dim_{F_q}(outer/inner) = t-valuation of the basis determinant
    ratio.  Raises NotContained when inner is not inside outer."""
    if not outer.contains(inner):
        raise NotContained("inner lattice not contained in outer")
    return inner.det_val() - outer.det_val()


def lattice_ops(a, b, kind):
    """Dispatcher: kind in {sum, intersection, contains, homothety_normalize}."""
    if kind == "sum":
        return a.sum(b)
    if kind == "intersection":
        return a.intersect(b)
    if kind == "contains":
        return a.contains(b)
    if kind == "homothety_normalize":
        return a.class_normalize()
    raise ValueError("unknown kind %r" % kind)


# ---------------------------------------------------------------------------
# enumeration of intermediate lattices
# ---------------------------------------------------------------------------

LENGTH_GUARD = 8


def enumerate_lattices_between(low, high, max_count=200000):
    """All lattices M with low <= M <= high, i.e. all o-submodules of the
    finite quotient high/low, lifted canonically.  Sorted by encoding.

    Guarded: quotient length above LENGTH_GUARD raises TooLarge.
    """
    length = quotient_length(high, low)
    if length > LENGTH_GUARD:
        raise TooLarge("quotient length %d exceeds guard %d" % (length, LENGTH_GUARD))
    field = high.field
    n = high.n
    # low in high-coordinates: canonical triangular Y with diag t^{b_i}
    y = upper_tri_solve(high.basis, high.diag, low.basis)
    ylat = Lattice.from_matrix(y)
    subs = _submodules_of_quotient(field, ylat)
    out = []
    for rows in subs:
        # columns: Y plus lifted generators, in high-coordinates
        cols = [ylat.basis.column(j) for j in range(n)]
        for vec in rows:
            cols.append(_coords_to_vector(field, ylat.diag, vec))
        m = FMatrix(field, [[cols[c][r] for c in range(len(cols))] for r in range(n)])
        inner = Lattice.from_matrix(m)
        ambient = Lattice.from_matrix(high.basis * inner.basis)
        out.append(ambient)
        if len(out) > max_count:
            raise TooLarge("more than %d intermediate lattices" % max_count)
    uniq = {l.key(): l for l in out}
    return sorted(uniq.values(), key=lambda l: l.key())


def _basis_positions(diag):
    """F_q-basis of o^n / Y o^n: monomials t^j e_i with j < b_i."""
    pos = []
    for i, b in enumerate(diag):
        for j in range(b):
            pos.append((i, j))
    return pos


def _coords_to_vector(field, diag, coords):
    """Coordinate tuple over the monomial basis -> polynomial vector."""
    n = len(diag)
    comps = [dict() for _ in range(n)]
    for (i, j), c in zip(_basis_positions(diag), coords):
        if c:
            comps[i][j] = c
    vec = []
    for i in range(n):
        if comps[i]:
            top = max(comps[i]) + 1
            arr = [comps[i].get(d, 0) for d in range(top)]
            vec.append(LaurentSeries(field, 0, arr))
        else:
            vec.append(LaurentSeries.zero(field))
    return tuple(vec)


def _reduce_vector(field, ylat, vec):
    """Canonical representative of vec modulo the columns of ylat."""
    n = ylat.n
    diag = ylat.diag
    vec = list(vec)
    for r in range(n - 1, -1, -1):
        e = vec[r]
        if not e.coeffs:
            continue
        drop = max(0, diag[r] - e.val)
        if drop < len(e.coeffs):
            q = LaurentSeries(field, e.val + drop - diag[r], e.coeffs[drop:])
            for i in range(r + 1):
                vec[i] = vec[i] - q * ylat.basis.rows[i][r]
    return tuple(vec)


_SUBMODULE_CACHE = {}


def _submodules_of_quotient(field, ylat):
    """All o-submodules of o^n / ylat, as lists of coordinate tuples
    (an F_q-basis of each submodule in the monomial coordinates).
    Cached: the answer depends only on the canonical form of ylat."""
    cache_key = (field.p, field.k, field.modulus, ylat.key())
    if cache_key in _SUBMODULE_CACHE:
        return _SUBMODULE_CACHE[cache_key]
    result = _submodules_of_quotient_uncached(field, ylat)
    _SUBMODULE_CACHE[cache_key] = result
    return result


def _submodules_of_quotient_uncached(field, ylat):
    q = field.q
    diag = ylat.diag
    pos = _basis_positions(diag)
    dim = len(pos)
    if dim == 0:
        return [[]]
    posindex = {p: idx for idx, p in enumerate(pos)}

    # the t-action matrix on the monomial basis
    tcols = []
    for (i, j) in pos:
        if j + 1 < diag[i]:
            col = [0] * dim
            col[posindex[(i, j + 1)]] = 1
        else:
            vec = [LaurentSeries.zero(field)] * i + \
                  [LaurentSeries.t_power(field, diag[i])] + \
                  [LaurentSeries.zero(field)] * (ylat.n - i - 1)
            red = _reduce_vector(field, ylat, tuple(vec))
            col = _vector_to_coords(field, diag, red)
        tcols.append(col)

    def t_apply(vec):
        out = [0] * dim
        for idx, c in enumerate(vec):
            if c:
                col = tcols[idx]
                for r in range(dim):
                    if col[r]:
                        out[r] = field.add(out[r], field.mul(c, col[r]))
        return tuple(out)

    def rref(vectors):
        rows = [list(v) for v in vectors if any(v)]
        pivots = []
        lead = 0
        r = 0
        while r < len(rows) and lead < dim:
            piv = None
            for rr in range(r, len(rows)):
                if rows[rr][lead]:
                    piv = rr
                    break
            if piv is None:
                lead += 1
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            inv = field.inv(rows[r][lead])
            rows[r] = [field.mul(inv, x) for x in rows[r]]
            for rr in range(len(rows)):
                if rr != r and rows[rr][lead]:
                    c = rows[rr][lead]
                    rows[rr] = [field.sub(x, field.mul(c, y))
                                for x, y in zip(rows[rr], rows[r])]
            pivots.append(lead)
            lead += 1
            r += 1
        rows = [tuple(x) for x in rows if any(x)]
        return tuple(sorted(rows, reverse=True))

    def span_elements(basis_rows):
        acc = {(0,) * dim}
        for row in basis_rows:
            new = set()
            cur = (0,) * dim
            mult = row
            for _ in range(q - 1):
                cur = tuple(field.add(a, b) for a, b in zip(cur, mult))
                for e in acc:
                    new.add(tuple(field.add(a, b) for a, b in zip(e, cur)))
            acc |= new
        return acc

    # cyclic submodules: t-closure of single vectors
    all_vecs = [()]
    def gen_vecs(prefix):
        if len(prefix) == dim:
            yield tuple(prefix)
            return
        for c in range(q):
            yield from gen_vecs(prefix + [c])
    cyclics = {}
    for vec in gen_vecs([]):
        if not any(vec):
            continue
        orbit = [vec]
        x = t_apply(vec)
        while any(x) and len(orbit) <= dim:
            orbit.append(x)
            x = t_apply(x)
        key = rref(orbit)
        if key not in cyclics:
            cyclics[key] = key
    # every submodule is a join of cyclic ones: BFS over joins
    zero_key = ()
    found = {zero_key: []}
    frontier = [zero_key]
    while frontier:
        nxt = []
        for skey in frontier:
            for ckey in cyclics:
                joined = rref(list(skey) + list(ckey))
                if joined not in found:
                    found[joined] = list(joined)
                    nxt.append(joined)
        frontier = nxt
    return [list(k) for k in sorted(found)]


def _vector_to_coords(field, diag, vec):
    coords = []
    for (i, j) in _basis_positions(diag):
        e = vec[i]
        c = 0
        if e.coeffs and e.val <= j < e.val + len(e.coeffs):
            c = e.coeffs[j - e.val]
        coords.append(c)
    return coords
