"""Finite truncations of the coefficient chain complexes: labellings,
incidence numbers, boundary matrices over exact rationals, homology, and
the q-combinatorics of parahoric indices and volumes.

Regions are finite and face-closed; nothing here claims anything about
the exactness of the infinite complexes.  Two styles are built, oriented
and labelled, related by the canonical degreewise identification; all
ranks come from exact rational elimination.
"""

from fractions import Fraction

from .errors import (BadComposition, BadPeriod, LabelCollision,
                     MissingTransition, NotAChain, NotStabilized)


# ---------------------------------------------------------------------------
# finite face-closed regions
# ---------------------------------------------------------------------------

class FiniteComplex:
    """Graded lists of simplices, closed under faces, with a region tag.

    ``vertex_depth`` (when present) records BFS depth for ball regions;
    ``full_on_vertices`` marks regions that contain *every* chain among
    their vertices, which lets fixed-point scans avoid materializing
    simplex lists.  A complex may be vertex-only (graded=None) in that
    case.
    """

    def __init__(self, graded, tag="", vertex_reps=None, vertex_depth=None,
                 full_on_vertices=False, radius=None):
        self.graded = graded
        self.tag = tag
        self.full_on_vertices = full_on_vertices
        self.radius = radius
        if vertex_reps is None:
            vertex_reps = {}
            for sims in (graded or {}).values():
                for s in sims:
                    for v in s.vertices:
                        vertex_reps[v.key()] = v
        self.vertex_reps = vertex_reps
        self.vertex_depth = vertex_depth

    @staticmethod
    def from_simplices(simplices, tag="", close=True):
        seen = {}
        work = list(simplices)
        while work:
            s = work.pop()
            if s.key() in seen:
                continue
            seen[s.key()] = s
            if close:
                for f in s.faces(proper=True):
                    if f.key() not in seen:
                        work.append(f)
        graded = {}
        for s in seen.values():
            graded.setdefault(s.dim, []).append(s)
        for q in graded:
            graded[q].sort(key=lambda s: s.key())
        return FiniteComplex(graded, tag=tag)

    @property
    def dim(self):
        return max(self.graded) if self.graded else -1

    def simplices(self, q=None):
        if self.graded is None:
            raise ValueError("vertex-only region; simplices not materialized")
        if q is None:
            return [s for d in sorted(self.graded) for s in self.graded[d]]
        return self.graded.get(q, [])

    def contains(self, s):
        if self.graded is None:
            return all(v.key() in self.vertex_reps for v in s.vertices)
        return any(s.key() == x.key() for x in self.graded.get(s.dim, []))

    def is_face_closed(self):
        keys = {s.key() for q in self.graded for s in self.graded[q]}
        for q in self.graded:
            for s in self.graded[q]:
                for f in s.faces(proper=True):
                    if f.key() not in keys:
                        return False
        return True

    def counts(self):
        return {q: len(self.graded[q]) for q in sorted(self.graded)}


# ---------------------------------------------------------------------------
# coefficient systems
# ---------------------------------------------------------------------------

def orbit_key(simplex):
    """Conjugacy-invariant key: the d-sequence up to cyclic shift plus
    the period (plus tower data for centralizer-building simplices)."""
    if hasattr(simplex, "xl_orbit_key"):
        return simplex.xl_orbit_key()
    chain = simplex.to_chain()
    d = chain.d_sequence()
    e = len(d)
    best = min(tuple(d[(k + s) % e] for k in range(e)) for s in range(e))
    return ("X", chain.n, best, e)


class CoefficientSystem:
    """Dimensions per orbit key, with optional transition and trace
    oracles.  Dimensions are orbit-constant by construction."""

    def __init__(self, dim_of, transition=None, trace=None, name="cs"):
        self._dim_of = dim_of
        self._transition = transition
        self.trace = trace
        self.name = name

    @staticmethod
    def constant(d, name=None):
        return CoefficientSystem(lambda key: d, name=name or ("const:%d" % d))

    def dim(self, simplex):
        return self._dim_of(orbit_key(simplex))

    def transition(self, sigma, tau):
        """Face map V[sigma] -> V[tau] as a rational matrix; identity by
        default when the dimensions agree."""
        ds, dt = self.dim(sigma), self.dim(tau)
        if self._transition is not None:
            return self._transition(sigma, tau)
        if ds != dt:
            raise MissingTransition(
                "dimensions %d -> %d across a face need an oracle" % (ds, dt))
        return [[Fraction(int(i == j)) for j in range(ds)] for i in range(dt)]


# ---------------------------------------------------------------------------
# labellings and incidence numbers
# ---------------------------------------------------------------------------

def det_labelling(modulus):
    """Label a vertex by the t-valuation of the determinant of any
    representative, reduced mod `modulus`.  Invariant under unit-
    determinant elements and injective on every simplex when `modulus`
    matches the ambient structure (n for X itself)."""
    def label(v):
        return v.det_val() % modulus
    return label


def simplex_labels(s, labelling):
    labels = [labelling(v) for v in s.vertices]
    if len(set(labels)) != len(labels):
        raise LabelCollision("labelling not injective on a simplex")
    return labels


def incidence_number(sigma, tau, labelling):
    """[sigma : tau] = (-1)^i where i is the position, in increasing
    label order, of the vertex of sigma missing from tau."""
    labels = simplex_labels(sigma, labelling)
    tau_keys = {v.key() for v in tau.vertices}
    missing = [v for v in sigma.vertices if v.key() not in tau_keys]
    if len(missing) != 1 or len(tau.vertices) != len(sigma.vertices) - 1:
        raise ValueError("tau must be a codimension-1 face of sigma")
    order = sorted(range(len(labels)), key=lambda i: labels[i])
    miss_idx = sigma.vertices.index(missing[0])
    pos = order.index(miss_idx)
    return -1 if pos % 2 else 1


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, ln = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            ln += 1
        if ln % 2 == 0:
            sign = -sign
    return sign


def key_to_label_sign(s, labelling):
    """Sign of the permutation from encoding order to label order of the
    vertices of s: the canonical identification between the oriented and
    the labelled complexes."""
    labels = simplex_labels(s, labelling)
    order = sorted(range(len(labels)), key=lambda i: labels[i])
    return _perm_sign(order)


# ---------------------------------------------------------------------------
# chain complexes
# ---------------------------------------------------------------------------

class ChainComplexData:
    """Per-degree chain dimensions and exact rational boundary matrices
    (boundary[q]: C_q -> C_{q-1}, entries Fraction)."""

    def __init__(self, dims, boundaries, style, labelling, index):
        self.dims = dims
        self.boundaries = boundaries
        self.style = style
        self.labelling = labelling
        self.index = index

    def check_d_squared(self):
        for q in range(2, len(self.dims)):
            a = self.boundaries.get(q)
            b = self.boundaries.get(q - 1)
            if not a or not b:
                continue
            prod = _mat_mul(b, a)
            for row in prod:
                for x in row:
                    if x != 0:
                        return False
        return True


def _mat_mul(a, b):
    if not a or not b:
        return []
    n, m, k = len(a), len(b), len(b[0])
    out = [[Fraction(0)] * k for _ in range(n)]
    for i in range(n):
        ai = a[i]
        for l in range(m):
            c = ai[l]
            if c:
                bl = b[l]
                oi = out[i]
                for j in range(k):
                    if bl[j]:
                        oi[j] += c * bl[j]
    return out


def build_complex(fc, cs, style="labelled", labelling=None):
    """Assemble the boundary matrices of a finite region.

    style "labelled": incidence numbers from the labelling ((X.3.1)-type
    complex).  style "oriented": reference orientations given by the
    canonical encoding order of the vertices ((IX.1)-type complex).  The
    two are related by the canonical degreewise sign identification.
    """
    if labelling is None:
        anyv = next(iter(fc.vertex_reps.values()))
        labelling = det_labelling(anyv.n)
    if style not in ("labelled", "oriented"):
        raise ValueError("style must be labelled or oriented")
    maxq = fc.dim
    index = {}
    dims = []
    offs = []
    for q in range(maxq + 1):
        off = {}
        total = 0
        for s in fc.simplices(q):
            simplex_labels(s, labelling)  # injectivity guard
            off[s.key()] = total
            total += cs.dim(s)
        offs.append(off)
        dims.append(total)
        index[q] = {s.key(): s for s in fc.simplices(q)}
    boundaries = {}
    for q in range(1, maxq + 1):
        rows, cols = dims[q - 1], dims[q]
        mat = [[Fraction(0)] * cols for _ in range(rows)]
        for s in fc.simplices(q):
            scol = offs[q][s.key()]
            dsig = cs.dim(s)
            verts = s.vertices
            labels = [labelling(v) for v in verts]
            label_order = sorted(range(len(verts)), key=lambda i: labels[i])
            for drop in range(len(verts)):
                face = type(s)([verts[i] for i in range(len(verts)) if i != drop])
                fkey = face.key()
                if fkey not in offs[q - 1]:
                    continue  # region not face-closed would be a bug upstream
                frow = offs[q - 1][fkey]
                if style == "labelled":
                    sign = -1 if label_order.index(drop) % 2 else 1
                else:
                    sign = -1 if drop % 2 else 1
                tmat = cs.transition(s, index[q - 1][fkey])
                for i in range(len(tmat)):
                    for j in range(dsig):
                        if tmat[i][j]:
                            mat[frow + i][scol + j] += sign * tmat[i][j]
        boundaries[q] = mat
    return ChainComplexData(dims, boundaries, style, labelling, index)


def compare_styles(fc, cs, labelling=None):
    """Verify the canonical identification between the oriented and the
    labelled complexes: conjugating the oriented boundaries by the
    per-simplex sign of the encoding-to-label vertex permutation must
    reproduce the labelled boundaries exactly.  Returns True/False."""
    cco = build_complex(fc, cs, "oriented", labelling)
    ccl = build_complex(fc, cs, "labelled", labelling)
    labelling = ccl.labelling
    for q in range(1, len(ccl.dims)):
        lab = ccl.boundaries.get(q, [])
        ori = cco.boundaries.get(q, [])
        if not lab and not ori:
            continue
        sq = _sign_diag(fc, cs, q, labelling)
        sq1 = _sign_diag(fc, cs, q - 1, labelling)
        # expected: lab = S_{q-1} @ ori @ S_q
        conj = [[sq1[i] * ori[i][j] * sq[j] for j in range(len(ori[0]))]
                for i in range(len(ori))]
        if conj != lab:
            return False
    return True


def _sign_diag(fc, cs, q, labelling):
    out = []
    for s in fc.simplices(q):
        sign = key_to_label_sign(s, labelling)
        out.extend([sign] * cs.dim(s))
    return out


def _rank(mat):
    """Exact rank over Q.  Integer matrices go through fraction-free
    (Bareiss) elimination with exact divisions; anything else falls back
    to rational Gaussian elimination."""
    if not mat or not mat[0]:
        return 0
    if all(x.denominator == 1 for row in mat for x in row):
        return _rank_bareiss([[int(x) for x in row] for row in mat])
    m = [row[:] for row in mat]
    nr, nc = len(m), len(m[0])
    rank = 0
    row = 0
    for col in range(nc):
        piv = None
        for r in range(row, nr):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = 1 / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for r in range(nr):
            if r != row and m[r][col]:
                c = m[r][col]
                m[r] = [x - c * y for x, y in zip(m[r], m[row])]
        rank += 1
        row += 1
        if row == nr:
            break
    return rank


def _rank_bareiss(m):
    nr, nc = len(m), len(m[0])
    rank = 0
    row = 0
    prev = 1
    for col in range(nc):
        piv = None
        for r in range(row, nr):
            if m[r][col]:
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        pv = m[row][col]
        mrow = m[row]
        for r in range(row + 1, nr):
            mr = m[r]
            c = mr[col]
            # the division by the previous pivot is exact (Bareiss)
            for j in range(col, nc):
                mr[j] = (mr[j] * pv - c * mrow[j]) // prev
        prev = pv
        rank += 1
        row += 1
        if row == nr:
            break
    return rank


def homology_ranks(cc):
    """Exact homology ranks: rank H_q = dim C_q - rank d_q - rank d_{q+1}.
    Verifies d o d = 0 first."""
    if not cc.check_d_squared():
        raise NotAChain("boundary maps do not square to zero")
    nq = len(cc.dims)
    ranks = []
    for q in range(nq):
        rq = _rank(cc.boundaries.get(q, [])) if q >= 1 else 0
        rq1 = _rank(cc.boundaries.get(q + 1, [])) if q + 1 < nq else 0
        ranks.append(cc.dims[q] - rq - rq1)
    return ranks


def euler_characteristic(fc, cs):
    """chi = sum (-1)^q sum_sigma dim V[sigma]."""
    chi = 0
    for q in range(fc.dim + 1):
        for s in fc.simplices(q):
            chi += (-1) ** q * cs.dim(s)
    return chi


# ---------------------------------------------------------------------------
# q-combinatorics
# ---------------------------------------------------------------------------

def gaussian_binomial(n, k, q):
    if k < 0 or k > n:
        return 0
    if q == 1:  # specializes to the ordinary binomial
        from math import comb
        return comb(n, k)
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def q_multinomial(n, parts, q):
    """Number of flags of type `parts` in F_q^n."""
    parts = tuple(parts)
    if any(p < 0 for p in parts) or sum(parts) != n:
        raise BadComposition("parts must be nonnegative and sum to n")
    out = 1
    rest = n
    for p in parts:
        out *= gaussian_binomial(rest, p, q)
        rest -= p
    return out


def gl_order(d, q):
    out = 1
    for i in range(d):
        out *= q ** d - q ** i
    return out


def parahoric_order(d_sequence, q, m):
    """|U(A)/U^(m)(A)| from the radical filtration of the parahoric:
    the reductive quotient contributes prod_k |GL_{d_k}(F_q)| and each
    graded piece P^j/P^{j+1} (1 <= j < m) contributes
    q^(sum_k d_k d_{k+j})."""
    d = tuple(d_sequence)
    if not d or any(x < 1 for x in d):
        raise BadComposition("d-sequence entries must be >= 1")
    if m < 1:
        raise BadPeriod("filtration depth must be >= 1")
    e = len(d)
    out = 1
    for dk in d:
        out *= gl_order(dk, q)
    expo = 0
    for j in range(1, m):
        expo += sum(d[k] * d[(k + j) % e] for k in range(e))
    return out * q ** expo


def congruence_index(d_sequence, q, m):
    """|U(A) / (1 + t^m M_n(o))| for the standard-form parahoric with
    the given step sizes; all parahorics contain the principal
    congruence subgroup, which aligns volume comparisons."""
    d = tuple(d_sequence)
    if not d or any(x < 1 for x in d):
        raise BadComposition("d-sequence entries must be >= 1")
    if m < 1:
        raise BadPeriod("congruence depth must be >= 1")
    n = sum(d)
    out = 1
    for dk in d:
        out *= gl_order(dk, q)
    expo = (n * n - sum(dk * dk for dk in d)) // 2 + n * n * (m - 1)
    return out * q ** expo


def relative_volume(c1, c2, q):
    """vol(U(A_1))/vol(U(A_2)) as an exact rational, via indices over the
    common principal congruence subgroup; stabilization is checked over
    two consecutive depths."""
    if c1.n != c2.n:
        raise BadComposition("chains must share the ambient dimension")
    d1, d2 = c1.d_sequence(), c2.d_sequence()
    m = max(len(d1), len(d2)) + 1
    r1 = Fraction(congruence_index(d1, q, m), congruence_index(d2, q, m))
    r2 = Fraction(congruence_index(d1, q, m + 1), congruence_index(d2, q, m + 1))
    if r1 != r2:
        raise NotStabilized("volume ratio did not stabilize")
    return r1
