"""Group elements acting on the building: normalizer decomposition,
orbit exploration through finite congruence quotients, minimal elliptic
elements, fixed-simplex scans, and the Lefschetz / Euler-Poincare
bookkeeping.

Trace values of the coefficient representations are oracle inputs; the
engine computes supports, signs, degrees and volume weights exactly.
"""

from fractions import Fraction

from .building import (SimplexX, transform_lattice, transform_simplex,
                       apartment_coords)
from .chaincx import orbit_key, relative_volume
from .coeffring import INF_PREC, LaurentSeries
from .errors import (BoundaryContact, GuardExceeded, NotInApartment,
                     NotMaximalField, NotMinimal, NotNormalizing,
                     PrecisionExhausted)
from .latmod import FMatrix, Lattice, matrix_inverse
from .tower import ChainOverFloor, TowerField, j_embed


class GroupElement:
    """Invertible matrix over F with a certified precision."""

    __slots__ = ("matrix", "prec")

    def __init__(self, matrix, prec=None):
        self.matrix = matrix
        if prec is None:
            prec = min((e.prec for r in matrix.rows for e in r), default=INF_PREC)
        self.prec = prec

    @staticmethod
    def companion(field, poly_coeffs):
        """Companion matrix of the monic polynomial x^n + sum c_i x^i,
        coefficients given as LaurentSeries (length n, low degree first)."""
        n = len(poly_coeffs)
        zero = LaurentSeries.zero(field)
        one = LaurentSeries.one(field)
        rows = [[zero] * n for _ in range(n)]
        for i in range(n - 1):
            rows[i + 1][i] = one
        for i in range(n):
            rows[i][n - 1] = -poly_coeffs[i]
        return GroupElement(FMatrix(field, rows))

    def inverse(self, prec=None):
        return GroupElement(matrix_inverse(self.matrix, prec))

    def det_val(self):
        from .latmod import exact_det
        if self.matrix.entries_exact():
            return exact_det(self.matrix).valuation()
        h = Lattice.from_matrix(self.matrix)
        return h.det_val()

    def act_lattice(self, lat):
        return transform_lattice(self.matrix, lat)

    def act_class(self, lat):
        return self.act_lattice(lat).class_normalize()

    def act_simplex(self, s):
        return transform_simplex(self.matrix, s)

    def __mul__(self, other):
        return GroupElement(self.matrix * other.matrix)

    def __repr__(self):
        return "GroupElement(n=%d)" % self.matrix.nrows


class EllipticElement:
    """Element of a maximal-field tower floor K, given by its s_K-adic
    expansion; acts on F^n through the regular representation."""

    def __init__(self, tower, gamma):
        self.tower = tower
        self.gamma = gamma
        lvl = tower.num_floors
        if tower.n is None:
            tower.n = tower.degree(lvl)
        self.embedded = GroupElement(tower.scalar_matrix(
            lvl, gamma, tower.n // tower.degree(lvl)))
        # sanity: det valuation matches f(K/F) * v_K(gamma) * (dim over K)
        v = gamma.valuation()
        mdim = tower.n // tower.degree(lvl)
        assert self.embedded.det_val() == tower.f_of(lvl) * v * mdim

    @property
    def field_degree(self):
        return self.tower.degree(self.tower.num_floors)

    def __repr__(self):
        return "EllipticElement(deg=%d)" % self.field_degree


def is_minimal(g):
    """Minimality over F of the generator: (i) gcd(v_K(gamma), e(K/F))=1
    and (ii) the residue of t^(-v) gamma^(e) generates the residue
    extension.  Returns (verdict, witness)."""
    tw = g.tower
    lvl = tw.num_floors
    e_k = tw.e_of(lvl)
    f_k = tw.f_of(lvl)
    from math import gcd
    v = g.gamma.valuation()
    witness = {"v": v, "e": e_k, "f": f_k}
    if gcd(v, e_k) != 1:
        witness["reason"] = "gcd(v, e) = %d" % gcd(v, e_k)
        return False, witness
    # varpi_F^{-v} gamma^{e}: valuation 0; its residue must generate
    unit = (g.gamma ** e_k).shift(-v * e_k)
    res = unit.coeff_code(0)
    witness["residue"] = res
    if res == 0:
        raise PrecisionExhausted("unit residue undetermined")
    deg = tw.residue_field(lvl).degree_over(res, tw.base_field.q)
    witness["residue_degree"] = deg
    if deg != f_k:
        witness["reason"] = "residue generates a degree-%d subfield, need %d" % (deg, f_k)
        return False, witness
    return True, witness


def fixed_point_chain(g):
    """The unique o_K-stable chain for a minimal maximal-field element:
    the restriction of {s_K^j o_K}; period e(K/F), steps f(K/F).
    Returns (chain over F, simplex)."""
    tw = g.tower
    lvl = tw.num_floors
    cf = ChainOverFloor.standard(tw, lvl, (1,))
    return j_embed(tw, cf)


# ---------------------------------------------------------------------------
# normalizer decomposition
# ---------------------------------------------------------------------------

def normalizer_decompose(g, cf, tw=None):
    """Split g = z * u with z a tower-scalar power s_E^c' and u fixing
    every lattice of the chain underlying cf.

    g must normalize the base chain of cf with a shift divisible by the
    floor period (i.e. lie in s_E^Z * U(A)); otherwise NotNormalizing.
    Returns ((c', z matrix), u matrix)."""
    tw = tw or cf.tower
    lvl = cf.floor
    chain_f, _ = j_embed(tw, cf)
    lats = [chain_f.lattice(l) for l in range(chain_f.period)]
    e_a = chain_f.period
    n = chain_f.n
    g0 = g.act_lattice(lats[0])
    # locate g L_0 within the chain via determinant valuations
    shift = None
    base_vals = [lats[l].det_val() for l in range(e_a)]
    target = g0.det_val()
    for l in range(e_a):
        diff = target - base_vals[l]
        if diff % n == 0:
            if lats[l].scale(diff // n) == g0:
                shift = l + (diff // n) * e_a
            break
    if shift is None:
        raise NotNormalizing("g does not map L_0 into the chain")
    for l in range(1, e_a):
        if g.act_lattice(lats[l]) != chain_f.lattice(l + shift):
            raise NotNormalizing("g does not shift the chain uniformly")
    e_b = cf.chain.period
    if shift % e_b:
        raise NotNormalizing(
            "chain shift %d is not a power of the floor uniformizer" % shift)
    cpow = shift // e_b
    mdim = cf.chain.n
    s_pow = LaurentSeries.t_power(tw.residue_field(lvl), cpow)
    z = tw.scalar_matrix(lvl, s_pow, mdim)
    zinv = tw.scalar_matrix(lvl, LaurentSeries.t_power(tw.residue_field(lvl), -cpow), mdim)
    u = zinv * g.matrix
    ug = GroupElement(u)
    for l in range(e_a):
        if ug.act_lattice(lats[l]) != lats[l]:
            raise NotNormalizing("unit part fails to fix the chain")
    return (cpow, GroupElement(z)), ug


# ---------------------------------------------------------------------------
# orbits through congruence quotients
# ---------------------------------------------------------------------------

def parahoric_generators(chain, prec):
    """Standard generator set for the parahoric of a standard-form chain
    modulo the principal congruence subgroup of depth `prec`: elementary
    unipotents at every allowed level plus diagonal units."""
    field = chain.field
    n = chain.n
    d = chain.d_sequence()
    blocks = []
    b = 0
    for k, dk in enumerate(d):
        blocks.extend([k] * dk)
        b += dk
    gens = []
    one = LaurentSeries.one(field)
    zero = LaurentSeries.zero(field)

    def elem(i, j, series):
        rows = [[one if r == c else zero for c in range(n)] for r in range(n)]
        rows[i][j] = series
        return GroupElement(FMatrix(field, rows))

    # standard chains t E_k + F_k give block-lower-triangular orders:
    # entry (i, j) is t-divisible exactly when block(i) < block(j)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            lvl0 = 0 if blocks[i] >= blocks[j] else 1
            for v in range(lvl0, prec):
                for code in range(1, field.q):
                    gens.append(elem(i, j, LaurentSeries.from_code(field, code, v)))
    for i in range(n):
        for code in range(2, field.q):
            rows = [[one if r == c else zero for c in range(n)] for r in range(n)]
            rows[i][i] = LaurentSeries.from_code(field, code, 0)
            gens.append(GroupElement(FMatrix(field, rows)))
        for v in range(1, prec):
            for code in range(1, field.q):
                rows = [[one if r == c else zero for c in range(n)] for r in range(n)]
                rows[i][i] = one + LaurentSeries.from_code(field, code, v)
                gens.append(GroupElement(FMatrix(field, rows)))
    return gens


def orbit_bfs(generators, s, prec=None, guard=20000):
    """BFS closure of {s} under the generators, with canonical
    renormalization; GuardExceeded beyond `guard` simplices."""
    seen = {s.key(): s}
    frontier = [s]
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = g.act_simplex(x)
                if y.key() not in seen:
                    seen[y.key()] = y
                    nxt.append(y)
                    if len(seen) > guard:
                        raise GuardExceeded("orbit exceeds %d simplices" % guard)
        frontier = nxt
    return sorted(seen.values(), key=lambda x: x.key())


def orbit_apartment_intersection(orbit, basis):
    """Members of the orbit all of whose classes are diagonal in the
    given basis."""
    out = []
    for s in orbit:
        try:
            apartment_coords(s, basis)
        except NotInApartment:
            continue
        out.append(s)
    return out


# ---------------------------------------------------------------------------
# fixed simplices
# ---------------------------------------------------------------------------

def fixed_simplices(g, region, cycle_guard=4000):
    """All simplices of the region globally fixed by g, with the
    dimension of the fixed face and the permutation sign.

    Returns a list of (simplex, dim_fixed_face, eps) sorted by encoding;
    eps is computed both as the sign of the induced vertex permutation
    and as (-1)^(dim sigma - dim sigma(h)), and the two must agree.
    """
    reps = region.vertex_reps
    image = {}
    for key, v in reps.items():
        w = g.act_class(v)
        image[key] = w.key() if w.key() in reps else None
    # cycles of the partial map
    color = {}
    cycles = []
    for key in reps:
        if key in color:
            continue
        path = []
        pos = {}
        cur = key
        while cur is not None and cur not in color and cur not in pos:
            pos[cur] = len(path)
            path.append(cur)
            cur = image[cur]
        if cur is not None and cur in pos:
            cycles.append(path[pos[cur]:])
        for k in path:
            color[k] = True
    if len(cycles) > cycle_guard:
        raise GuardExceeded("too many vertex cycles (%d)" % len(cycles))
    # keep cycles whose own vertex set forms a simplex
    chain_cycles = []
    for cyc in cycles:
        try:
            s = SimplexX([reps[k] for k in cyc])
            if len(s.classes) != len(cyc):
                continue
            s.to_chain()
        except Exception:
            continue
        chain_cycles.append((cyc, s))
    # stable simplices are unions of cycles that form a chain
    found = []

    def compatible(sim_a, sim_b):
        try:
            s = SimplexX(list(sim_a.classes) + list(sim_b.classes))
            if len(s.classes) != len(sim_a.classes) + len(sim_b.classes):
                return None
            s.to_chain()
            return s
        except Exception:
            return None

    def extend(start, union_simplex, members):
        found.append((union_simplex, members))
        for j in range(start, len(chain_cycles)):
            cyc, s = chain_cycles[j]
            u = compatible(union_simplex, s)
            if u is not None:
                extend(j + 1, u, members + [j])

    for i, (cyc, s) in enumerate(chain_cycles):
        extend(i + 1, s, [i])
    out = []
    for s, members in found:
        if region.graded is not None and not region.full_on_vertices:
            if not region.contains(s):
                continue
        perm = {}
        for j in members:
            cyc = chain_cycles[j][0]
            for idx, k in enumerate(cyc):
                perm[k] = cyc[(idx + 1) % len(cyc)]
        keys = [v.key() for v in s.classes]
        pi = [keys.index(perm[k]) for k in keys]
        norbits = len(members)
        dim_fixed = norbits - 1
        eps_perm = _perm_sign(pi)
        eps_dim = (-1) ** (s.dim - dim_fixed)
        assert eps_perm == eps_dim
        out.append((s, dim_fixed, eps_perm))
    out.sort(key=lambda t: t[0].key())
    return out


def _perm_sign(pi):
    seen = [False] * len(pi)
    sign = 1
    for i in range(len(pi)):
        if seen[i]:
            continue
        j, ln = i, 0
        while not seen[j]:
            seen[j] = True
            j = pi[j]
            ln += 1
        if ln % 2 == 0:
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# trace oracles
# ---------------------------------------------------------------------------

class TraceOracle:
    """Evaluation interface (orbit key, conjugacy datum) -> value.
    Values of equal conjugacy data must agree; the engine only ever
    calls with canonical data."""

    def __init__(self, fn, name="oracle", serial=False):
        self.fn = fn
        self.name = name
        self.serial = serial

    def __call__(self, key, datum):
        return self.fn(key, datum)


def dimension_oracle(cs):
    """Trace oracle returning the coefficient dimension (the value of the
    character at the identity)."""
    return TraceOracle(lambda key, datum: cs._dim_of(key), name="dim")


class FormalSum:
    """Formal linear combination over opaque tokens (exact rational
    coefficients); supports + and scalar sign flips."""

    def __init__(self, terms=None):
        self.terms = dict(terms or {})

    def __add__(self, other):
        if isinstance(other, FormalSum):
            out = dict(self.terms)
            for k, v in other.terms.items():
                out[k] = out.get(k, 0) + v
            return FormalSum({k: v for k, v in out.items() if v != 0})
        if other == 0:
            return self
        raise TypeError

    __radd__ = __add__

    def __neg__(self):
        return FormalSum({k: -v for k, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, FormalSum):
            return self.terms == other.terms
        return not self.terms and other == 0

    def __repr__(self):
        return "FormalSum(%r)" % (self.terms,)


def conjugacy_datum(g):
    """Canonical token describing the conjugacy class of an elliptic
    element at the level the trace oracle needs."""
    if isinstance(g, EllipticElement):
        tw = g.tower
        lvl = tw.num_floors
        v = g.gamma.valuation()
        unit = (g.gamma ** tw.e_of(lvl)).shift(-v * tw.e_of(lvl))
        res = unit.coeff_code(0)
        R = tw.residue_field(lvl)
        orbit = []
        x = res
        for _ in range(tw.f_of(lvl)):
            orbit.append(x)
            x = R.pow(x, tw.base_field.q)
        return ("elliptic", tw.e_of(lvl), tw.f_of(lvl), v, min(orbit))
    return ("matrix", g.matrix.nrows, g.det_val())


# ---------------------------------------------------------------------------
# Lefschetz sums
# ---------------------------------------------------------------------------

def lefschetz_minimal(g, l_tower, oracle):
    """Single-term character value at a minimal maximal-field element:
    the oracle value at (orbit key of the fixed chain simplex, conjugacy
    datum) when f(L/F) | f(K/F) and e(L/F) | e(K/F), exact 0 otherwise."""
    ok, witness = is_minimal(g)
    if not ok:
        raise NotMinimal(str(witness))
    tw = g.tower
    lvl = tw.num_floors
    if tw.n not in (None, tw.degree(lvl)):
        raise NotMaximalField("K must be maximal: [K:F] = n")
    f_k, e_k = tw.f_of(lvl), tw.e_of(lvl)
    f_l = l_tower.f_of(l_tower.num_floors)
    e_l = l_tower.e_of(l_tower.num_floors)
    if f_k % f_l or e_k % e_l:
        return 0
    chain, simplex = fixed_point_chain(g)
    assert set(chain.d_sequence()) == {f_k} and chain.period == e_k
    return oracle(orbit_key(simplex), conjugacy_datum(g))


def lefschetz_sum(g, region, cs, datum=None, check_margin=True):
    """Sum over the g-fixed simplices of the region, grouped by the
    dimension q of the fixed face: sum of (-1)^q tr-values.

    The equivalent regrouping through eps_sigma(h) is computed as well
    and must agree.  BoundaryContact if a fixed simplex touches the
    outer shell of a ball region."""
    if cs.trace is None:
        raise ValueError("coefficient system needs a trace oracle")
    if isinstance(g, EllipticElement):
        datum = datum or conjugacy_datum(g)
        act = g.embedded
    else:
        act = g
        datum = datum or conjugacy_datum(g)
    fixed = fixed_simplices(act, region)
    if check_margin and region.vertex_depth is not None and region.radius:
        for s, _q, _e in fixed:
            for v in s.vertices:
                if region.vertex_depth.get(v.key(), region.radius) >= region.radius:
                    raise BoundaryContact("fixed simplex touches the shell")
    total = 0
    total_regrouped = 0
    for s, qdim, eps in fixed:
        val = cs.trace(orbit_key(s), datum)
        sgn = -1 if qdim % 2 else 1
        term = sgn * val if not isinstance(val, FormalSum) else (val if sgn > 0 else -val)
        total = term + total
        sgn2 = eps * ((-1) ** s.dim)
        term2 = sgn2 * val if not isinstance(val, FormalSum) else (val if sgn2 > 0 else -val)
        total_regrouped = term2 + total_regrouped
    assert total == total_regrouped
    return total


# ---------------------------------------------------------------------------
# Euler-Poincare functions
# ---------------------------------------------------------------------------

class EPFunction:
    """Formal Euler-Poincare data: one term per simplex orbit and degree,
    with exact rational weight (-1)^q * (relative inverse volume),
    normalized so the minimal parahoric carries weight +-1."""

    def __init__(self, terms):
        self.terms = tuple(terms)

    def __repr__(self):
        return "EPFunction(%d terms)" % len(self.terms)

    def evaluate(self, g, region, cs):
        """Orbital-integral form at an elliptic element: routes through
        the Lefschetz fixed-point sum over the region."""
        return lefschetz_sum(g, region, cs)


def ep_function_build(orbit_reps, cs, q):
    """Build the formal Euler-Poincare function from orbit representative
    chains with their degrees: terms (orbit key, q, weight, dim, eps tag).

    orbit_reps: list of (chain, degree) pairs."""
    vols = []
    for chain, qdeg in orbit_reps:
        vols.append((chain, qdeg))
    # minimal parahoric = largest-index representative (smallest volume)
    base = vols[0][0]
    for chain, _q in vols[1:]:
        if relative_volume(chain, base, q) < 1:
            base = chain
    terms = []
    for chain, qdeg in vols:
        weight = Fraction((-1) ** qdeg) * relative_volume(base, chain, q)
        simplex = SimplexX.from_chain(chain)
        key = orbit_key(simplex)
        terms.append({
            "orbit": key,
            "q": qdeg,
            "weight": weight,
            "dim": cs._dim_of(key),
            "eps": "sign-character",
        })
    return EPFunction(terms)
