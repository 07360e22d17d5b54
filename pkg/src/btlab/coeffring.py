"""Exact scalar arithmetic: finite fields F_{p^k} and truncated Laurent
series over them.

The local field is modeled as F_q((t)) in equal characteristic: every
scalar is a Laurent series with an explicit valuation and an explicit
precision (the series is known modulo t^prec).  Operations that cannot
certify their result raise PrecisionExhausted instead of approximating.

Field elements are encoded as integers in [0, p^k): the element
sum_i c_i * a^i (a = image of x in F_p[x]/(modulus)) is encoded as
sum_i c_i * p^i.  This keeps series coefficients hashable and cheap and
lets the compiled kernel work on plain integer grids.
"""

from fractions import Fraction

from .errors import DivisionByZero, FieldMismatch, PrecisionExhausted

# Finite sentinel for "exact" precision; kept as an int so precision
# arithmetic, JSON and the compiled kernel all stay integer-only.
INF_PREC = 2 ** 30

# Precision used when inverting an exact non-monomial series and no
# explicit precision is requested.
DEFAULT_INV_PREC = 32


def prec_add(p, k):
    """p + k respecting the INF_PREC sentinel (exact stays exact)."""
    return INF_PREC if p >= INF_PREC else p + k


# ---------------------------------------------------------------------------
# polynomial helpers over F_p (coefficient tuples, low degree first)
# ---------------------------------------------------------------------------

def _poly_trim(c):
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def _poly_mulmod(a, b, mod, p):
    """a*b reduced modulo the monic polynomial mod, over F_p."""
    k = len(mod) - 1
    res = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    # reduce: subtract multiples of mod
    for d in range(len(res) - 1, k - 1, -1):
        c = res[d]
        if c:
            res[d] = 0
            for j in range(k):
                res[d - k + j] = (res[d - k + j] - c * mod[j]) % p
    return _poly_trim(res)


def _code_to_poly(code, p):
    c = []
    while code:
        code, r = divmod(code, p)
        c.append(r)
    return tuple(c)


def _poly_to_code(c, p):
    code = 0
    for d in reversed(c):
        code = code * p + d
    return code


def find_irreducible(p, k):
    """Lexicographically smallest monic irreducible polynomial of degree k
    over F_p, as a coefficient tuple (c_0, ..., c_{k-1}, 1).

    Lexicographic order is on the coefficient word (c_{k-1}, ..., c_0),
    i.e. the order in which the polynomial is normally written down.
    Deterministic: the same polynomial on every run.
    """
    if k < 1:
        raise ValueError("degree must be >= 1")
    if k == 1:
        return (0, 1)  # the polynomial x
    for word in range(p ** k):
        # word digits, most significant = coefficient of x^{k-1}
        digits = []
        w = word
        for _ in range(k):
            digits.append(w % p)
            w //= p
        # digits[0] = c_0 (least significant of the word ordering below)
        # build so that iteration order is lex on (c_{k-1}, ..., c_0):
        c = tuple(digits) + (1,)
        if _is_irreducible(c, p):
            return c
    raise AssertionError("unreachable: irreducible polynomial always exists")


def _is_irreducible(poly, p):
    """Trial division by every monic polynomial of degree <= deg/2."""
    k = len(poly) - 1
    if poly[0] == 0:  # divisible by x
        return k == 1
    for d in range(1, k // 2 + 1):
        for word in range(p ** d):
            div = []
            w = word
            for _ in range(d):
                div.append(w % p)
                w //= p
            div.append(1)
            if not _poly_mod(poly, tuple(div), p):
                return False
    return True


def _poly_mod(a, b, p):
    """Remainder of a by monic b over F_p."""
    r = list(a)
    db = len(b) - 1
    for d in range(len(r) - 1, db - 1, -1):
        c = r[d]
        if c:
            r[d] = 0
            for j in range(db):
                r[d - db + j] = (r[d - db + j] - c * b[j]) % p
    return _poly_trim(r)


# ---------------------------------------------------------------------------
# finite fields
# ---------------------------------------------------------------------------

_FIELD_CACHE = {}


class FiniteField:
    """The field F_{p^k} realized as F_p[x]/(modulus).

    ``modulus`` defaults to find_irreducible(p, k), which fixes one
    canonical tower of residue fields so that embeddings between them are
    reproducible.
    """

    def __init__(self, p, k, modulus=None):
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise ValueError("p must be prime")
        if modulus is None:
            modulus = find_irreducible(p, k)
        modulus = tuple(m % p for m in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        if k >= 2 and not _is_irreducible(modulus, p):
            raise ValueError("modulus is reducible")
        self.p = p
        self.k = k
        self.q = p ** k
        self.modulus = modulus
        self._init_tables()
        self._embed_cache = {}

    @staticmethod
    def get(p, k):
        """Canonical field F_{p^k} (cached, canonical modulus)."""
        key = (p, k)
        if key not in _FIELD_CACHE:
            _FIELD_CACHE[key] = FiniteField(p, k)
        return _FIELD_CACHE[key]

    def _init_tables(self):
        """Discrete exp/log tables for multiplication and inversion."""
        p, q = self.p, self.q
        # find a multiplicative generator by brute force
        exp = None
        for g in range(1 if q == 2 else 2, q):
            seen = [0] * q
            table = []
            x = 1
            ok = True
            for _ in range(q - 1):
                if seen[x]:
                    ok = False
                    break
                seen[x] = 1
                table.append(x)
                x = self._mul_raw(x, g)
            if ok:
                exp = table
                break
        assert exp is not None
        log = [0] * q
        for i, v in enumerate(exp):
            log[v] = i
        self._exp = exp
        self._log = log

    def _mul_raw(self, a, b):
        pa = _code_to_poly(a, self.p)
        pb = _code_to_poly(b, self.p)
        return _poly_to_code(_poly_mulmod(pa, pb, self.modulus, self.p), self.p)

    # -- arithmetic on raw integer codes ------------------------------------

    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        p = self.p
        res, mult = 0, 1
        while a or b:
            res += ((a + b) % p) * mult
            a //= p
            b //= p
            mult *= p
        return res

    def neg(self, a):
        if self.p == 2:
            return a
        p = self.p
        res, mult = 0, 1
        while a:
            res += ((p - a % p) % p) * mult
            a //= p
            mult *= p
        return res

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0 in F_%d" % self.q)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def pow(self, a, e):
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise DivisionByZero("0 ** negative")
            return 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def frobenius(self, a, q_sub=None):
        """a ** q_sub; default q_sub = p (absolute Frobenius)."""
        return self.pow(a, self.p if q_sub is None else q_sub)

    def degree_over(self, a, q_sub):
        """Degree [F_q_sub(a) : F_q_sub], via the Frobenius orbit size."""
        d = 1
        x = self.pow(a, q_sub)
        while x != a:
            x = self.pow(x, q_sub)
            d += 1
        return d

    def elements(self):
        return range(self.q)

    def embedding_into(self, other):
        """Field embedding F_{p^k} -> F_{p^K} (k | K) as a code table.

        The generator is sent to the lexicographically smallest root of
        our modulus in the target field, so the embedding is canonical.
        """
        if other is self:
            return list(range(self.q))
        if other.p != self.p or other.k % self.k:
            raise FieldMismatch("no embedding F_%d -> F_%d" % (self.q, other.q))
        key = (other.p, other.k, other.modulus)
        if key in self._embed_cache:
            return self._embed_cache[key]
        root = None
        for cand in range(other.q):
            acc, pw = 0, 1
            for c in self.modulus:
                if c:
                    acc = other.add(acc, other.mul(c % other.p, pw))
                pw = other.mul(pw, cand)
            if acc == 0:
                root = cand
                break
        assert root is not None
        table = [0] * self.q
        for code in range(self.q):
            acc, pw = 0, 1
            for c in _code_to_poly(code, self.p):
                if c:
                    acc = other.add(acc, other.mul(c, pw))
                pw = other.mul(pw, root)
            table[code] = acc
        self._embed_cache[key] = table
        return table

    # -- wrapped elements ----------------------------------------------------

    def elem(self, value):
        """Wrap an integer code or a coefficient sequence as an FFElem."""
        if isinstance(value, FFElem):
            if value.parent is not self:
                raise FieldMismatch("element of a different field")
            return value
        if isinstance(value, (list, tuple)):
            code = _poly_to_code(tuple(v % self.p for v in value), self.p)
        else:
            code = int(value)
            if not 0 <= code < self.q:
                code %= self.p  # integers reduce into the prime field
        return FFElem(self, code)

    def zero(self):
        return FFElem(self, 0)

    def one(self):
        return FFElem(self, 1)

    def gen(self):
        return FFElem(self, self.p if self.k > 1 else 1 % self.q)

    def __repr__(self):
        return "FiniteField(%d, %d)" % (self.p, self.k)

    def __eq__(self, other):
        return (isinstance(other, FiniteField)
                and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus))

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))


class FFElem:
    """Element of a FiniteField; thin immutable wrapper around a code."""

    __slots__ = ("parent", "code")

    def __init__(self, parent, code):
        self.parent = parent
        self.code = code

    @property
    def coeffs(self):
        c = _code_to_poly(self.code, self.parent.p)
        return c + (0,) * (self.parent.k - len(c))

    def _check(self, other):
        if not isinstance(other, FFElem):
            other = self.parent.elem(other)
        elif other.parent != self.parent:
            raise FieldMismatch("mixed parent fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FFElem(self.parent, self.parent.add(self.code, other.code))

    __radd__ = __add__

    def __neg__(self):
        return FFElem(self.parent, self.parent.neg(self.code))

    def __sub__(self, other):
        other = self._check(other)
        return FFElem(self.parent, self.parent.sub(self.code, other.code))

    def __mul__(self, other):
        other = self._check(other)
        return FFElem(self.parent, self.parent.mul(self.code, other.code))

    __rmul__ = __mul__

    def inverse(self):
        return FFElem(self.parent, self.parent.inv(self.code))

    def __truediv__(self, other):
        other = self._check(other)
        return self * other.inverse()

    def __pow__(self, e):
        return FFElem(self.parent, self.parent.pow(self.code, e))

    def __bool__(self):
        return self.code != 0

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.parent.elem(other)
        return (isinstance(other, FFElem) and other.parent == self.parent
                and other.code == self.code)

    def __hash__(self):
        return hash((self.parent.q, self.code))

    def __repr__(self):
        return ff_code_str(self.parent, self.code)


def ff_code_str(field, code):
    """Element as a polynomial in the fixed generator 'a' ('2*a + 1' style)."""
    if code == 0:
        return "0"
    terms = []
    for i, c in enumerate(_code_to_poly(code, field.p)):
        if not c:
            continue
        if i == 0:
            terms.append(str(c))
        elif i == 1:
            terms.append("a" if c == 1 else "%d*a" % c)
        else:
            terms.append("a^%d" % i if c == 1 else "%d*a^%d" % (c, i))
    return " + ".join(terms)


def ff_parse(field, text):
    """Inverse of ff_code_str; returns the integer code."""
    text = text.strip()
    code = 0
    for term in text.split("+"):
        term = term.strip()
        if not term:
            continue
        if "a" in term:
            if "*" in term:
                cs, apart = term.split("*")
                c = int(cs)
            else:
                c, apart = 1, term
            i = int(apart.split("^")[1]) if "^" in apart else 1
        else:
            c, i = int(term), 0
        code = field.add(code, field.mul(c % field.p, field.pow(field.p, i) if field.k > 1 else (1 if i == 0 else 0)))
    return code


# ---------------------------------------------------------------------------
# Laurent series
# ---------------------------------------------------------------------------

class LaurentSeries:
    """Truncated Laurent series over a finite field.

    ``coeffs`` holds raw field codes starting at exponent ``val``; the
    leading and trailing entries are nonzero.  ``prec`` means: the series
    is known modulo t^prec.  A series with empty coeffs is zero modulo
    t^prec; it is *exactly* zero iff prec == INF_PREC.
    """

    __slots__ = ("field", "val", "coeffs", "prec")

    def __init__(self, field, val, coeffs, prec=INF_PREC):
        prec = min(prec, INF_PREC)
        coeffs = tuple(coeffs)
        # strip leading zeros (bumping val) and trailing zeros
        i = 0
        while i < len(coeffs) and coeffs[i] == 0:
            i += 1
        j = len(coeffs)
        while j > i and coeffs[j - 1] == 0:
            j -= 1
        coeffs = coeffs[i:j]
        val = val + i
        # drop coefficients at or beyond the precision
        if coeffs and val + len(coeffs) > prec:
            keep = max(0, prec - val)
            coeffs = _poly_trim(coeffs[:keep])
        if not coeffs:
            val = prec
        self.field = field
        self.val = val
        self.coeffs = coeffs
        self.prec = prec

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def zero(field, prec=INF_PREC):
        return LaurentSeries(field, prec, (), prec)

    @staticmethod
    def one(field):
        return LaurentSeries(field, 0, (1,))

    @staticmethod
    def t_power(field, k):
        return LaurentSeries(field, k, (1,))

    @staticmethod
    def from_code(field, code, val=0):
        """code * t^val, exact."""
        return LaurentSeries(field, val, (code,))

    @staticmethod
    def from_int(field, n):
        return LaurentSeries(field, 0, (n % field.p,))

    # -- predicates -------------------------------------------------------------

    def is_zero(self):
        """Zero to the available precision."""
        return not self.coeffs

    def is_exact_zero(self):
        return not self.coeffs and self.prec >= INF_PREC

    def is_exact(self):
        return self.prec >= INF_PREC

    def is_monomial(self):
        return len(self.coeffs) == 1

    def valuation(self):
        if self.coeffs:
            return self.val
        if self.prec >= INF_PREC:
            raise DivisionByZero("valuation of the zero series")
        raise PrecisionExhausted(
            "series is 0 mod t^%d; valuation undetermined" % self.prec)

    def leading_code(self):
        self.valuation()
        return self.coeffs[0]

    def coeff_code(self, i):
        """Coefficient of t^i (raw code); PrecisionExhausted beyond prec."""
        if i >= self.prec:
            raise PrecisionExhausted("coefficient of t^%d unknown (prec %d)" % (i, self.prec))
        if i < self.val or i >= self.val + len(self.coeffs):
            return 0
        return self.coeffs[i - self.val]

    # -- arithmetic ---------------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, LaurentSeries):
            raise TypeError("expected LaurentSeries")
        if other.field != self.field:
            raise FieldMismatch("mixed coefficient fields")

    def __add__(self, other):
        self._check(other)
        prec = min(self.prec, other.prec)
        if not self.coeffs:
            return LaurentSeries(self.field, other.val, other.coeffs, prec)
        if not other.coeffs:
            return LaurentSeries(self.field, self.val, self.coeffs, prec)
        lo = min(self.val, other.val)
        hi = max(self.val + len(self.coeffs), other.val + len(other.coeffs))
        F = self.field
        out = [0] * (hi - lo)
        for i, c in enumerate(self.coeffs):
            out[self.val - lo + i] = c
        for i, c in enumerate(other.coeffs):
            j = other.val - lo + i
            out[j] = F.add(out[j], c)
        return LaurentSeries(F, lo, out, prec)

    def __neg__(self):
        F = self.field
        return LaurentSeries(F, self.val, tuple(F.neg(c) for c in self.coeffs), self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        F = self.field
        if not self.coeffs or not other.coeffs:
            # prec of x*y where one factor is (0 mod t^p): p + val(other)
            if not self.coeffs and not other.coeffs:
                prec = min(prec_add(self.prec, other.prec), INF_PREC)
            elif not self.coeffs:
                prec = prec_add(self.prec, other.val)
            else:
                prec = prec_add(other.prec, self.val)
            return LaurentSeries.zero(F, prec)
        prec = min(prec_add(self.prec, other.val), prec_add(other.prec, self.val))
        val = self.val + other.val
        width = min(len(self.coeffs) + len(other.coeffs) - 1, max(0, prec - val))
        out = [0] * width
        for i, a in enumerate(self.coeffs):
            if a and i < width:
                for j, b in enumerate(other.coeffs):
                    if b and i + j < width:
                        out[i + j] = F.add(out[i + j], F.mul(a, b))
        return LaurentSeries(F, val, out, prec)

    def scale_code(self, code):
        """Multiply by a field constant (raw code)."""
        F = self.field
        if code == 0:
            return LaurentSeries.zero(F)
        return LaurentSeries(F, self.val, tuple(F.mul(code, c) for c in self.coeffs), self.prec)

    def shift(self, k):
        """Multiply by t^k."""
        return LaurentSeries(self.field, self.val + k, self.coeffs,
                             prec_add(self.prec, k))

    def truncate(self, prec):
        return LaurentSeries(self.field, self.val, self.coeffs, min(self.prec, prec))

    def inverse(self, prec=None):
        """Multiplicative inverse to the propagated precision.

        The propagation rule gives prec(self) - 2*val(self); for exact
        non-monomial input a finite target is required, defaulting to
        DEFAULT_INV_PREC relative to -val.
        """
        if self.is_exact_zero():
            raise DivisionByZero("inverse of the exact zero series")
        if not self.coeffs:
            raise PrecisionExhausted(
                "inverse of a series that is 0 mod t^%d" % self.prec)
        F = self.field
        v = self.val
        if self.is_monomial():
            out_prec = prec_add(self.prec, -2 * v)
            if prec is not None:
                out_prec = min(out_prec, prec)
            return LaurentSeries(F, -v, (F.inv(self.coeffs[0]),), out_prec)
        rule = prec_add(self.prec, -2 * v)
        out_prec = min(rule, prec if prec is not None else
                       (DEFAULT_INV_PREC - v if rule >= INF_PREC else rule))
        if out_prec <= -v:
            raise PrecisionExhausted("no certified terms in the inverse")
        # invert the unit part u = sum self.coeffs[i] t^i, then shift
        width = out_prec + v  # number of unit-part coefficients needed
        u = self.coeffs
        c0inv = F.inv(u[0])
        out = [0] * width
        out[0] = c0inv
        for m in range(1, width):
            acc = 0
            for i in range(1, min(m, len(u) - 1) + 1):
                acc = F.add(acc, F.mul(u[i], out[m - i]))
            out[m] = F.neg(F.mul(c0inv, acc))
        return LaurentSeries(F, -v, out, out_prec)

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = LaurentSeries.one(self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    # -- comparison / hashing -----------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, LaurentSeries) and self.field == other.field
                and self.val == other.val and self.coeffs == other.coeffs
                and self.prec == other.prec)

    def __hash__(self):
        return hash((self.val, self.coeffs, self.prec))

    def same_mod_prec(self, other):
        """Equality of the known parts, up to the common precision."""
        self._check(other)
        stored_end = max(self.val + len(self.coeffs) if self.coeffs else 0,
                         other.val + len(other.coeffs) if other.coeffs else 0)
        prec = min(self.prec, other.prec, stored_end)
        lo = min(self.val if self.coeffs else prec,
                 other.val if other.coeffs else prec, prec)
        for i in range(lo, prec):
            a = self.coeffs[i - self.val] if self.val <= i < self.val + len(self.coeffs) else 0
            b = other.coeffs[i - other.val] if other.val <= i < other.val + len(other.coeffs) else 0
            if a != b:
                return False
        return True

    def __repr__(self):
        return series_str(self)


def series_str(s):
    """Canonical text encoding: "t^v*(c0 + c1*t + ...) + O(t^prec)".

    The O-term is omitted for exact series; coefficients are printed as
    polynomials in the fixed generator 'a' and parenthesized when composite.
    """
    F = s.field
    if not s.coeffs:
        return "0" if s.is_exact_zero() else "0 + O(t^%d)" % s.prec
    parts = []
    for i, c in enumerate(s.coeffs):
        if c == 0:
            continue
        cs = ff_code_str(F, c)
        if " + " in cs or "*" in cs:
            cs = "(%s)" % cs
        if i == 0:
            parts.append(cs)
        else:
            ts = "t" if i == 1 else "t^%d" % i
            parts.append(ts if cs == "1" else "%s*%s" % (cs, ts))
    body = " + ".join(parts)
    out = "t^%d*(%s)" % (s.val, body) if s.val else "(%s)" % body
    if not s.is_exact():
        out += " + O(t^%d)" % s.prec
    return out


def series_parse(field, text):
    """Inverse of series_str."""
    text = text.strip()
    prec = INF_PREC
    if "O(" in text:
        main, otail = text.split("+ O(", 1)
        otail = otail.rstrip(") ")
        prec = int(otail[2:]) if otail.startswith("t^") else (1 if otail == "t" else int(otail))
        text = main.strip()
    if text == "0" or text == "":
        return LaurentSeries.zero(field, prec)
    val = 0
    if text.startswith("t^"):
        head, text = text.split("*", 1)
        val = int(head[2:])
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    coeffs = {}
    for term in _split_top_level(body):
        term = term.strip()
        cs, exp = term, 0
        # split off a trailing t-power if present
        if term.endswith("t"):
            cs, exp = term[:-1].rstrip("* "), 1
        elif "t^" in term:
            cs, tail = term.rsplit("t^", 1)
            cs = cs.rstrip("* ")
            exp = int(tail)
        if cs.startswith("(") and cs.endswith(")"):
            cs = cs[1:-1]
        code = ff_parse(field, cs) if cs else 1
        coeffs[exp] = field.add(coeffs.get(exp, 0), code)
    if not coeffs:
        return LaurentSeries.zero(field, prec)
    top = max(coeffs)
    arr = [coeffs.get(i, 0) for i in range(top + 1)]
    return LaurentSeries(field, val, arr, prec)


def _split_top_level(text):
    """Split on ' + ' outside parentheses."""
    parts, depth, cur = [], 0, []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and text.startswith(" + ", i):
            parts.append("".join(cur))
            cur = []
            i += 3
            continue
        cur.append(ch)
        i += 1
    parts.append("".join(cur))
    return parts


# ---------------------------------------------------------------------------
# spec-level dispatchers (CLI surface)
# ---------------------------------------------------------------------------

def ff_arith(a, b, kind):
    """Finite-field arithmetic dispatcher: kind in {add, mul, inv, pow}."""
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    if kind == "inv":
        return a.inverse()
    if kind == "pow":
        return a ** b
    raise ValueError("unknown kind %r" % kind)


def laurent_arith(x, y, kind, prec=None):
    """Laurent arithmetic dispatcher: kind in {add, mul, inv, val}."""
    if kind == "add":
        return x + y
    if kind == "mul":
        return x * y
    if kind == "inv":
        return x.inverse(prec)
    if kind == "val":
        return x.valuation()
    raise ValueError("unknown kind %r" % kind)
