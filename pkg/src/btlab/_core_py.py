"""Pure-Python reference kernels.

The compiled extension btlab._core implements exactly the same functions
with the same semantics; btlab.backend picks whichever is available.

Matrix encoding across the kernel boundary (row-major, index e = r*nc + c):
  vals[e]     valuation of entry e (first stored exponent),
  precs[e]    entry known modulo t^precs[e] (INF_PREC when exact),
  coeffdata[offsets[e]:offsets[e+1]]   field codes starting at t^vals[e],
              leading code nonzero (empty slice = zero mod t^prec).

hnf() returns the unique canonical column-Hermite basis over o = F_q[[t]]:
upper triangular, diagonal t^{a_i}, entry (i, j>i) reduced modulo t^{a_i}.
Output entries are certified exact; if the inputs (or the working window
``cap``) cannot certify the form, PrecisionExhausted is raised and the
caller may retry with a larger window.
"""

from .errors import PrecisionExhausted, SingularMatrix

INF_PREC = 2 ** 30


def make_field_ctx(p, k, q, exp_table, log_table):
    """Opaque field context: (p, k, q, exp, log) with plain lists."""
    return (p, k, q, list(exp_table), list(log_table))


def _fmul(ctx, a, b):
    if a == 0 or b == 0:
        return 0
    p, k, q, exp, log = ctx
    return exp[(log[a] + log[b]) % (q - 1)]


def _finv(ctx, a):
    p, k, q, exp, log = ctx
    return exp[(-log[a]) % (q - 1)]


def _fadd(ctx, a, b):
    p = ctx[0]
    if p == 2:
        return a ^ b
    res, mult = 0, 1
    while a or b:
        res += ((a + b) % p) * mult
        a //= p
        b //= p
        mult *= p
    return res


def _fneg(ctx, a):
    p = ctx[0]
    if p == 2:
        return a
    res, mult = 0, 1
    while a:
        res += ((p - a % p) % p) * mult
        a //= p
        mult *= p
    return res


def _padd(p, k):
    """p + k respecting the INF_PREC sentinel."""
    return INF_PREC if p >= INF_PREC else p + k


class _Work:
    """Dense working matrix over the exponent window [lo, lo+cap).

    Per-entry precision ep: the entry is known modulo t^ep.  ep ==
    INF_PREC means the stored window slice *is* the complete (exact)
    polynomial; exactness survives an operation only when the true
    result provably fits inside the window.
    """

    __slots__ = ("ctx", "nr", "nc", "lo", "cap", "hi", "w", "ep")

    def __init__(self, ctx, nr, nc, lo, cap):
        self.ctx = ctx
        self.nr = nr
        self.nc = nc
        self.lo = lo
        self.cap = cap
        self.hi = lo + cap
        self.w = [[0] * cap for _ in range(nr * nc)]
        self.ep = [INF_PREC] * (nr * nc)

    def load(self, vals, precs, coeffdata, offsets):
        for e in range(self.nr * self.nc):
            nstored = offsets[e + 1] - offsets[e]
            if precs[e] >= INF_PREC and vals[e] + nstored <= self.hi:
                prec = INF_PREC
            else:
                prec = min(precs[e], self.hi)
            lostored = vals[e]
            row = self.w[e]
            for i in range(offsets[e], offsets[e + 1]):
                pos = lostored + (i - offsets[e])
                if pos >= min(prec, self.hi):
                    break
                if pos >= self.lo:
                    row[pos - self.lo] = coeffdata[i]
            self.ep[e] = prec

    def entry_val(self, e):
        """First nonzero exponent, or None if zero within precision."""
        row = self.w[e]
        top = min(self.ep[e], self.hi) - self.lo
        for i in range(max(0, top)):
            if row[i]:
                return self.lo + i
        return None

    def entry_topdeg(self, e):
        """Largest stored nonzero exponent (entry assumed nonzero)."""
        row = self.w[e]
        for i in range(self.cap - 1, -1, -1):
            if row[i]:
                return self.lo + i
        return None

    def col_scale(self, c, sval, scoeffs, sprec):
        """column c *= series (sval, scoeffs, sprec)."""
        for r in range(self.nr):
            self._entry_mul(r * self.nc + c, sval, scoeffs, sprec)

    def _mul_prec(self, e, sval, slen, sprec):
        """Precision of entry(e) * series, with exactness if it fits."""
        ev = self.entry_val(e)
        if ev is None:
            return _padd(self.ep[e], sval), None
        rule = min(_padd(sprec, ev), _padd(self.ep[e], sval))
        if rule >= INF_PREC:
            top = self.entry_topdeg(e) + sval + slen - 1
            if top >= self.hi:
                rule = self.hi
        return min(rule, INF_PREC) if rule >= INF_PREC else min(rule, self.hi), ev

    def _entry_mul(self, e, sval, scoeffs, sprec):
        ctx, lo, cap = self.ctx, self.lo, self.cap
        row = self.w[e]
        newprec, ev = self._mul_prec(e, sval, len(scoeffs), sprec)
        if ev is None:
            self.ep[e] = newprec
            return
        stop = min(newprec, self.hi)
        out = [0] * cap
        for i in range(cap):
            a = row[i]
            if not a:
                continue
            base = lo + i + sval
            for j, s in enumerate(scoeffs):
                if not s:
                    continue
                pos = base + j
                if pos >= stop:
                    break
                if pos >= lo:
                    out[pos - lo] = _fadd(ctx, out[pos - lo], _fmul(ctx, a, s))
        self.w[e] = out
        self.ep[e] = newprec

    def col_submul(self, cdst, csrc, sval, scoeffs, sprec):
        """column cdst -= series * column csrc."""
        ctx, lo, cap = self.ctx, self.lo, self.cap
        for r in range(self.nr):
            ed = r * self.nc + cdst
            es = r * self.nc + csrc
            prodprec, sv = self._mul_prec(es, sval, len(scoeffs), sprec)
            newprec = min(self.ep[ed], prodprec)
            dst = self.w[ed]
            if sv is not None:
                src = self.w[es]
                stop = min(newprec, self.hi)
                for i in range(cap):
                    a = src[i]
                    if not a:
                        continue
                    base = lo + i + sval
                    for j, s in enumerate(scoeffs):
                        if not s:
                            continue
                        pos = base + j
                        if pos >= stop:
                            break
                        if pos >= lo:
                            k = pos - lo
                            dst[k] = _fadd(ctx, dst[k], _fneg(ctx, _fmul(ctx, a, s)))
            # coefficients at or beyond the new precision are unknown
            for i in range(max(0, min(newprec, self.hi) - lo), cap):
                dst[i] = 0
            self.ep[ed] = newprec

    def series_at(self, e):
        """Entry as (val, codes, prec); codes start at val."""
        ev = self.entry_val(e)
        prec = self.ep[e]
        if ev is None:
            return (prec, (), prec)
        stop = min(prec, self.hi)
        codes = self.w[e][ev - self.lo:stop - self.lo]
        while codes and codes[-1] == 0:
            codes.pop()
        if not codes:
            return (prec, (), prec)
        return (ev, tuple(codes), prec)

    def inv_series(self, e, length):
        """Inverse of entry e (a certified-nonzero series) to `length`
        unit-part coefficients: returns (val, codes, prec).  Exact only
        for monomials."""
        ctx = self.ctx
        ev = self.entry_val(e)
        row = self.w[e]
        top = min(self.ep[e], self.hi)
        u = row[ev - self.lo:top - self.lo]
        while u and u[-1] == 0:
            u.pop()
        if len(u) == 1 and self.ep[e] >= INF_PREC:
            return (-ev, [_finv(ctx, u[0])], INF_PREC)
        n = max(1, min(length, top - ev))
        c0inv = _finv(ctx, u[0])
        out = [0] * n
        out[0] = c0inv
        for m in range(1, n):
            acc = 0
            for i in range(1, m + 1):
                ui = u[i] if i < len(u) else 0
                if ui and out[m - i]:
                    acc = _fadd(ctx, acc, _fmul(ctx, ui, out[m - i]))
            out[m] = _fneg(ctx, _fmul(ctx, c0inv, acc))
        prec = min(_padd(self.ep[e], -2 * ev), -ev + n)
        return (-ev, out, prec)


def _pack(work, rows, cols, colmap, exact):
    """Pack a submatrix back into the flat encoding."""
    vals, precs, coeffdata, offsets = [], [], [], [0]
    for r in range(rows):
        for c in range(cols):
            e = r * work.nc + colmap[c]
            v, codes, prec = work.series_at(e)
            vals.append(v)
            precs.append(INF_PREC if exact else prec)
            coeffdata.extend(codes)
            offsets.append(len(coeffdata))
    return vals, precs, coeffdata, offsets


def hnf(ctx, nr, nc, vals, precs, coeffdata, offsets, cap, want_u):
    """Canonical column Hermite form over o; see module docstring.

    Returns a dict with keys diag, vals, precs, coeffdata, offsets and,
    when want_u, u_vals/u_precs/u_coeffdata/u_offsets (the unimodular
    column transform with input @ U = H, nc x nc, finite precision).
    """
    lo = 0
    for e in range(nr * nc):
        if offsets[e + 1] > offsets[e]:
            lo = min(lo, vals[e])
    work = _Work(ctx, nr, nc, lo, cap)
    work.load(vals, precs, coeffdata, offsets)
    uwork = None
    if want_u:
        uwork = _Work(ctx, nc, nc, lo, cap)
        for i in range(nc):
            uwork.w[i * nc + i][-lo] = 1

    active = list(range(nc))
    pivot_col_of_row = [None] * nr
    forced_precs = []
    for r in range(nr - 1, -1, -1):
        # pivot: active column with smallest certified valuation in row r
        best, bestval = None, None
        ambiguous_floor = INF_PREC
        for c in active:
            e = r * nc + c
            v = work.entry_val(e)
            if v is None:
                ambiguous_floor = min(ambiguous_floor, work.ep[e])
            elif bestval is None or v < bestval:
                best, bestval = c, v
        if best is None:
            if ambiguous_floor >= INF_PREC:
                raise SingularMatrix("no pivot in row %d" % r)
            raise PrecisionExhausted(
                "row %d is zero modulo t^%d; pivot undetermined" % (r, ambiguous_floor))
        if bestval >= ambiguous_floor:
            raise PrecisionExhausted(
                "pivot valuation %d in row %d not certified below precision %d"
                % (bestval, r, ambiguous_floor))
        # normalize: scale pivot column by the inverse unit so entry = t^a
        epiv = r * nc + best
        iv, icodes, iprec = work.inv_series(epiv, cap)
        work.col_scale(best, iv + bestval, icodes, _padd(iprec, bestval))
        if want_u:
            uwork.col_scale(best, iv + bestval, icodes, _padd(iprec, bestval))
        # force the pivot entry to the exact monomial t^a; the dropped
        # residue lives beyond the tracked precision and is absorbed by
        # the certification check below
        forced_precs.append(work.ep[epiv])
        prow = work.w[epiv]
        for i in range(work.cap):
            prow[i] = 0
        prow[bestval - lo] = 1
        work.ep[epiv] = INF_PREC
        # eliminate row r in the other active columns
        for c in active:
            if c == best:
                continue
            e = r * nc + c
            v = work.entry_val(e)
            if v is None:
                continue
            qval, qcodes, qprec = work.series_at(e)
            # quotient by t^a: exact shift
            work.col_submul(c, best, qval - bestval, qcodes, qprec - bestval)
            if want_u:
                uwork.col_submul(c, best, qval - bestval, qcodes, qprec - bestval)
        # reduce row r of already-fixed pivot columns modulo t^a
        for rr in range(r + 1, nr):
            cfix = pivot_col_of_row[rr]
            e = r * nc + cfix
            v = work.entry_val(e)
            if v is None:
                continue
            qv, qcodes, qprec = work.series_at(e)
            # subtract the part with exponents >= a
            drop = max(0, bestval - qv)
            if drop < len(qcodes):
                tailcodes = qcodes[drop:]
                work.col_submul(cfix, best, qv + drop - bestval, tailcodes, qprec - bestval)
                if want_u:
                    uwork.col_submul(cfix, best, qv + drop - bestval, tailcodes, qprec - bestval)
        active.remove(best)
        pivot_col_of_row[r] = best

    diag = [work.entry_val(r * nc + pivot_col_of_row[r]) for r in range(nr)]
    # certification: residuals dropped below are in t^REQ * (std lattice),
    # which lies inside the lattice when REQ >= sum(a_i) - (n-1)*min(0, lo)
    m0 = min([0] + [vals[e] for e in range(nr * nc) if offsets[e + 1] > offsets[e]])
    req = sum(diag) - (nr - 1) * min(0, m0) + 1
    for ep in forced_precs:
        if ep < req:
            raise PrecisionExhausted(
                "canonical form needs precision %d, pivot had %d" % (req, ep))
    for r in range(nr):
        for c in range(nc):
            e = r * nc + c
            if work.ep[e] < req:
                raise PrecisionExhausted(
                    "canonical form needs precision %d, entry has %d" % (req, work.ep[e]))
    # leftover columns (rectangular input) must be zero within precision
    for c in active:
        for r in range(nr):
            if work.entry_val(r * nc + c) is not None:
                raise SingularMatrix("input columns exceed the lattice rank")
    # assemble H: row-reduced entries live above each pivot column; sort by row
    colmap = [pivot_col_of_row[i] for i in range(nr)]
    h_vals, h_precs, h_data, h_offs = _pack(work, nr, nr, colmap, exact=True)
    out = {
        "diag": diag,
        "vals": h_vals,
        "precs": h_precs,
        "coeffdata": h_data,
        "offsets": h_offs,
        "req": req,
    }
    if want_u:
        perm = colmap + active
        u_vals, u_precs, u_data, u_offs = _pack(uwork, nc, nc, perm, exact=False)
        out["u_vals"] = u_vals
        out["u_precs"] = u_precs
        out["u_coeffdata"] = u_data
        out["u_offsets"] = u_offs
    return out


def mat_mul(ctx, n, m, k, avals, aprecs, adata, aoffs, bvals, bprecs, bdata, boffs, cap):
    """C = A @ B with per-entry precision propagation (A: n x m, B: m x k)."""
    lo = 0
    for e in range(n * m):
        if aoffs[e + 1] > aoffs[e]:
            lo = min(lo, avals[e])
    lob = 0
    for e in range(m * k):
        if boffs[e + 1] > boffs[e]:
            lob = min(lob, bvals[e])
    lo = lo + lob
    hi = lo + cap
    ovals, oprecs, odata, ooffs = [], [], [], [0]
    for i in range(n):
        for j in range(k):
            acc = [0] * (hi - lo)
            prec = INF_PREC
            termbound = lo
            for l in range(m):
                ea = i * m + l
                eb = l * k + j
                alen = aoffs[ea + 1] - aoffs[ea]
                blen = boffs[eb + 1] - boffs[eb]
                av, bv = avals[ea], bvals[eb]
                ap, bp = aprecs[ea], bprecs[eb]
                if alen == 0 and blen == 0:
                    tprec = min(_padd(ap, bp), INF_PREC)
                elif alen == 0:
                    tprec = _padd(ap, bv)
                elif blen == 0:
                    tprec = _padd(bp, av)
                else:
                    tprec = min(_padd(ap, bv), _padd(bp, av))
                    termbound = max(termbound, av + alen + bv + blen - 1)
                prec = min(prec, tprec)
                if alen and blen:
                    for x in range(alen):
                        ca = adata[aoffs[ea] + x]
                        if not ca:
                            continue
                        base = av + x + bv
                        for y in range(blen):
                            cb = bdata[boffs[eb] + y]
                            if not cb:
                                continue
                            pos = base + y
                            if lo <= pos < hi:
                                acc[pos - lo] = _fadd(ctx, acc[pos - lo], _fmul(ctx, ca, cb))
            prec = min(prec, INF_PREC)
            if termbound > hi:
                # window truncation: known coefficients stop at the window
                prec = min(prec, hi)
            if prec < INF_PREC:
                stop = min(hi, prec)
            else:
                stop = hi
            first = None
            for idx in range(max(0, stop - lo)):
                if acc[idx]:
                    first = idx
                    break
            if first is None:
                ovals.append(prec)
                oprecs.append(prec)
            else:
                codes = acc[first:stop - lo]
                while codes and codes[-1] == 0:
                    codes.pop()
                ovals.append(lo + first)
                oprecs.append(prec)
                odata.extend(codes)
            ooffs.append(len(odata))
    return ovals, oprecs, odata, ooffs
