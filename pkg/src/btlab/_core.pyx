# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: same functions and semantics as btlab._core_py.

Hermite reduction over o = F_q[[t]] on dense coefficient windows, plus
matrix products with precision propagation.  Field arithmetic runs on
exp/log tables; coefficients are small nonnegative integer codes.
"""

from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memset

from .errors import PrecisionExhausted, SingularMatrix

cdef long INF_PREC_C = 2 ** 30
INF_PREC = INF_PREC_C


cdef class FieldCtx:
    cdef public int p, k, q
    cdef int *exp
    cdef int *log

    def __cinit__(self, int p, int k, int q, exp_table, log_table):
        self.p = p
        self.k = k
        self.q = q
        self.exp = <int *> malloc(sizeof(int) * (q - 1))
        self.log = <int *> malloc(sizeof(int) * q)
        cdef int i
        for i in range(q - 1):
            self.exp[i] = exp_table[i]
        for i in range(q):
            self.log[i] = log_table[i]

    def __dealloc__(self):
        if self.exp != NULL:
            free(self.exp)
        if self.log != NULL:
            free(self.log)


def make_field_ctx(p, k, q, exp_table, log_table):
    return FieldCtx(p, k, q, list(exp_table), list(log_table))


cdef inline int fmul(FieldCtx ctx, int a, int b):
    if a == 0 or b == 0:
        return 0
    return ctx.exp[(ctx.log[a] + ctx.log[b]) % (ctx.q - 1)]


cdef inline int finv(FieldCtx ctx, int a):
    # keep the operand nonnegative: C % truncates toward zero
    cdef int e = (ctx.q - 1 - ctx.log[a]) % (ctx.q - 1)
    return ctx.exp[e]


cdef inline int fadd(FieldCtx ctx, int a, int b):
    cdef int res, mult, p
    if ctx.p == 2:
        return a ^ b
    p = ctx.p
    res = 0
    mult = 1
    while a or b:
        res += ((a + b) % p) * mult
        a //= p
        b //= p
        mult *= p
    return res


cdef inline int fneg(FieldCtx ctx, int a):
    cdef int res, mult, p
    if ctx.p == 2:
        return a
    p = ctx.p
    res = 0
    mult = 1
    while a:
        res += ((p - a % p) % p) * mult
        a //= p
        mult *= p
    return res


cdef inline long padd(long p, long k):
    return INF_PREC_C if p >= INF_PREC_C else p + k


cdef class Work:
    """Dense working matrix over the exponent window [lo, lo+cap)."""
    cdef FieldCtx ctx
    cdef int nr, nc, cap
    cdef long lo, hi
    cdef int *w
    cdef long *ep

    def __cinit__(self, FieldCtx ctx, int nr, int nc, long lo, int cap):
        self.ctx = ctx
        self.nr = nr
        self.nc = nc
        self.lo = lo
        self.cap = cap
        self.hi = lo + cap
        self.w = <int *> calloc(nr * nc * cap, sizeof(int))
        self.ep = <long *> malloc(sizeof(long) * nr * nc)
        cdef int i
        for i in range(nr * nc):
            self.ep[i] = INF_PREC_C

    def __dealloc__(self):
        if self.w != NULL:
            free(self.w)
        if self.ep != NULL:
            free(self.ep)

    cdef void load(self, vals, precs, coeffdata, offsets):
        cdef int e, i
        cdef long prec, pos, lostored, stop
        for e in range(self.nr * self.nc):
            nstored = offsets[e + 1] - offsets[e]
            if precs[e] >= INF_PREC_C and vals[e] + nstored <= self.hi:
                prec = INF_PREC_C
            else:
                prec = min(precs[e], self.hi)
            lostored = vals[e]
            stop = prec if prec < self.hi else self.hi
            for i in range(offsets[e], offsets[e + 1]):
                pos = lostored + (i - offsets[e])
                if pos >= stop:
                    break
                if pos >= self.lo:
                    self.w[e * self.cap + <int>(pos - self.lo)] = coeffdata[i]
            self.ep[e] = prec

    cdef long entry_val(self, int e):
        """First nonzero exponent, or INF_PREC_C when zero to precision."""
        cdef long top = self.ep[e] if self.ep[e] < self.hi else self.hi
        cdef int i, stop
        stop = <int>(top - self.lo) if top > self.lo else 0
        for i in range(stop):
            if self.w[e * self.cap + i]:
                return self.lo + i
        return INF_PREC_C

    cdef long entry_topdeg(self, int e):
        cdef int i
        for i in range(self.cap - 1, -1, -1):
            if self.w[e * self.cap + i]:
                return self.lo + i
        return INF_PREC_C

    cdef void mul_prec(self, int e, long sval, int slen, long sprec,
                       long *out_prec, long *out_ev):
        cdef long ev = self.entry_val(e)
        cdef long rule, top
        if ev >= INF_PREC_C:
            out_prec[0] = padd(self.ep[e], sval)
            out_ev[0] = INF_PREC_C
            return
        rule = padd(sprec, ev)
        if padd(self.ep[e], sval) < rule:
            rule = padd(self.ep[e], sval)
        if rule >= INF_PREC_C:
            top = self.entry_topdeg(e) + sval + slen - 1
            if top >= self.hi:
                rule = self.hi
        if rule >= INF_PREC_C:
            out_prec[0] = INF_PREC_C
        else:
            out_prec[0] = rule if rule < self.hi else self.hi
        out_ev[0] = ev

    cdef void entry_mul(self, int e, long sval, int *scoeffs, int slen, long sprec):
        cdef long newprec, ev, stop, base, pos
        cdef int i, j, a, s
        self.mul_prec(e, sval, slen, sprec, &newprec, &ev)
        if ev >= INF_PREC_C:
            self.ep[e] = newprec
            return
        stop = newprec if newprec < self.hi else self.hi
        cdef int *out = <int *> calloc(self.cap, sizeof(int))
        cdef int *row = self.w + e * self.cap
        for i in range(self.cap):
            a = row[i]
            if a == 0:
                continue
            base = self.lo + i + sval
            for j in range(slen):
                s = scoeffs[j]
                if s == 0:
                    continue
                pos = base + j
                if pos >= stop:
                    break
                if pos >= self.lo:
                    out[<int>(pos - self.lo)] = fadd(self.ctx, out[<int>(pos - self.lo)],
                                                     fmul(self.ctx, a, s))
        for i in range(self.cap):
            row[i] = out[i]
        free(out)
        self.ep[e] = newprec

    cdef void col_scale(self, int c, long sval, int *scoeffs, int slen, long sprec):
        cdef int r
        for r in range(self.nr):
            self.entry_mul(r * self.nc + c, sval, scoeffs, slen, sprec)

    cdef void col_submul(self, int cdst, int csrc, long sval, int *scoeffs,
                         int slen, long sprec):
        cdef int r, i, j, a, s, kk, ed, es
        cdef long prodprec, sv, newprec, stop, base, pos
        cdef int *src
        cdef int *dst
        for r in range(self.nr):
            ed = r * self.nc + cdst
            es = r * self.nc + csrc
            self.mul_prec(es, sval, slen, sprec, &prodprec, &sv)
            newprec = self.ep[ed] if self.ep[ed] < prodprec else prodprec
            dst = self.w + ed * self.cap
            if sv < INF_PREC_C:
                src = self.w + es * self.cap
                stop = newprec if newprec < self.hi else self.hi
                for i in range(self.cap):
                    a = src[i]
                    if a == 0:
                        continue
                    base = self.lo + i + sval
                    for j in range(slen):
                        s = scoeffs[j]
                        if s == 0:
                            continue
                        pos = base + j
                        if pos >= stop:
                            break
                        if pos >= self.lo:
                            kk = <int>(pos - self.lo)
                            dst[kk] = fadd(self.ctx, dst[kk],
                                           fneg(self.ctx, fmul(self.ctx, a, s)))
            stop = newprec if newprec < self.hi else self.hi
            i = <int>(stop - self.lo) if stop > self.lo else 0
            while i < self.cap:
                dst[i] = 0
                i += 1
            self.ep[ed] = newprec

    cdef series_at(self, int e):
        cdef long ev = self.entry_val(e)
        cdef long prec = self.ep[e]
        cdef long stop
        cdef int i
        if ev >= INF_PREC_C:
            return (prec, (), prec)
        stop = prec if prec < self.hi else self.hi
        codes = []
        for i in range(<int>(ev - self.lo), <int>(stop - self.lo)):
            codes.append(self.w[e * self.cap + i])
        while codes and codes[len(codes) - 1] == 0:
            codes.pop()
        if not codes:
            return (prec, (), prec)
        return (ev, tuple(codes), prec)

    cdef inv_series(self, int e, int length):
        """(val, codes list, prec) of the inverse of a nonzero entry."""
        cdef long ev = self.entry_val(e)
        cdef long top = self.ep[e] if self.ep[e] < self.hi else self.hi
        cdef int *row = self.w + e * self.cap
        cdef int ulen = <int>(top - ev)
        cdef int i, m, n
        # trim trailing zeros of the unit part
        while ulen > 1 and row[<int>(ev - self.lo) + ulen - 1] == 0:
            ulen -= 1
        if ulen == 1 and self.ep[e] >= INF_PREC_C:
            return (-ev, [finv(self.ctx, row[<int>(ev - self.lo)])], INF_PREC_C)
        n = length if length < <int>(top - ev) else <int>(top - ev)
        if n < 1:
            n = 1
        cdef int c0inv = finv(self.ctx, row[<int>(ev - self.lo)])
        out = [0] * n
        out[0] = c0inv
        cdef int acc, ui
        for m in range(1, n):
            acc = 0
            for i in range(1, m + 1):
                ui = row[<int>(ev - self.lo) + i] if i < ulen else 0
                if ui and out[m - i]:
                    acc = fadd(self.ctx, acc, fmul(self.ctx, ui, out[m - i]))
            out[m] = fneg(self.ctx, fmul(self.ctx, c0inv, acc))
        cdef long prec = padd(self.ep[e], -2 * ev)
        if -ev + n < prec:
            prec = -ev + n
        return (-ev, out, prec)


cdef int *_tmp_codes(codes, int *length):
    cdef int n = len(codes)
    cdef int *buf = <int *> malloc(sizeof(int) * (n if n else 1))
    cdef int i
    for i in range(n):
        buf[i] = codes[i]
    length[0] = n
    return buf


def _pack(Work work, int rows, int cols, colmap, bint exact):
    vals, precs, coeffdata, offsets = [], [], [], [0]
    cdef int r, c
    for r in range(rows):
        for c in range(cols):
            v, codes, prec = work.series_at(r * work.nc + colmap[c])
            vals.append(v)
            precs.append(INF_PREC_C if exact else prec)
            coeffdata.extend(codes)
            offsets.append(len(coeffdata))
    return vals, precs, coeffdata, offsets


def hnf(FieldCtx ctx, int nr, int nc, vals, precs, coeffdata, offsets,
        int cap, bint want_u):
    """Canonical column Hermite form over o; mirrors _core_py.hnf."""
    cdef long lo = 0
    cdef int e
    for e in range(nr * nc):
        if offsets[e + 1] > offsets[e] and vals[e] < lo:
            lo = vals[e]
    cdef Work work = Work(ctx, nr, nc, lo, cap)
    work.load(vals, precs, coeffdata, offsets)
    cdef Work uwork = None
    cdef int i
    if want_u:
        uwork = Work(ctx, nc, nc, lo, cap)
        for i in range(nc):
            uwork.w[(i * nc + i) * uwork.cap + <int>(-lo)] = 1
            uwork.ep[i * nc + i] = INF_PREC_C

    active = list(range(nc))
    pivot_col_of_row = [None] * nr
    forced_precs = []
    cdef int r, best, c, epiv
    cdef long bestval, ambiguous_floor, v
    cdef int slen
    cdef int *sbuf
    for r in range(nr - 1, -1, -1):
        best = -1
        bestval = INF_PREC_C
        ambiguous_floor = INF_PREC_C
        for c in active:
            e = r * nc + c
            v = work.entry_val(e)
            if v >= INF_PREC_C:
                if work.ep[e] < ambiguous_floor:
                    ambiguous_floor = work.ep[e]
            elif best < 0 or v < bestval:
                best = c
                bestval = v
        if best < 0:
            if ambiguous_floor >= INF_PREC_C:
                raise SingularMatrix("no pivot in row %d" % r)
            raise PrecisionExhausted(
                "row %d is zero modulo t^%d; pivot undetermined" % (r, ambiguous_floor))
        if bestval >= ambiguous_floor:
            raise PrecisionExhausted(
                "pivot valuation %d in row %d not certified below precision %d"
                % (bestval, r, ambiguous_floor))
        epiv = r * nc + best
        iv, icodes, iprec = work.inv_series(epiv, cap)
        sbuf = _tmp_codes(icodes, &slen)
        work.col_scale(best, iv + bestval, sbuf, slen, padd(iprec, bestval))
        if want_u:
            uwork.col_scale(best, iv + bestval, sbuf, slen, padd(iprec, bestval))
        free(sbuf)
        forced_precs.append(work.ep[epiv])
        memset(work.w + epiv * work.cap, 0, sizeof(int) * work.cap)
        work.w[epiv * work.cap + <int>(bestval - lo)] = 1
        work.ep[epiv] = INF_PREC_C
        for c in active:
            if c == best:
                continue
            e = r * nc + c
            v = work.entry_val(e)
            if v >= INF_PREC_C:
                continue
            qval, qcodes, qprec = work.series_at(e)
            sbuf = _tmp_codes(qcodes, &slen)
            work.col_submul(c, best, qval - bestval, sbuf, slen, qprec - bestval)
            if want_u:
                uwork.col_submul(c, best, qval - bestval, sbuf, slen, qprec - bestval)
            free(sbuf)
        for rr in range(r + 1, nr):
            cfix = pivot_col_of_row[rr]
            e = r * nc + cfix
            v = work.entry_val(e)
            if v >= INF_PREC_C:
                continue
            qval, qcodes, qprec = work.series_at(e)
            drop = bestval - qval
            if drop < 0:
                drop = 0
            if drop < len(qcodes):
                tail = qcodes[drop:]
                sbuf = _tmp_codes(tail, &slen)
                work.col_submul(cfix, best, qval + drop - bestval, sbuf, slen,
                                qprec - bestval)
                if want_u:
                    uwork.col_submul(cfix, best, qval + drop - bestval, sbuf,
                                     slen, qprec - bestval)
                free(sbuf)
        active.remove(best)
        pivot_col_of_row[r] = best

    diag = [work.entry_val(r * nc + pivot_col_of_row[r]) for r in range(nr)]
    cdef long m0 = 0
    for e in range(nr * nc):
        if offsets[e + 1] > offsets[e] and vals[e] < m0:
            m0 = vals[e]
    cdef long req = sum(diag) - (nr - 1) * (m0 if m0 < 0 else 0) + 1
    for ep0 in forced_precs:
        if ep0 < req:
            raise PrecisionExhausted(
                "canonical form needs precision %d, pivot had %d" % (req, ep0))
    for r in range(nr):
        for c in range(nc):
            e = r * nc + c
            if work.ep[e] < req:
                raise PrecisionExhausted(
                    "canonical form needs precision %d, entry has %d" % (req, work.ep[e]))
    for c in active:
        for r in range(nr):
            if work.entry_val(r * nc + c) < INF_PREC_C:
                raise SingularMatrix("input columns exceed the lattice rank")
    colmap = [pivot_col_of_row[i] for i in range(nr)]
    h_vals, h_precs, h_data, h_offs = _pack(work, nr, nr, colmap, True)
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
        u_vals, u_precs, u_data, u_offs = _pack(uwork, nc, nc, perm, False)
        out["u_vals"] = u_vals
        out["u_precs"] = u_precs
        out["u_coeffdata"] = u_data
        out["u_offsets"] = u_offs
    return out


def mat_mul(FieldCtx ctx, int n, int m, int k, avals, aprecs, adata, aoffs,
            bvals, bprecs, bdata, boffs, int cap):
    """C = A @ B with per-entry precision propagation; mirrors
    _core_py.mat_mul."""
    cdef long lo = 0, lob = 0
    cdef int e
    for e in range(n * m):
        if aoffs[e + 1] > aoffs[e] and avals[e] < lo:
            lo = avals[e]
    for e in range(m * k):
        if boffs[e + 1] > boffs[e] and bvals[e] < lob:
            lob = bvals[e]
    lo = lo + lob
    cdef long hi = lo + cap
    cdef int width = cap
    cdef int *acc = <int *> malloc(sizeof(int) * width)
    # flatten inputs once into C buffers
    cdef int atot = len(adata)
    cdef int btot = len(bdata)
    cdef int *adata_c = <int *> malloc(sizeof(int) * (atot if atot else 1))
    cdef int *bdata_c = <int *> malloc(sizeof(int) * (btot if btot else 1))
    cdef int i, j, l, x, y
    for i in range(atot):
        adata_c[i] = adata[i]
    for i in range(btot):
        bdata_c[i] = bdata[i]
    ovals, oprecs, odata, ooffs = [], [], [], [0]
    cdef long prec, termbound, tprec, av, bv, ap, bp, base, pos
    cdef int alen, blen, ea, eb, ca, cb, first, stop_i
    cdef long stop
    for i in range(n):
        for j in range(k):
            memset(acc, 0, sizeof(int) * width)
            prec = INF_PREC_C
            termbound = lo
            for l in range(m):
                ea = i * m + l
                eb = l * k + j
                alen = aoffs[ea + 1] - aoffs[ea]
                blen = boffs[eb + 1] - boffs[eb]
                av = avals[ea]
                bv = bvals[eb]
                ap = aprecs[ea]
                bp = bprecs[eb]
                if alen == 0 and blen == 0:
                    tprec = padd(ap, bp)
                    if tprec > INF_PREC_C:
                        tprec = INF_PREC_C
                elif alen == 0:
                    tprec = padd(ap, bv)
                elif blen == 0:
                    tprec = padd(bp, av)
                else:
                    tprec = padd(ap, bv)
                    if padd(bp, av) < tprec:
                        tprec = padd(bp, av)
                    if av + alen + bv + blen - 1 > termbound:
                        termbound = av + alen + bv + blen - 1
                if tprec < prec:
                    prec = tprec
                if alen and blen:
                    for x in range(alen):
                        ca = adata_c[aoffs[ea] + x]
                        if ca == 0:
                            continue
                        base = av + x + bv
                        for y in range(blen):
                            cb = bdata_c[boffs[eb] + y]
                            if cb == 0:
                                continue
                            pos = base + y
                            if pos >= lo and pos < hi:
                                acc[<int>(pos - lo)] = fadd(
                                    ctx, acc[<int>(pos - lo)], fmul(ctx, ca, cb))
            if prec > INF_PREC_C:
                prec = INF_PREC_C
            if termbound > hi:
                if hi < prec:
                    prec = hi
            stop = prec if prec < hi else hi
            stop_i = <int>(stop - lo) if stop > lo else 0
            first = -1
            for x in range(stop_i):
                if acc[x]:
                    first = x
                    break
            if first < 0:
                ovals.append(prec)
                oprecs.append(prec)
            else:
                codes = []
                for x in range(first, stop_i):
                    codes.append(acc[x])
                while codes and codes[len(codes) - 1] == 0:
                    codes.pop()
                ovals.append(lo + first)
                oprecs.append(prec)
                odata.extend(codes)
            ooffs.append(len(odata))
    free(acc)
    free(adata_c)
    free(bdata_c)
    return ovals, oprecs, odata, ooffs
