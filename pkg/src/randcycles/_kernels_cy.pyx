# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of the pure-Python enumeration kernel.

Mirrors ``_kernels_py.py`` operation for operation (same constants, same
order of floating-point operations) so both backends return bit-identical
results; this one releases the GIL so prefix-partitioned threads run in
parallel.
"""

from libc.math cimport fabs, log, pow
from libc.stdlib cimport free, malloc

BACKEND_NAME = "compiled"

cdef double _SLIVER = 1e-13
cdef double _ROOT_PAD = 1e-12
cdef double _ENDPOINT_TOL = 1e-12
cdef double _BISECT_TOL = 1e-12
cdef double _INV_TOL = 1e-14


cdef inline double _f(int kind, double p1, double p2, double x) nogil:
    if kind == 0:
        return p1 * x + p2
    if x < 0.0:
        x = 0.0
    return x + p1 * pow(x, 1.0 + p2)


cdef inline double _fp(int kind, double p1, double p2, double x) nogil:
    if kind == 0:
        return p1
    if x < 0.0:
        x = 0.0
    return 1.0 + (1.0 + p2) * p1 * pow(x, p2)


cdef inline double _finv(int kind, double p1, double p2, double lo, double hi,
                         double y) nogil:
    cdef double a, b, mid
    cdef int it
    if kind == 0:
        return (y - p2) / p1
    if y <= _f(kind, p1, p2, lo):
        return lo
    if y >= _f(kind, p1, p2, hi):
        return hi
    a = lo
    b = hi
    for it in range(64):
        mid = 0.5 * (a + b)
        if _f(kind, p1, p2, mid) < y:
            a = mid
        else:
            b = mid
        if b - a <= _INV_TOL:
            break
    return 0.5 * (a + b)


cdef inline double _compose(int[:] br_kind, double[:] br_p1, double[:] br_p2,
                            int* sym, int n, double x) nogil:
    cdef double v = x
    cdef int k, s
    for k in range(n):
        s = sym[k]
        v = _f(br_kind[s], br_p1[s], br_p2[s], v)
    return v


cdef inline double _compose_deriv(int[:] br_kind, double[:] br_p1, double[:] br_p2,
                                  int* sym, int n, double x, double* dout) nogil:
    cdef double v = x
    cdef double d = 1.0
    cdef int k, s
    for k in range(n):
        s = sym[k]
        d *= _fp(br_kind[s], br_p1[s], br_p2[s], v)
        v = _f(br_kind[s], br_p1[s], br_p2[s], v)
    dout[0] = d
    return v


def enumerate_candidates(
    double[:] br_lo,
    double[:] br_hi,
    int[:] br_kind,
    double[:] br_p1,
    double[:] br_p2,
    int[:] br_owner,
    unsigned char[:, :] trans,
    int[:] omega,
    int first_symbol,
    int[:, :] words_out,
    double[:] xs_out,
    double[:] logw_out,
    double[:, :] orbit_out,
):
    """See ``_kernels_py.enumerate_candidates``; identical contract."""
    cdef int n = omega.shape[0]
    cdef int n_syms = br_lo.shape[0]
    cdef int found = 0

    cdef int* sym = <int*> malloc(n * sizeof(int))
    cdef int* child = <int*> malloc((n + 1) * sizeof(int))
    cdef double* ilo = <double*> malloc((n + 1) * sizeof(double))
    cdef double* ihi = <double*> malloc((n + 1) * sizeof(double))
    cdef int* aff = <int*> malloc((n + 1) * sizeof(int))
    cdef double* acc_a = <double*> malloc((n + 1) * sizeof(double))
    cdef double* acc_b = <double*> malloc((n + 1) * sizeof(double))
    if sym == NULL or child == NULL or ilo == NULL or ihi == NULL \
            or aff == NULL or acc_a == NULL or acc_b == NULL:
        raise MemoryError()

    cdef int k, s, advanced, kind, k2, s2, empty, has_root, it
    cdef double glo, ghi, p1, p2, y0, y1
    cdef double a_n, b_n, denom, r, u, v, clo, chi, root
    cdef double klo, khi, glo_val, ghi_val, a, b, fa, mid, fm, fv, fd, den, r2, lw

    aff[0] = 1
    acc_a[0] = 1.0
    acc_b[0] = 0.0

    with nogil:
        k = 0
        child[0] = first_symbol if first_symbol >= 0 else 0
        while k >= 0:
            s = child[k]
            advanced = 0
            while s < n_syms:
                if k == 0 and first_symbol >= 0 and s > first_symbol:
                    break
                if br_owner[s] != omega[k]:
                    s += 1
                    continue
                if k > 0 and trans[sym[k - 1], s] == 0:
                    s += 1
                    continue
                if k == 0:
                    glo = br_lo[s]
                    ghi = br_hi[s]
                else:
                    glo = ilo[k] if ilo[k] > br_lo[s] else br_lo[s]
                    ghi = ihi[k] if ihi[k] < br_hi[s] else br_hi[s]
                    if ghi - glo < -_SLIVER:
                        s += 1
                        continue
                    if ghi < glo:
                        glo = 0.5 * (glo + ghi)
                        ghi = glo
                kind = br_kind[s]
                p1 = br_p1[s]
                p2 = br_p2[s]
                y0 = _f(kind, p1, p2, glo)
                y1 = _f(kind, p1, p2, ghi)
                if y0 <= y1:
                    ilo[k + 1] = y0
                    ihi[k + 1] = y1
                else:
                    ilo[k + 1] = y1
                    ihi[k + 1] = y0
                if aff[k] and kind == 0:
                    aff[k + 1] = 1
                    acc_a[k + 1] = p1 * acc_a[k]
                    acc_b[k + 1] = p1 * acc_b[k] + p2
                else:
                    aff[k + 1] = 0
                sym[k] = s
                child[k] = s + 1
                advanced = 1
                break

            if not advanced:
                k -= 1
                continue

            if k + 1 < n:
                k += 1
                child[k] = 0
                continue

            # leaf: solve F(x) = x on the cylinder
            has_root = 0
            root = 0.0
            if aff[n]:
                a_n = acc_a[n]
                b_n = acc_b[n]
                denom = 1.0 - a_n
                if fabs(denom) >= 1e-14:
                    r = b_n / denom
                    u = (ilo[n] - b_n) / a_n
                    v = (ihi[n] - b_n) / a_n
                    if u <= v:
                        clo = u
                        chi = v
                    else:
                        clo = v
                        chi = u
                    if clo - _ROOT_PAD <= r <= chi + _ROOT_PAD:
                        root = r
                        if root < clo:
                            root = clo
                        if root > chi:
                            root = chi
                        has_root = 1
            else:
                s2 = sym[n - 1]
                klo = br_lo[s2]
                khi = br_hi[s2]
                empty = 0
                for k2 in range(n - 2, -1, -1):
                    s2 = sym[k2]
                    u = _finv(br_kind[s2], br_p1[s2], br_p2[s2], br_lo[s2], br_hi[s2], klo)
                    v = _finv(br_kind[s2], br_p1[s2], br_p2[s2], br_lo[s2], br_hi[s2], khi)
                    if u > v:
                        mid = u
                        u = v
                        v = mid
                    klo = u if u > br_lo[s2] else br_lo[s2]
                    khi = v if v < br_hi[s2] else br_hi[s2]
                    if khi - klo < -_SLIVER:
                        empty = 1
                        break
                    if khi < klo:
                        klo = 0.5 * (klo + khi)
                        khi = klo
                if not empty:
                    glo_val = _compose(br_kind, br_p1, br_p2, sym, n, klo) - klo
                    ghi_val = _compose(br_kind, br_p1, br_p2, sym, n, khi) - khi
                    if fabs(glo_val) <= _ENDPOINT_TOL:
                        root = klo
                        has_root = 1
                    elif fabs(ghi_val) <= _ENDPOINT_TOL:
                        root = khi
                        has_root = 1
                    elif (glo_val < 0.0) != (ghi_val < 0.0):
                        a = klo
                        b = khi
                        fa = glo_val
                        while b - a > _BISECT_TOL:
                            mid = 0.5 * (a + b)
                            fm = _compose(br_kind, br_p1, br_p2, sym, n, mid) - mid
                            if (fm < 0.0) == (fa < 0.0):
                                a = mid
                                fa = fm
                            else:
                                b = mid
                        r = 0.5 * (a + b)
                        fv = _compose_deriv(br_kind, br_p1, br_p2, sym, n, r, &fd)
                        den = fd - 1.0
                        if den != 0.0:
                            r2 = r - (fv - r) / den
                            if klo - _ROOT_PAD <= r2 <= khi + _ROOT_PAD:
                                r = r2
                                if r < klo:
                                    r = klo
                                if r > khi:
                                    r = khi
                        root = r
                        has_root = 1

            if has_root:
                v = root
                lw = 0.0
                for k2 in range(n):
                    orbit_out[found, k2] = v
                    s2 = sym[k2]
                    lw += log(fabs(_fp(br_kind[s2], br_p1[s2], br_p2[s2], v)))
                    v = _f(br_kind[s2], br_p1[s2], br_p2[s2], v)
                    words_out[found, k2] = sym[k2]
                xs_out[found] = root
                logw_out[found] = -lw
                found += 1

    free(sym)
    free(child)
    free(ilo)
    free(ihi)
    free(aff)
    free(acc_a)
    free(acc_b)
    return found
