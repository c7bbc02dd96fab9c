"""Pure-Python enumeration kernel.

Walks the admissible-word tree for one sample word depth-first, pruning by
the transition matrix and by cylinder emptiness, and solves for the unique
fixed-point candidate of each leaf cylinder.  The compiled kernel in
``_kernels_cy.pyx`` mirrors this file operation for operation so that both
produce bit-identical results.

Branch encoding (see ``kernels.build_tables``): kind 0 is affine
``p1*x + p2``; kind 1 is the intermittent left piece ``x + p1*x**(1+p2)``
with ``p1 = 2**alpha`` and ``p2 = alpha``.
"""

from __future__ import annotations

from math import log

BACKEND_NAME = "pure"

_SLIVER = 1e-13  # tolerated negative width before pruning an intersection
_ROOT_PAD = 1e-12  # containment slack for closed-form roots
_ENDPOINT_TOL = 1e-12  # |g| threshold for endpoint fixed points
_BISECT_TOL = 1e-12  # x-tolerance of the leaf bisection
_INV_TOL = 1e-14  # x-tolerance of monotone branch inversion


def _f(kind, p1, p2, x):
    if kind == 0:
        return p1 * x + p2
    if x < 0.0:
        x = 0.0
    return x + p1 * x ** (1.0 + p2)


def _fp(kind, p1, p2, x):
    if kind == 0:
        return p1
    if x < 0.0:
        x = 0.0
    return 1.0 + (1.0 + p2) * p1 * x**p2


def _finv(kind, p1, p2, lo, hi, y):
    if kind == 0:
        return (y - p2) / p1
    if y <= _f(kind, p1, p2, lo):
        return lo
    if y >= _f(kind, p1, p2, hi):
        return hi
    a, b = lo, hi
    for _ in range(64):
        mid = 0.5 * (a + b)
        if _f(kind, p1, p2, mid) < y:
            a = mid
        else:
            b = mid
        if b - a <= _INV_TOL:
            break
    return 0.5 * (a + b)


def enumerate_candidates(
    br_lo,
    br_hi,
    br_kind,
    br_p1,
    br_p2,
    br_owner,
    trans,
    omega,
    first_symbol,
    words_out,
    xs_out,
    logw_out,
    orbit_out,
):
    """Fill the output arrays with cycle candidates; return how many were found.

    ``omega`` holds 0-based map indices.  ``first_symbol`` (0-based) restricts
    the first letter, -1 means no restriction.  Output rows are emitted in
    lexicographic word order.
    """
    # plain lists index much faster than numpy scalars in this loop
    br_lo = [float(v) for v in br_lo]
    br_hi = [float(v) for v in br_hi]
    br_kind = [int(v) for v in br_kind]
    br_p1 = [float(v) for v in br_p1]
    br_p2 = [float(v) for v in br_p2]
    br_owner = [int(v) for v in br_owner]
    trans = [[int(v) for v in row] for row in trans]
    omega = [int(v) for v in omega]

    n = len(omega)
    n_syms = len(br_lo)
    found = 0

    sym = [0] * n
    child = [0] * (n + 1)
    ilo = [0.0] * (n + 1)
    ihi = [0.0] * (n + 1)
    aff = [True] * (n + 1)
    acc_a = [1.0] * (n + 1)
    acc_b = [0.0] * (n + 1)

    k = 0
    child[0] = first_symbol if first_symbol >= 0 else 0
    while k >= 0:
        # find the next viable symbol at depth k
        s = child[k]
        advanced = False
        while s < n_syms:
            if k == 0 and first_symbol >= 0 and s > first_symbol:
                break
            if br_owner[s] != omega[k]:
                s += 1
                continue
            if k > 0 and not trans[sym[k - 1]][s]:
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
                    glo = ghi = 0.5 * (glo + ghi)
            kind = br_kind[s]
            p1 = br_p1[s]
            p2 = br_p2[s]
            y0 = _f(kind, p1, p2, glo)
            y1 = _f(kind, p1, p2, ghi)
            if y0 <= y1:
                ilo[k + 1], ihi[k + 1] = y0, y1
            else:
                ilo[k + 1], ihi[k + 1] = y1, y0
            if aff[k] and kind == 0:
                aff[k + 1] = True
                acc_a[k + 1] = p1 * acc_a[k]
                acc_b[k + 1] = p1 * acc_b[k] + p2
            else:
                aff[k + 1] = False
            sym[k] = s
            child[k] = s + 1
            advanced = True
            break

        if not advanced:
            k -= 1
            continue

        if k + 1 < n:
            k += 1
            child[k] = 0
            continue

        # leaf: solve F(x) = x on the cylinder
        root = None
        if aff[n]:
            a_n, b_n = acc_a[n], acc_b[n]
            denom = 1.0 - a_n
            if abs(denom) >= 1e-14:
                r = b_n / denom
                u = (ilo[n] - b_n) / a_n
                v = (ihi[n] - b_n) / a_n
                clo, chi = (u, v) if u <= v else (v, u)
                if clo - _ROOT_PAD <= r <= chi + _ROOT_PAD:
                    root = min(max(r, clo), chi)
        else:
            s_last = sym[n - 1]
            klo, khi = br_lo[s_last], br_hi[s_last]
            empty = False
            for k2 in range(n - 2, -1, -1):
                s2 = sym[k2]
                u = _finv(br_kind[s2], br_p1[s2], br_p2[s2], br_lo[s2], br_hi[s2], klo)
                v = _finv(br_kind[s2], br_p1[s2], br_p2[s2], br_lo[s2], br_hi[s2], khi)
                if u > v:
                    u, v = v, u
                klo = u if u > br_lo[s2] else br_lo[s2]
                khi = v if v < br_hi[s2] else br_hi[s2]
                if khi - klo < -_SLIVER:
                    empty = True
                    break
                if khi < klo:
                    klo = khi = 0.5 * (klo + khi)
            if not empty:
                glo_val = _compose(br_kind, br_p1, br_p2, sym, n, klo) - klo
                ghi_val = _compose(br_kind, br_p1, br_p2, sym, n, khi) - khi
                if abs(glo_val) <= _ENDPOINT_TOL:
                    root = klo
                elif abs(ghi_val) <= _ENDPOINT_TOL:
                    root = khi
                elif (glo_val < 0.0) != (ghi_val < 0.0):
                    a, b = klo, khi
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
                    fv, fd = _compose_with_deriv(br_kind, br_p1, br_p2, sym, n, r)
                    den = fd - 1.0
                    if den != 0.0:
                        r2 = r - (fv - r) / den
                        if klo - _ROOT_PAD <= r2 <= khi + _ROOT_PAD:
                            r = min(max(r2, klo), khi)
                    root = r

        if root is not None:
            v = root
            lw = 0.0
            for k2 in range(n):
                orbit_out[found, k2] = v
                s2 = sym[k2]
                lw += log(abs(_fp(br_kind[s2], br_p1[s2], br_p2[s2], v)))
                v = _f(br_kind[s2], br_p1[s2], br_p2[s2], v)
                words_out[found, k2] = sym[k2]
            xs_out[found] = root
            logw_out[found] = -lw
            found += 1
        # stay at the same depth; siblings continue via child[k]

    return found


def _compose(br_kind, br_p1, br_p2, sym, n, x):
    v = x
    for k in range(n):
        s = sym[k]
        v = _f(br_kind[s], br_p1[s], br_p2[s], v)
    return v


def _compose_with_deriv(br_kind, br_p1, br_p2, sym, n, x):
    v = x
    d = 1.0
    for k in range(n):
        s = sym[k]
        d *= _fp(br_kind[s], br_p1[s], br_p2[s], v)
        v = _f(br_kind[s], br_p1[s], br_p2[s], v)
    return v, d
