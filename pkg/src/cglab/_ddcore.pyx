# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled double-double kernels: the hot inner loops of the CG runners.

Mirrors cglab._ddcore_py bit for bit. two_prod uses the C99 fma, whose error
term equals the Dekker-split one exactly, so both backends agree to the last
bit. Must be compiled without -ffast-math / FP contraction.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fma, sqrt
from libc.stdlib cimport free, malloc

cnp.import_array()

BACKEND = "compiled"


cdef struct dd:
    double hi
    double lo


cdef inline dd _two_sum(double a, double b) noexcept nogil:
    cdef dd r
    cdef double bb
    r.hi = a + b
    bb = r.hi - a
    r.lo = (a - (r.hi - bb)) + (b - bb)
    return r


cdef inline dd _quick_two_sum(double a, double b) noexcept nogil:
    cdef dd r
    r.hi = a + b
    r.lo = b - (r.hi - a)
    return r


cdef inline dd _two_prod(double a, double b) noexcept nogil:
    cdef dd r
    r.hi = a * b
    r.lo = fma(a, b, -r.hi)
    return r


cdef inline dd _add(dd x, dd y) noexcept nogil:
    cdef dd s = _two_sum(x.hi, y.hi)
    cdef dd t = _two_sum(x.lo, y.lo)
    s.lo += t.hi
    s = _quick_two_sum(s.hi, s.lo)
    s.lo += t.lo
    return _quick_two_sum(s.hi, s.lo)


cdef inline dd _sub(dd x, dd y) noexcept nogil:
    cdef dd ny
    ny.hi = -y.hi
    ny.lo = -y.lo
    return _add(x, ny)


cdef inline dd _add_d(dd x, double y) noexcept nogil:
    cdef dd s = _two_sum(x.hi, y)
    s.lo += x.lo
    return _quick_two_sum(s.hi, s.lo)


cdef inline dd _mul(dd x, dd y) noexcept nogil:
    cdef dd p = _two_prod(x.hi, y.hi)
    p.lo += x.hi * y.lo + x.lo * y.hi
    return _quick_two_sum(p.hi, p.lo)


cdef inline dd _mul_d(dd x, double y) noexcept nogil:
    cdef dd p = _two_prod(x.hi, y)
    p.lo += x.lo * y
    return _quick_two_sum(p.hi, p.lo)


cdef inline dd _div(dd x, dd y) noexcept nogil:
    cdef double q1, q2, q3
    cdef dd p, r, q
    q1 = x.hi / y.hi
    p = _mul_d(y, q1)
    r = _sub(x, p)
    q2 = r.hi / y.hi
    p = _mul_d(y, q2)
    r = _sub(r, p)
    q3 = r.hi / y.hi
    q = _quick_two_sum(q1, q2)
    return _add_d(q, q3)


cdef inline dd _div_d(dd x, double y) noexcept nogil:
    cdef double q1, q2
    cdef dd p, s
    q1 = x.hi / y
    p = _two_prod(q1, y)
    s = _two_sum(x.hi, -p.hi)
    s.lo += x.lo - p.lo
    q2 = (s.hi + s.lo) / y
    return _quick_two_sum(q1, q2)


cdef inline dd _sqrt(dd a) noexcept nogil:
    cdef double x, ax
    cdef dd s, e, r
    if a.hi == 0.0 and a.lo == 0.0:
        r.hi = 0.0
        r.lo = 0.0
        return r
    x = 1.0 / sqrt(a.hi)
    ax = a.hi * x
    s = _two_prod(ax, ax)
    e = _sub(a, s)
    return _quick_two_sum(ax, e.hi * (x * 0.5))


# ---------------------------------------------------------------------------
# scalar ops exposed for tests / parity checks
# ---------------------------------------------------------------------------

def two_sum(double a, double b):
    cdef dd r = _two_sum(a, b)
    return r.hi, r.lo


def quick_two_sum(double a, double b):
    cdef dd r = _quick_two_sum(a, b)
    return r.hi, r.lo


def two_prod(double a, double b):
    cdef dd r = _two_prod(a, b)
    return r.hi, r.lo


def dd_add(double xh, double xl, double yh, double yl):
    cdef dd x, y, r
    x.hi, x.lo = xh, xl
    y.hi, y.lo = yh, yl
    r = _add(x, y)
    return r.hi, r.lo


def dd_sub(double xh, double xl, double yh, double yl):
    cdef dd x, y, r
    x.hi, x.lo = xh, xl
    y.hi, y.lo = yh, yl
    r = _sub(x, y)
    return r.hi, r.lo


def dd_add_d(double xh, double xl, double y):
    cdef dd x, r
    x.hi, x.lo = xh, xl
    r = _add_d(x, y)
    return r.hi, r.lo


def dd_mul(double xh, double xl, double yh, double yl):
    cdef dd x, y, r
    x.hi, x.lo = xh, xl
    y.hi, y.lo = yh, yl
    r = _mul(x, y)
    return r.hi, r.lo


def dd_mul_d(double xh, double xl, double y):
    cdef dd x, r
    x.hi, x.lo = xh, xl
    r = _mul_d(x, y)
    return r.hi, r.lo


def dd_div(double xh, double xl, double yh, double yl):
    cdef dd x, y, r
    x.hi, x.lo = xh, xl
    y.hi, y.lo = yh, yl
    r = _div(x, y)
    return r.hi, r.lo


def dd_div_d(double xh, double xl, double y):
    cdef dd x, r
    x.hi, x.lo = xh, xl
    r = _div_d(x, y)
    return r.hi, r.lo


def dd_sqrt(double xh, double xl):
    cdef dd x, r
    if xh < 0.0:
        raise ArithmeticError("dd_sqrt of negative value")
    x.hi, x.lo = xh, xl
    r = _sqrt(x)
    return r.hi, r.lo


# ---------------------------------------------------------------------------
# CG kernels
# ---------------------------------------------------------------------------

def cg_diagonal(double[::1] lam, double[::1] b, double eps, Py_ssize_t max_iters):
    """Double-double CG applied to diag(lam) y = b, real arithmetic.

    Returns (res_l2, res_w, converged); see the fallback module for the
    contract.
    """
    cdef Py_ssize_t n = lam.shape[0]
    cdef Py_ssize_t i, k
    cdef dd *r = <dd *> malloc(n * sizeof(dd))
    cdef dd *p = <dd *> malloc(n * sizeof(dd))
    cdef dd *z = <dd *> malloc(n * sizeof(dd))
    if r == NULL or p == NULL or z == NULL:
        free(r); free(p); free(z)
        raise MemoryError()
    cdef dd rr, rr2, w, ap, ak, bk, t
    cdef double tol_l2, tol_w
    cdef list res_l2 = [], res_w = []
    cdef bint converged = False
    cdef bint breakdown = False

    try:
        rr.hi = 0.0; rr.lo = 0.0
        w.hi = 0.0; w.lo = 0.0
        for i in range(n):
            r[i].hi = b[i]; r[i].lo = 0.0
            p[i] = r[i]
            t = _mul(r[i], r[i])
            rr = _add(rr, t)
            w = _add(w, _div_d(t, lam[i]))
        res_l2.append(_sqrt(rr).hi)
        res_w.append(_sqrt(w).hi)
        if res_l2[0] == 0.0:
            return res_l2, res_w, True
        tol_l2 = eps * <double> res_l2[0]
        tol_w = eps * <double> res_w[0]

        k = 0
        while k < max_iters:
            ap.hi = 0.0; ap.lo = 0.0
            for i in range(n):
                z[i] = _mul_d(p[i], lam[i])
                ap = _add(ap, _mul(p[i], z[i]))
            if ap.hi <= 1e-300:
                breakdown = True
                break
            ak = _div(rr, ap)
            rr2.hi = 0.0; rr2.lo = 0.0
            w.hi = 0.0; w.lo = 0.0
            for i in range(n):
                r[i] = _sub(r[i], _mul(ak, z[i]))
                t = _mul(r[i], r[i])
                rr2 = _add(rr2, t)
                w = _add(w, _div_d(t, lam[i]))
            res_l2.append(_sqrt(rr2).hi)
            res_w.append(_sqrt(w).hi)
            k += 1
            if <double> res_l2[k] <= tol_l2 and <double> res_w[k] <= tol_w:
                converged = True
                break
            if rr2.hi == 0.0:
                converged = True
                break
            bk = _div(rr2, rr)
            for i in range(n):
                p[i] = _add(r[i], _mul(bk, p[i]))
            rr = rr2
    finally:
        free(r); free(p); free(z)
    if breakdown:
        raise ArithmeticError("search-direction curvature <= 0")
    return res_l2, res_w, converged


def cg_dense(double[:, ::1] m, double[::1] b, double eps, Py_ssize_t max_iters):
    """Double-double CG on a dense symmetric positive definite matrix.

    w^{-1} residual norms come from triangular solves against a
    double-double Cholesky factor of m.
    """
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t i, j, k
    cdef dd *L = <dd *> malloc(n * n * sizeof(dd))
    cdef dd *r = <dd *> malloc(n * sizeof(dd))
    cdef dd *p = <dd *> malloc(n * sizeof(dd))
    cdef dd *z = <dd *> malloc(n * sizeof(dd))
    cdef dd *u = <dd *> malloc(n * sizeof(dd))
    if L == NULL or r == NULL or p == NULL or z == NULL or u == NULL:
        free(L); free(r); free(p); free(z); free(u)
        raise MemoryError()
    cdef dd rr, rr2, w, ap, ak, bk, s, t
    cdef double tol_l2, tol_w
    cdef list res_l2 = [], res_w = []
    cdef bint converged = False
    cdef int fail = 0  # 1: not PD, 2: curvature breakdown

    try:
        # dd Cholesky
        for j in range(n):
            s.hi = m[j, j]; s.lo = 0.0
            for k in range(j):
                s = _sub(s, _mul(L[j * n + k], L[j * n + k]))
            if s.hi <= 0.0:
                fail = 1
                break
            L[j * n + j] = _sqrt(s)
            for i in range(j + 1, n):
                s.hi = m[i, j]; s.lo = 0.0
                for k in range(j):
                    s = _sub(s, _mul(L[i * n + k], L[j * n + k]))
                L[i * n + j] = _div(s, L[j * n + j])
        if fail == 0:
            rr.hi = 0.0; rr.lo = 0.0
            for i in range(n):
                r[i].hi = b[i]; r[i].lo = 0.0
                p[i] = r[i]
                rr = _add(rr, _mul(r[i], r[i]))
            # <r, M^{-1} r> = ||L^{-1} r||^2
            w.hi = 0.0; w.lo = 0.0
            for i in range(n):
                s = r[i]
                for k in range(i):
                    s = _sub(s, _mul(L[i * n + k], u[k]))
                u[i] = _div(s, L[i * n + i])
                w = _add(w, _mul(u[i], u[i]))
            res_l2.append(_sqrt(rr).hi)
            res_w.append(_sqrt(w).hi)
            if res_l2[0] == 0.0:
                return res_l2, res_w, True
            tol_l2 = eps * <double> res_l2[0]
            tol_w = eps * <double> res_w[0]

            k = 0
            while k < max_iters:
                ap.hi = 0.0; ap.lo = 0.0
                for i in range(n):
                    s.hi = 0.0; s.lo = 0.0
                    for j in range(n):
                        s = _add(s, _mul_d(p[j], m[i, j]))
                    z[i] = s
                    ap = _add(ap, _mul(p[i], s))
                if ap.hi <= 1e-300:
                    fail = 2
                    break
                ak = _div(rr, ap)
                rr2.hi = 0.0; rr2.lo = 0.0
                for i in range(n):
                    r[i] = _sub(r[i], _mul(ak, z[i]))
                    rr2 = _add(rr2, _mul(r[i], r[i]))
                w.hi = 0.0; w.lo = 0.0
                for i in range(n):
                    s = r[i]
                    for j in range(i):
                        s = _sub(s, _mul(L[i * n + j], u[j]))
                    u[i] = _div(s, L[i * n + i])
                    w = _add(w, _mul(u[i], u[i]))
                res_l2.append(_sqrt(rr2).hi)
                res_w.append(_sqrt(w).hi)
                k += 1
                if <double> res_l2[k] <= tol_l2 and <double> res_w[k] <= tol_w:
                    converged = True
                    break
                if rr2.hi == 0.0:
                    converged = True
                    break
                bk = _div(rr2, rr)
                for i in range(n):
                    p[i] = _add(r[i], _mul(bk, p[i]))
                rr = rr2
    finally:
        free(L); free(r); free(p); free(z); free(u)
    if fail == 1:
        raise ArithmeticError("matrix not positive definite (Cholesky)")
    if fail == 2:
        raise ArithmeticError("search-direction curvature <= 0")
    return res_l2, res_w, converged
