"""Pure-Python double-double kernels (fallback for the compiled core).

Same contracts as ``cglab._ddcore`` and bit-identical results: both backends
use the classic error-free transformations (Knuth two-sum, Dekker split /
fma two-prod), whose outputs are uniquely determined by IEEE-754 doubles.
Roughly two orders of magnitude slower than the compiled module; fine for
small problems and for verifying the extension.

A double-double value is an unevaluated pair (hi, lo) with |lo| <= ulp(hi)/2,
giving ~31 significant decimal digits.
"""

import math

BACKEND = "python"

_SPLITTER = 134217729.0  # 2**27 + 1, exact in a double


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def quick_two_sum(a, b):
    # requires |a| >= |b|
    s = a + b
    return s, b - (s - a)


def two_prod(a, b):
    # math.fma is not available on 3.10; Dekker splitting gives the same
    # exact error term.
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def dd_add(xh, xl, yh, yl):
    s1, s2 = two_sum(xh, yh)
    t1, t2 = two_sum(xl, yl)
    s2 += t1
    s1, s2 = quick_two_sum(s1, s2)
    s2 += t2
    return quick_two_sum(s1, s2)


def dd_sub(xh, xl, yh, yl):
    return dd_add(xh, xl, -yh, -yl)


def dd_add_d(xh, xl, y):
    s1, s2 = two_sum(xh, y)
    s2 += xl
    return quick_two_sum(s1, s2)


def dd_mul(xh, xl, yh, yl):
    p1, p2 = two_prod(xh, yh)
    p2 += xh * yl + xl * yh
    return quick_two_sum(p1, p2)


def dd_mul_d(xh, xl, y):
    p1, p2 = two_prod(xh, y)
    p2 += xl * y
    return quick_two_sum(p1, p2)


def dd_div(xh, xl, yh, yl):
    q1 = xh / yh
    ph, pl = dd_mul_d(yh, yl, q1)
    rh, rl = dd_sub(xh, xl, ph, pl)
    q2 = rh / yh
    ph, pl = dd_mul_d(yh, yl, q2)
    rh, rl = dd_sub(rh, rl, ph, pl)
    q3 = rh / yh
    q1, q2 = quick_two_sum(q1, q2)
    return dd_add_d(q1, q2, q3)


def dd_div_d(xh, xl, y):
    q1 = xh / y
    p1, p2 = two_prod(q1, y)
    dh, dl = two_sum(xh, -p1)
    dl += xl - p2
    q2 = (dh + dl) / y
    return quick_two_sum(q1, q2)


def dd_sqrt(xh, xl):
    # Karp-Markstein: one Newton step on 1/sqrt applied in dd.
    if xh == 0.0 and xl == 0.0:
        return 0.0, 0.0
    if xh < 0.0:
        raise ArithmeticError("dd_sqrt of negative value")
    x = 1.0 / math.sqrt(xh)
    ax = xh * x
    s1, s2 = two_prod(ax, ax)
    eh, _ = dd_sub(xh, xl, s1, s2)
    return quick_two_sum(ax, eh * (x * 0.5))


def _dot_self(vh, vl, n):
    # sum of squares, dd accumulation
    ah = al = 0.0
    for i in range(n):
        ph, pl = dd_mul(vh[i], vl[i], vh[i], vl[i])
        ah, al = dd_add(ah, al, ph, pl)
    return ah, al


def _winv_norm_sq_diag(rh, rl, lam, n):
    # sum r_i^2 / lam_i
    ah = al = 0.0
    for i in range(n):
        ph, pl = dd_mul(rh[i], rl[i], rh[i], rl[i])
        ph, pl = dd_div_d(ph, pl, lam[i])
        ah, al = dd_add(ah, al, ph, pl)
    return ah, al


def cg_diagonal(lam, b, eps, max_iters):
    """Double-double CG applied to diag(lam) y = b, real arithmetic.

    Returns (res_l2, res_w, converged): per-iteration residual norms in the
    l2 and w^{-1} (energy of the error) norms as float lists of length
    iterations_run + 1. Stops once both relative residuals are <= eps, or at
    max_iters. Raises ArithmeticError on nonpositive search-direction
    curvature.
    """
    n = len(lam)
    rh = [float(x) for x in b]
    rl = [0.0] * n
    ph = list(rh)
    pl = [0.0] * n
    zh = [0.0] * n  # scratch: lam * p
    zl = [0.0] * n

    rrh, rrl = _dot_self(rh, rl, n)
    wh, wl = _winv_norm_sq_diag(rh, rl, lam, n)
    res_l2 = [float(dd_sqrt(rrh, rrl)[0])]
    res_w = [float(dd_sqrt(wh, wl)[0])]
    if res_l2[0] == 0.0:
        return res_l2, res_w, True

    tol_l2 = eps * res_l2[0]
    tol_w = eps * res_w[0]
    converged = False
    k = 0
    while k < max_iters:
        # z = lam * p; pAp = <p, z>
        aph = apl = 0.0
        for i in range(n):
            zh[i], zl[i] = dd_mul_d(ph[i], pl[i], lam[i])
            th, tl = dd_mul(ph[i], pl[i], zh[i], zl[i])
            aph, apl = dd_add(aph, apl, th, tl)
        if aph <= 1e-300:
            raise ArithmeticError("search-direction curvature <= 0")
        akh, akl = dd_div(rrh, rrl, aph, apl)
        for i in range(n):
            th, tl = dd_mul(akh, akl, zh[i], zl[i])
            rh[i], rl[i] = dd_sub(rh[i], rl[i], th, tl)
        rr2h, rr2l = _dot_self(rh, rl, n)
        wh, wl = _winv_norm_sq_diag(rh, rl, lam, n)
        res_l2.append(float(dd_sqrt(rr2h, rr2l)[0]))
        res_w.append(float(dd_sqrt(wh, wl)[0]))
        k += 1
        if res_l2[k] <= tol_l2 and res_w[k] <= tol_w:
            converged = True
            break
        if rr2h == 0.0:
            converged = True
            break
        bkh, bkl = dd_div(rr2h, rr2l, rrh, rrl)
        for i in range(n):
            th, tl = dd_mul(bkh, bkl, ph[i], pl[i])
            ph[i], pl[i] = dd_add(rh[i], rl[i], th, tl)
        rrh, rrl = rr2h, rr2l
    return res_l2, res_w, converged


def _cholesky(m, n):
    lh = [[0.0] * n for _ in range(n)]
    ll = [[0.0] * n for _ in range(n)]
    for j in range(n):
        sh, sl = float(m[j][j]), 0.0
        for k in range(j):
            ph, pl = dd_mul(lh[j][k], ll[j][k], lh[j][k], ll[j][k])
            sh, sl = dd_sub(sh, sl, ph, pl)
        if sh <= 0.0:
            raise ArithmeticError("matrix not positive definite (Cholesky)")
        djh, djl = dd_sqrt(sh, sl)
        lh[j][j], ll[j][j] = djh, djl
        for i in range(j + 1, n):
            sh, sl = float(m[i][j]), 0.0
            for k in range(j):
                ph, pl = dd_mul(lh[i][k], ll[i][k], lh[j][k], ll[j][k])
                sh, sl = dd_sub(sh, sl, ph, pl)
            lh[i][j], ll[i][j] = dd_div(sh, sl, djh, djl)
    return lh, ll


def _winv_norm_sq_dense(rh, rl, lh, ll, n):
    # <r, M^{-1} r> via two triangular solves against the dd Cholesky factor
    uh = [0.0] * n
    ul = [0.0] * n
    for i in range(n):
        sh, sl = rh[i], rl[i]
        for k in range(i):
            ph, pl = dd_mul(lh[i][k], ll[i][k], uh[k], ul[k])
            sh, sl = dd_sub(sh, sl, ph, pl)
        uh[i], ul[i] = dd_div(sh, sl, lh[i][i], ll[i][i])
    # ||L^{-1} r||^2 = <r, M^{-1} r>
    return _dot_self(uh, ul, n)


def cg_dense(m, b, eps, max_iters):
    """Double-double CG on a dense symmetric positive definite matrix.

    m: n x n nested sequence (float64 entries), b: length-n sequence.
    Same return convention as cg_diagonal.
    """
    n = len(b)
    lh, ll = _cholesky(m, n)
    rh = [float(x) for x in b]
    rl = [0.0] * n
    ph = list(rh)
    pl = [0.0] * n
    zh = [0.0] * n
    zl = [0.0] * n

    rrh, rrl = _dot_self(rh, rl, n)
    wh, wl = _winv_norm_sq_dense(rh, rl, lh, ll, n)
    res_l2 = [float(dd_sqrt(rrh, rrl)[0])]
    res_w = [float(dd_sqrt(wh, wl)[0])]
    if res_l2[0] == 0.0:
        return res_l2, res_w, True

    tol_l2 = eps * res_l2[0]
    tol_w = eps * res_w[0]
    converged = False
    k = 0
    while k < max_iters:
        aph = apl = 0.0
        for i in range(n):
            sh = sl = 0.0
            row = m[i]
            for j in range(n):
                th, tl = dd_mul_d(ph[j], pl[j], float(row[j]))
                sh, sl = dd_add(sh, sl, th, tl)
            zh[i], zl[i] = sh, sl
            th, tl = dd_mul(ph[i], pl[i], sh, sl)
            aph, apl = dd_add(aph, apl, th, tl)
        if aph <= 1e-300:
            raise ArithmeticError("search-direction curvature <= 0")
        akh, akl = dd_div(rrh, rrl, aph, apl)
        for i in range(n):
            th, tl = dd_mul(akh, akl, zh[i], zl[i])
            rh[i], rl[i] = dd_sub(rh[i], rl[i], th, tl)
        rr2h, rr2l = _dot_self(rh, rl, n)
        wh, wl = _winv_norm_sq_dense(rh, rl, lh, ll, n)
        res_l2.append(float(dd_sqrt(rr2h, rr2l)[0]))
        res_w.append(float(dd_sqrt(wh, wl)[0]))
        k += 1
        if res_l2[k] <= tol_l2 and res_w[k] <= tol_w:
            converged = True
            break
        if rr2h == 0.0:
            converged = True
            break
        bkh, bkl = dd_div(rr2h, rr2l, rrh, rrl)
        for i in range(n):
            th, tl = dd_mul(bkh, bkl, ph[i], pl[i])
            ph[i], pl[i] = dd_add(rh[i], rl[i], th, tl)
        rrh, rrl = rr2h, rr2l
    return res_l2, res_w, converged
