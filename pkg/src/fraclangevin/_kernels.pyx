# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: Mittag-Leffler evaluation on the negative axis, plus the
O(M^2) L1 / product-integration loops re-exported from ``_kernels_l1``.
Same signatures as ``_kernels_py``."""

import numpy as np
from fraclangevin._kernels_l1 import caputo_l1, frac_integral_pl, l1_relaxation_solve
cimport numpy as cnp
from libc.math cimport fabs, pow, exp, log, sqrt, cos, sin, atan2, floor, INFINITY, M_PI
from scipy.special.cython_special cimport rgamma, gammaln

cnp.import_array()

cdef double EPS = 2.220446049250313e-16

cdef int SERIES = 0
cdef int ASYMPTOTIC = 1
cdef int CONTOUR = 2

cdef double SERIES_REACH = 4.0
cdef int SERIES_MAX_TERMS = 4000
cdef double ACCEPT_BOUND = 1e-14
cdef int CONTOUR_NODES = 40
cdef int CONTOUR_CHECK_NODES = 32


cdef inline double _rg(double y) noexcept nogil:
    return rgamma(y)


cdef inline double _powpos(double a, double e) noexcept nogil:
    # a > 0 on every call site; cheaper than pow() and accurate to a few ulp here
    return exp(e * log(a))


cdef inline bint _is_pole(double y) noexcept nogil:
    return y <= 0.0 and y == floor(y)


cdef void _series(double alpha, double mu, double x,
                  double* value, double* bound, long* terms) noexcept nogil:
    cdef double s = 0.0, c = 0.0, abs_sum = 0.0, prev_abs = INFINITY
    cdef double t, at, tot, mx = -x
    cdef int n
    bound[0] = INFINITY
    terms[0] = SERIES_MAX_TERMS
    for n in range(SERIES_MAX_TERMS):
        t = pow(mx, n) * _rg(alpha * n + mu)
        at = fabs(t)
        if n > 0 and at <= prev_abs and at <= 0.5 * EPS * fabs(s + c):
            bound[0] = at + 6.0 * EPS * abs_sum + EPS * fabs(s + c)
            terms[0] = n
            break
        tot = s + t
        if fabs(s) >= at:
            c += (s - tot) + t
        else:
            c += (t - tot) + s
        s = tot
        abs_sum += at
        if at > 0.0:
            prev_abs = at
    value[0] = s + c


cdef inline double _envelope_factor(double y) noexcept nogil:
    if y > 0.0:
        return 1.0
    return exp(gammaln(1.0 - y)) / M_PI


cdef inline double _exponential_part(double alpha, double mu, double x) noexcept nogil:
    # magnitude of the exponentially small term the algebraic expansion omits;
    # it is exactly present at alpha = 1 (E_{1,mu}(-x) ~ x^(1-mu) e^-x)
    cdef double c = cos(M_PI / alpha)
    if c >= 0.0:
        return 0.0
    return 2.0 * exp((1.0 - mu) / alpha * log(x) + c * pow(x, 1.0 / alpha)) / alpha


cdef void _asymptotic(double alpha, double mu, double x,
                      double* value, double* bound, long* terms) noexcept nogil:
    cdef double total = 0.0, abs_sum = 0.0, last_env = INFINITY
    cdef double arg, xk, env, t, sgn
    cdef double logx = log(x)
    cdef int k, k_max
    k_max = <int>((170.0 + mu) / alpha)
    if k_max > 4000:
        k_max = 4000
    terms[0] = 0
    for k in range(1, k_max + 1):
        arg = mu - k * alpha
        xk = exp(-k * logx)
        env = xk * _envelope_factor(arg)
        if env > last_env:
            break
        if not _is_pole(arg):
            sgn = 1.0 if (k % 2 == 1) else -1.0
            t = sgn * xk * _rg(arg)
            total += t
            abs_sum += fabs(t)
        last_env = env
        terms[0] = k
        if env <= 0.25 * EPS * fabs(total):
            break
    value[0] = total
    bound[0] = 10.0 * last_env + 8.0 * EPS * abs_sum + _exponential_part(alpha, mu, x)


cdef void _contour_sum(double alpha, double mu, double x, int n,
                       double* value, double* scale) noexcept nogil:
    # trapezoid rule on the parabola z(th) = n(0.1309 - 0.1194 th^2 + 0.25 i th)
    cdef double acc = 0.0, acc_abs = 0.0
    cdef double th, zr, zi, dzr, dzi, r, ph, lr
    cdef double nr, ni, mag, ang, dr, di, qr, qi, den, tr, ti
    cdef int j
    for j in range(n):
        th = -M_PI + (j + 0.5) * (2.0 * M_PI / n)
        zr = n * (0.1309 - 0.1194 * th * th)
        zi = n * 0.25 * th
        dzr = n * (-0.2388 * th)
        dzi = n * 0.25
        lr = 0.5 * log(zr * zr + zi * zi)
        ph = atan2(zi, zr)
        # numerator exp(z) z^(alpha-mu) dz
        mag = exp(zr + (alpha - mu) * lr)
        ang = zi + (alpha - mu) * ph
        nr = mag * cos(ang)
        ni = mag * sin(ang)
        tr = nr * dzr - ni * dzi
        ti = nr * dzi + ni * dzr
        # denominator z^alpha + x
        mag = exp(alpha * lr)
        dr = mag * cos(alpha * ph) + x
        di = mag * sin(alpha * ph)
        den = dr * dr + di * di
        qr = (tr * dr + ti * di) / den
        qi = (ti * dr - tr * di) / den
        # Re(q / i) = Im(q)
        acc += qi
        acc_abs += sqrt(qr * qr + qi * qi)
    value[0] = acc / n
    scale[0] = acc_abs / n


cdef void _contour(double alpha, double mu, double x,
                   double* value, double* bound, long* terms) noexcept nogil:
    cdef double v, v2, scale, scale2
    _contour_sum(alpha, mu, x, CONTOUR_NODES, &v, &scale)
    _contour_sum(alpha, mu, x, CONTOUR_CHECK_NODES, &v2, &scale2)
    value[0] = v
    bound[0] = fabs(v - v2) + 16.0 * EPS * scale
    terms[0] = CONTOUR_NODES


cdef void _ml_one(double alpha, double mu, double x, double* value,
                  double* bound, signed char* regime, long* terms) noexcept nogil:
    cdef double v, b
    cdef long nt
    if x == 0.0:
        value[0] = _rg(mu)
        bound[0] = 2.0 * EPS * fabs(value[0])
        regime[0] = SERIES
        terms[0] = 1
        return
    bound[0] = INFINITY
    value[0] = 0.0
    regime[0] = SERIES
    terms[0] = 0
    if pow(x, 1.0 / alpha) <= SERIES_REACH:
        _series(alpha, mu, x, &v, &b, &nt)
        if b < bound[0]:
            value[0] = v; bound[0] = b; regime[0] = SERIES; terms[0] = nt
    if bound[0] > ACCEPT_BOUND and x >= 1.0:
        _asymptotic(alpha, mu, x, &v, &b, &nt)
        if b < bound[0]:
            value[0] = v; bound[0] = b; regime[0] = ASYMPTOTIC; terms[0] = nt
    if bound[0] > ACCEPT_BOUND:
        _contour(alpha, mu, x, &v, &b, &nt)
        if b < bound[0]:
            value[0] = v; bound[0] = b; regime[0] = CONTOUR; terms[0] = nt


def ml_array(double alpha, double mu, x):
    """Evaluate E_{alpha,mu}(-x) elementwise; returns (value, bound, regime, terms)."""
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef Py_ssize_t n = xv.shape[0], i
    value = np.empty(n)
    bound = np.empty(n)
    regime = np.empty(n, dtype=np.int8)
    terms = np.empty(n, dtype=np.int64)
    cdef double[::1] vv = value
    cdef double[::1] bv = bound
    cdef signed char[::1] rv = regime
    cdef long[::1] tv = terms
    with nogil:
        for i in range(n):
            _ml_one(alpha, mu, xv[i], &vv[i], &bv[i], &rv[i], &tv[i])
    return value, bound, regime, terms
