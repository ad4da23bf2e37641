# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled O(M^2) L1 and product-integration loops.

The inner loops live in ``_vecpow.h``, built with -ffast-math so that they
vectorise through the libm vector variants; every power here has a strictly
positive finite base. The Mittag-Leffler kernel stays in ``_kernels`` under
strict IEEE semantics.
"""

import numpy as np
from libc.math cimport fabs, pow
from scipy.special.cython_special cimport rgamma

cdef extern from "_vecpow.h" nogil:
    void fl_gaps(const double* t, double p, Py_ssize_t m, double* buf)
    double fl_dot(const double* w, const double* slope, Py_ssize_t n)
    double fl_lag_dot(const double* w, const double* slope, Py_ssize_t n)


cdef bint _is_uniform(const double[::1] tv) noexcept nogil:
    cdef Py_ssize_t n = tv.shape[0], j
    cdef double h
    if n < 3:
        return True
    h = tv[1] - tv[0]
    for j in range(1, n - 1):
        if fabs((tv[j + 1] - tv[j]) - h) > 1e-13 * h:
            return False
    return True


cdef void _uniform_weights(double h, double e, Py_ssize_t n, double* w) noexcept nogil:
    # w[l] = ((l+1)^e - l^e) h^e, the L1 weight for lag l
    cdef Py_ssize_t l
    cdef double hp = pow(h, e)
    for l in range(n):
        w[l] = pow(<double>(l + 1), e)
    for l in range(n - 1, 0, -1):
        w[l] = (w[l] - w[l - 1]) * hp
    if n > 0:
        w[0] *= hp


def caputo_l1(t, y, double sigma):
    """L1 approximation of the Caputo derivative of order sigma at every node."""
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t m_nodes = tv.shape[0], m, j
    out = np.zeros(m_nodes)
    if m_nodes < 2:
        return out
    cdef double[::1] ov = out
    cdef double e = 1.0 - sigma, g = rgamma(2.0 - sigma)
    cdef double[::1] slope = np.empty(m_nodes - 1)
    cdef double[::1] buf = np.empty(m_nodes - 1)
    cdef bint uniform = _is_uniform(tv)
    with nogil:
        for j in range(m_nodes - 1):
            slope[j] = (yv[j + 1] - yv[j]) / (tv[j + 1] - tv[j])
        if uniform:
            _uniform_weights(tv[1] - tv[0], e, m_nodes - 1, &buf[0])
            for m in range(1, m_nodes):
                ov[m] = (fl_lag_dot(&buf[0], &slope[0], m - 1) + buf[0] * slope[m - 1]) * g
        else:
            for m in range(1, m_nodes):
                fl_gaps(&tv[0], e, m, &buf[0])
                ov[m] = fl_dot(&buf[0], &slope[0], m) * g
    return out


def l1_relaxation_solve(t, rhs, double alpha, double lam, double y0):
    """Implicit L1 solve of D^alpha y + lam*y = rhs with y(0) = y0."""
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[::1] fv = np.ascontiguousarray(rhs, dtype=np.float64)
    cdef Py_ssize_t m_nodes = tv.shape[0], m, j
    y = np.empty(m_nodes)
    cdef double[::1] yv = y
    yv[0] = y0
    if m_nodes < 2:
        return y
    cdef double[::1] slope = np.zeros(m_nodes - 1)
    cdef double[::1] buf = np.empty(m_nodes - 1)
    cdef double e = 1.0 - alpha, g = rgamma(2.0 - alpha), hist, c, dt, last
    cdef bint uniform = _is_uniform(tv)
    with nogil:
        if uniform:
            _uniform_weights(tv[1] - tv[0], e, m_nodes - 1, &buf[0])
        for m in range(1, m_nodes):
            if uniform:
                hist = fl_lag_dot(&buf[0], &slope[0], m - 1)
                last = buf[0]
            else:
                fl_gaps(&tv[0], e, m, &buf[0])
                hist = fl_dot(&buf[0], &slope[0], m - 1)
                last = buf[m - 1]
            dt = tv[m] - tv[m - 1]
            c = last * g / dt
            yv[m] = (fv[m] - hist * g + c * yv[m - 1]) / (c + lam)
            slope[m - 1] = (yv[m] - yv[m - 1]) / dt
    return y


def frac_integral_pl(t, f, double beta):
    """Exact I^beta of the piecewise-linear interpolant of (t, f), at the nodes."""
    cdef const double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef const double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
    cdef Py_ssize_t m_nodes = tv.shape[0], m, j
    out = np.zeros(m_nodes)
    if m_nodes < 2:
        return out
    cdef double[::1] ov = out
    cdef double g1 = rgamma(beta + 1.0), g2 = rgamma(beta + 2.0)
    cdef double a, i0, i1, acc
    cdef double[::1] slope = np.empty(m_nodes - 1)
    cdef double[::1] buf = np.empty(m_nodes - 1)
    cdef double[::1] buf1 = np.empty(m_nodes - 1)
    with nogil:
        for j in range(m_nodes - 1):
            slope[j] = (fv[j + 1] - fv[j]) / (tv[j + 1] - tv[j])
        for m in range(1, m_nodes):
            # on [t_j, t_j+1]: f = f_j + s_j (eta - t_j) against (t_m - eta)^(beta-1)
            fl_gaps(&tv[0], beta, m, &buf[0])
            fl_gaps(&tv[0], beta + 1.0, m, &buf1[0])
            acc = 0.0
            for j in range(m):
                a = tv[m] - tv[j]
                i0 = buf[j] * g1
                i1 = beta * buf1[j] * g2
                acc += fv[j] * i0 + slope[j] * (a * i0 - i1)
            ov[m] = acc
    return out
