"""Pure numpy implementations of the hot kernels.

This module mirrors ``_kernels.pyx`` function for function. It is used when
the compiled extension is missing or when ``FRACLANGEVIN_PURE_PYTHON=1``.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln, rgamma

EPS = float(np.finfo(float).eps)

SERIES = 0
ASYMPTOTIC = 1
CONTOUR = 2

# Series is attempted while x**(1/alpha) stays below this (sum of |terms|
# is then at most ~ exp(4)/alpha).
SERIES_REACH = 4.0
SERIES_MAX_TERMS = 4000
# A candidate whose bound is already below this is accepted without
# computing the next, more expensive one.
ACCEPT_BOUND = 1e-14
CONTOUR_NODES = 40
CONTOUR_CHECK_NODES = 32
# scalar calls run the term loops on Python floats, precomputing this many terms at once
_CHUNK = 32


def _is_pole(y: np.ndarray) -> np.ndarray:
    return (y <= 0.0) & (y == np.round(y))


def _series(alpha: float, mu: float, x: np.ndarray):
    n_x = x.size
    s = np.zeros(n_x)
    c = np.zeros(n_x)
    abs_sum = np.zeros(n_x)
    prev_abs = np.full(n_x, np.inf)
    active = np.ones(n_x, dtype=bool)
    bound = np.full(n_x, np.inf)
    terms = np.zeros(n_x, dtype=np.int64)
    mx = -x
    for n in range(SERIES_MAX_TERMS):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        t = np.power(mx[idx], n) * rgamma(alpha * n + mu)
        at = np.abs(t)
        # converged once terms are past their peak and below the noise floor
        done = (at <= prev_abs[idx]) & (at <= 0.5 * EPS * np.abs(s[idx] + c[idx]))
        if n > 0 and done.any():
            di = idx[done]
            bound[di] = at[done] + 6.0 * EPS * abs_sum[di] + EPS * np.abs(s[di] + c[di])
            terms[di] = n
            active[di] = False
            keep = ~done
            idx, t, at = idx[keep], t[keep], at[keep]
        # Neumaier compensated accumulation
        si = s[idx]
        tot = si + t
        big = np.abs(si) >= at
        c[idx] += np.where(big, (si - tot) + t, (t - tot) + si)
        s[idx] = tot
        abs_sum[idx] += at
        prev_abs[idx] = np.where(at > 0.0, at, prev_abs[idx])
    value = s + c
    return value, bound, terms


def _series_scalar(alpha: float, mu: float, x: float):
    # same stopping rule as _series, terms precomputed in chunks
    mx = -x
    s = c = abs_sum = 0.0
    prev_abs = np.inf
    for n0 in range(0, SERIES_MAX_TERMS, _CHUNK):
        ns = np.arange(n0, min(n0 + _CHUNK, SERIES_MAX_TERMS), dtype=float)
        chunk = (np.power(mx, ns) * rgamma(alpha * ns + mu)).tolist()
        for n, t in enumerate(chunk, n0):
            at = abs(t)
            if n > 0 and at <= prev_abs and at <= 0.5 * EPS * abs(s + c):
                return s + c, at + 6.0 * EPS * abs_sum + EPS * abs(s + c), n
            tot = s + t
            c += ((s - tot) + t) if abs(s) >= at else ((t - tot) + s)
            s = tot
            abs_sum += at
            if at > 0.0:
                prev_abs = at
    return s + c, np.inf, 0


def _envelope_factor(y: float) -> float:
    # |1/Gamma(y)| <= 1 for y > 0 and <= Gamma(1-y)/pi otherwise (reflection)
    if y > 0.0:
        return 1.0
    return float(np.exp(gammaln(1.0 - y))) / np.pi


def _exponential_part(alpha: float, mu: float, x: np.ndarray) -> np.ndarray:
    # magnitude of the exponentially small term the algebraic expansion omits;
    # it is exactly present at alpha = 1 (E_{1,mu}(-x) ~ x^(1-mu) e^-x)
    c = np.cos(np.pi / alpha)
    if c >= 0.0:
        return np.zeros_like(x)
    return 2.0 * np.exp((1.0 - mu) / alpha * np.log(x) + c * x ** (1.0 / alpha)) / alpha


def _asymptotic_optimal(alpha: float, mu: float, x: np.ndarray):
    n_x = x.size
    total = np.zeros(n_x)
    last_env = np.full(n_x, np.inf)
    abs_sum = np.zeros(n_x)
    active = np.ones(n_x, dtype=bool)
    terms = np.zeros(n_x, dtype=np.int64)
    k_max = int(min(4000, (170.0 + mu) / alpha))
    logx = np.log(x)
    for k in range(1, k_max + 1):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        arg = mu - k * alpha
        xk = np.exp(-k * logx[idx])
        env = xk * _envelope_factor(arg)
        grew = env > last_env[idx]
        if grew.any():
            active[idx[grew]] = False
        go = ~grew
        gi = idx[go]
        if not _is_pole(np.asarray(arg)):
            sign = 1.0 if (k % 2 == 1) else -1.0
            t = sign * xk[go] * float(rgamma(arg))
            total[gi] += t
            abs_sum[gi] += np.abs(t)
        last_env[gi] = env[go]
        terms[gi] = k
        settled = env[go] <= 0.25 * EPS * np.abs(total[gi])
        if settled.any():
            active[gi[settled]] = False
    bound = 10.0 * last_env + 8.0 * EPS * abs_sum + _exponential_part(alpha, mu, x)
    return total, bound, terms


def _asymptotic_scalar(alpha: float, mu: float, x: float):
    # same truncation rule as _asymptotic_optimal, terms precomputed in chunks
    k_max = int(min(4000, (170.0 + mu) / alpha))
    logx = np.log(x)
    total = abs_sum = 0.0
    last_env = np.inf
    terms = 0
    for k0 in range(1, k_max + 1, _CHUNK):
        ks = np.arange(k0, min(k0 + _CHUNK, k_max + 1), dtype=float)
        arg = mu - ks * alpha
        xk = np.exp(-ks * logx)
        env = (xk * np.where(arg > 0.0, 1.0, np.exp(gammaln(1.0 - arg)) / np.pi)).tolist()
        t = np.where(_is_pole(arg), 0.0, xk * rgamma(arg)).tolist()
        for i, k in enumerate(range(k0, k0 + len(env))):
            if env[i] > last_env:
                break
            tk = t[i] if k % 2 == 1 else -t[i]
            total += tk
            abs_sum += abs(tk)
            last_env = env[i]
            terms = k
            if env[i] <= 0.25 * EPS * abs(total):
                break
        else:
            continue
        break
    bound = 10.0 * last_env + 8.0 * EPS * abs_sum + float(_exponential_part(alpha, mu, np.array([x]))[0])
    return total, bound, terms


def _contour_nodes(n: int):
    th = -np.pi + (np.arange(1, n + 1) - 0.5) * (2.0 * np.pi / n)
    z = n * (0.1309 - 0.1194 * th**2 + 0.25j * th)
    dz = n * (-0.2388 * th + 0.25j)
    return z, dz


def _contour_sum(alpha: float, mu: float, x: np.ndarray, n: int):
    z, dz = _contour_nodes(n)
    logz = np.log(z)
    num = np.exp(z + (alpha - mu) * logz) * dz
    za = np.exp(alpha * logz)
    terms = num[None, :] / (za[None, :] + x[:, None])
    return (terms.sum(axis=1) / (1j * n)).real, np.abs(terms).sum(axis=1) / n


def _contour(alpha: float, mu: float, x: np.ndarray):
    v, scale = _contour_sum(alpha, mu, x, CONTOUR_NODES)
    v2, _ = _contour_sum(alpha, mu, x, CONTOUR_CHECK_NODES)
    bound = np.abs(v - v2) + 16.0 * EPS * scale
    terms = np.full(x.size, CONTOUR_NODES, dtype=np.int64)
    return v, bound, terms


def _scalar(fn):
    def wrapped(alpha, mu, x):
        v, b, n = fn(alpha, mu, float(x[0]))
        return np.array([v]), np.array([b]), np.array([n], dtype=np.int64)
    return wrapped


def ml_array(alpha: float, mu: float, x):
    """Evaluate E_{alpha,mu}(-x) elementwise; returns (value, bound, regime, terms)."""
    x = np.ascontiguousarray(x, dtype=float).ravel()
    n_x = x.size
    value = np.zeros(n_x)
    bound = np.full(n_x, np.inf)
    regime = np.full(n_x, SERIES, dtype=np.int8)
    terms = np.zeros(n_x, dtype=np.int64)

    def take(sel, v, b, r, nt):
        better = b < bound[sel]
        s = sel[better]
        value[s] = v[better]
        bound[s] = b[better]
        regime[s] = r
        terms[s] = nt[better]

    zero = np.flatnonzero(x == 0.0)
    value[zero] = rgamma(mu)
    bound[zero] = 2.0 * EPS * np.abs(value[zero])
    terms[zero] = 1

    pos = np.flatnonzero(x > 0.0)
    reach = np.power(x[pos], 1.0 / alpha)
    series, asymptotic = (_series, _asymptotic_optimal) if n_x > 1 else (_scalar(_series_scalar), _scalar(_asymptotic_scalar))
    sel = pos[reach <= SERIES_REACH]
    if sel.size:
        v, b, nt = series(alpha, mu, x[sel])
        take(sel, v, b, SERIES, nt)
    sel = pos[(bound[pos] > ACCEPT_BOUND) & (x[pos] >= 1.0)]
    if sel.size:
        v, b, nt = asymptotic(alpha, mu, x[sel])
        take(sel, v, b, ASYMPTOTIC, nt)
    sel = pos[bound[pos] > ACCEPT_BOUND]
    if sel.size:
        v, b, nt = _contour(alpha, mu, x[sel])
        take(sel, v, b, CONTOUR, nt)
    return value, bound, regime, terms


def _power_gaps(t, dt, m: int, p: float):
    """(t_m - t_j)^p - (t_m - t_{j+1})^p for j < m, without cancellation."""
    # nodes below eps*t_m would otherwise collapse onto t_m and lose their weight
    out = np.empty(m)
    b = t[m] - t[1:m]
    out[:-1] = b**p * np.expm1(p * np.log1p(dt[: m - 1] / b))
    out[-1] = dt[m - 1] ** p
    return out


def caputo_l1(t, y, sigma: float):
    """L1 approximation of the Caputo derivative of order sigma at every node."""
    t = np.ascontiguousarray(t, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    m_nodes = t.size
    out = np.zeros(m_nodes)
    dy = np.diff(y)
    dt = np.diff(t)
    slope = dy / dt
    e = 1.0 - sigma
    for m in range(1, m_nodes):
        w = _power_gaps(t, dt, m, e)
        out[m] = np.dot(w, slope[:m])
    return out * rgamma(2.0 - sigma)


def l1_relaxation_solve(t, rhs, alpha: float, lam: float, y0: float):
    """Implicit L1 solve of D^alpha y + lam*y = rhs with y(0) = y0."""
    t = np.ascontiguousarray(t, dtype=float)
    rhs = np.ascontiguousarray(rhs, dtype=float)
    m_nodes = t.size
    y = np.empty(m_nodes)
    y[0] = y0
    e = 1.0 - alpha
    g = float(rgamma(2.0 - alpha))
    dt = np.diff(t)
    slope = np.zeros(m_nodes - 1)
    for m in range(1, m_nodes):
        w = _power_gaps(t, dt, m, e) * g
        hist = np.dot(w[:-1], slope[: m - 1])
        c = w[-1] / dt[m - 1]
        y[m] = (rhs[m] - hist + c * y[m - 1]) / (c + lam)
        slope[m - 1] = (y[m] - y[m - 1]) / dt[m - 1]
    return y


def frac_integral_pl(t, f, beta: float):
    """Exact I^beta of the piecewise-linear interpolant of (t, f), at the nodes."""
    t = np.ascontiguousarray(t, dtype=float)
    f = np.ascontiguousarray(f, dtype=float)
    m_nodes = t.size
    out = np.zeros(m_nodes)
    g1 = float(rgamma(beta + 1.0))
    g2 = float(rgamma(beta + 2.0))
    dt = np.diff(t)
    for m in range(1, m_nodes):
        a = t[m] - t[:m]
        # on [t_j, t_j+1]: f = f_j + s_j (eta - t_j); integrate against (t_m-eta)^(beta-1)
        i0 = _power_gaps(t, dt, m, beta) * g1
        i1 = beta * _power_gaps(t, dt, m, beta + 1.0) * g2
        s = (f[1 : m + 1] - f[:m]) / dt[:m]
        out[m] = np.sum(f[:m] * i0 + s * (a * i0 - i1))
    return out
