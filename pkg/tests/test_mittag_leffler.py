from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import erfcx

from fraclangevin.errors import DomainError
from fraclangevin.mittag_leffler import (
    ML_BOUND_CONSTANT,
    MlParams,
    Regime,
    ml_asymptotic,
    ml_bound_constant,
    ml_eval,
    ml_recurrence_residual,
    ml_values,
    ml_with_bounds,
    recip_gamma,
)
from fraclangevin.oracle import TimeGrid, caputo_l1

from mp_oracle import ml_mp

# frozen from mp_oracle.ml_mp (40 digits)
E_HALF_1_AT_1 = 0.42758357615580700441
E_07_17_AT_1E4_HALF = 0.000099994358104192731916  # E_{0.5,1.5}(-1e4)
E_07_17_AT_200 = 0.0049916095425993395878  # E_{0.7,1.7}(-200)


@pytest.mark.parametrize(
    "alpha, mu, x, expected, tol",
    [
        (0.7, 1.7, 0.0, 1.0 / math.gamma(1.7), 1e-15),
        (1.0, 1.0, 1.0, math.exp(-1.0), 1e-15),
        (0.5, 1.0, 1.0, float(erfcx(1.0)), 1e-14),
        (0.5, 1.0, 1.0, E_HALF_1_AT_1, 1e-14),
        (0.5, 1.5, 1e4, E_07_17_AT_1E4_HALF, 1e-17),
        (0.7, 1.7, 200.0, E_07_17_AT_200, 1e-16),
        (1.0, 1.0, 30.0, math.exp(-30.0), 1e-15),
    ],
)
def test_ml_eval_examples(alpha, mu, x, expected, tol):
    r = ml_eval(MlParams(alpha, mu), x)
    assert abs(r.value - expected) <= tol
    assert abs(r.value - expected) <= r.error_bound + 1e-16


def test_erfc_identity_against_continued_fraction():
    # e^(x^2) erfc(x) from mpmath's own erfc at high precision, independent of the series
    for x in [0.1, 0.5, 1.0, 2.0, 5.0, 20.0]:
        with mp.workdps(30):
            ref = float(mp.exp(mp.mpf(x) ** 2) * mp.erfc(x))
        assert ml_values(0.5, 1.0, x) == pytest.approx(ref, rel=1e-13)


def _reference_points():
    pts = []
    for alpha in [0.1, 0.25, 0.5, 0.75, 0.9, 1.0]:
        for mu in [0.3, 1.0, alpha + 1.0, 1.9, 2.7]:
            for x in [1e-3, 0.3, 1.0, 3.0, 12.0, 60.0, 400.0, 5e3, 1e5]:
                pts.append((alpha, mu, x))
    return pts


@pytest.mark.slow
def test_error_bound_holds_against_mpmath():
    worst = 0.0
    for alpha, mu, x in _reference_points():
        r = ml_eval(MlParams(alpha, mu), x)
        ref = float(ml_mp(alpha, mu, x, dps=30))
        err = abs(r.value - ref)
        # 1e-30 covers the absolute accuracy of the 30-digit reference itself
        assert err <= r.error_bound + 1e-30, (alpha, mu, x, r)
        worst = max(worst, err)
    assert worst < 1e-12


@pytest.mark.parametrize("alpha", np.linspace(0.1, 1.0, 10))
@pytest.mark.parametrize("mu", [0.5, 1.0, 1.5, 2.0, 3.0])
def test_no_convergence_failure_on_working_range(alpha, mu):
    x = np.concatenate(([0.0], np.logspace(-4, 6, 400)))
    v, b, _, _ = ml_with_bounds(alpha, mu, x)
    assert np.all(np.isfinite(v))
    assert np.all(b <= 1e-6)
    assert np.all(b[x <= 1.0] <= 1e-10)


def test_regimes_are_reported():
    assert ml_eval(MlParams(0.5, 1.0), 0.5).regime is Regime.SERIES
    assert ml_eval(MlParams(0.5, 1.0), 1e4).regime is Regime.ASYMPTOTIC
    r = ml_eval(MlParams(0.9, 1.0), 40.0)
    assert r.regime in (Regime.CONTOUR, Regime.ASYMPTOTIC)
    assert r.terms_used >= 1


def test_bound_constant_scan():
    x = np.concatenate(([0.0], np.logspace(-3, 6, 300)))
    worst = 0.0
    for alpha in [0.3, 0.5, 0.7, 0.9]:
        mus = [1.0, alpha + 1.0] + [alpha + beta + 1.0 for beta in (0.3, 0.6)]
        for mu in mus:
            worst = max(worst, float(np.max((1.0 + x) * np.abs(ml_values(alpha, mu, x)))))
    assert worst <= ml_bound_constant() == ML_BOUND_CONSTANT
    assert ML_BOUND_CONSTANT <= 5.0
    assert worst == pytest.approx(1.262, abs=5e-3)


@pytest.mark.parametrize("alpha, x_max", [(0.3, 1e5), (0.5, 1e5), (0.7, 1e5), (0.9, 1e5), (1.0, 20.0)])
def test_mu_one_completely_monotone_surrogate(alpha, x_max):
    # at alpha = 1 the value e^-x drops below absolute rounding beyond x ~ 30
    x = np.concatenate(([0.0], np.logspace(-3, np.log10(x_max), 200)))
    v = ml_values(alpha, 1.0, x)
    assert v[0] == 1.0
    assert np.all(v > 0)
    assert np.all(np.diff(v) < 0)


@pytest.mark.parametrize(
    "alpha, mu, x, bound",
    [(0.5, 1.0, 0.0, 0.0), (0.7, 1.2, 3.5, 1e-9), (1.0, 1.0, 2.0, 1e-12)],
)
def test_recurrence_examples(alpha, mu, x, bound):
    assert abs(ml_recurrence_residual(MlParams(alpha, mu), x)) <= bound


def test_recurrence_random_grid():
    rng = np.random.default_rng(20240617)
    for _ in range(1000):
        alpha = rng.uniform(0.1, 1.0)
        mu = rng.uniform(0.2, 3.0)
        x = 10.0 ** rng.uniform(-3, 5)
        p = MlParams(alpha, mu)
        res = ml_recurrence_residual(p, x)
        tol = ml_eval(p, x).error_bound + x * ml_eval(MlParams(alpha, mu + alpha), x).error_bound
        assert abs(res) <= tol + 1e-12, (alpha, mu, x, res, tol)


def test_recurrence_high_precision_example():
    # both sides from the independent mpmath series
    lhs = ml_mp(0.7, 1.2, 3.5, dps=40)
    with mp.workdps(50):
        rhs = mp.rgamma(mp.mpf(1.2)) - mp.mpf(3.5) * ml_mp(0.7, 1.9, 3.5, dps=40)
    assert abs(float(lhs - rhs)) < 1e-30
    assert ml_values(0.7, 1.2, 3.5) == pytest.approx(float(lhs), abs=1e-14)


def test_asymptotic_examples():
    assert ml_asymptotic(MlParams(0.5, 1.0), 100.0, 1) == pytest.approx(0.01 / math.sqrt(math.pi), rel=1e-14)
    assert abs(ml_asymptotic(MlParams(0.5, 1.5), 1e4, 2) - ml_values(0.5, 1.5, 1e4)) <= 1e-10
    assert abs(ml_asymptotic(MlParams(0.7, 1.7), 200.0, 2) - ml_values(0.7, 1.7, 200.0)) <= 5 * 200.0**-3


@settings(max_examples=200, deadline=None)
@given(
    alpha=st.floats(0.3, 0.9),
    mu=st.floats(1.0, 3.0),
    x=st.floats(50.0, 1e6),
)
def test_asymptotic_two_terms_within_cubic(alpha, mu, x):
    diff = abs(ml_asymptotic(MlParams(alpha, mu), x, 2) - ml_values(alpha, mu, x))
    assert diff <= 5.0 * x**-3


def test_asymptotic_pole_terms_vanish():
    # mu - k alpha = 0 at k = 2: that term contributes nothing
    one = ml_asymptotic(MlParams(0.5, 1.0), 50.0, 1)
    assert ml_asymptotic(MlParams(0.5, 1.0), 50.0, 2) == one


def test_asymptotic_domain():
    with pytest.raises(DomainError):
        ml_asymptotic(MlParams(0.5, 1.0), 0.0, 2)
    with pytest.raises(DomainError):
        ml_asymptotic(MlParams(0.5, 1.0), 1.0, 0)


@pytest.mark.parametrize("alpha", [0.0, -0.1, 1.1, float("nan")])
def test_bad_alpha(alpha):
    with pytest.raises(DomainError):
        MlParams(alpha, 1.0)


def test_bad_x():
    with pytest.raises(DomainError):
        ml_eval(MlParams(0.5, 1.0), -1.0)
    with pytest.raises(DomainError):
        ml_values(0.5, 1.0, [1.0, float("inf")])


def test_recip_gamma_examples():
    assert recip_gamma(1.0) == 1.0
    assert recip_gamma(0.0) == 0.0
    assert recip_gamma(0.5) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)
    assert np.all(recip_gamma(np.array([-1.0, -2.0, -50.0])) == 0.0)


def test_recip_gamma_accuracy():
    ys = np.concatenate((np.linspace(-169.7, 169.7, 997), [0.25, 1e-8, -1e-8, 171.5]))
    ys = ys[np.abs(ys - np.round(ys)) > 1e-9]
    for y in ys:
        with mp.workdps(30):
            ref = mp.rgamma(mp.mpf(float(y)))
        got = recip_gamma(float(y))
        assert abs(got - float(ref)) <= 1e-13 * abs(float(ref)), y


@settings(max_examples=50, deadline=None)
@given(
    alpha=st.floats(0.2, 1.0),
    mu=st.floats(0.5, 2.0),
    lam=st.floats(0.1, 100.0),
    t=st.floats(0.05, 2.0),
)
def test_integral_identity(alpha, mu, lam, t):
    # int_0^t eta^(mu-1) E_{a,mu}(-lam eta^a) d eta = t^mu E_{a,mu+1}(-lam t^a)
    f = lambda eta: ml_eval(MlParams(alpha, mu), lam * eta**alpha).value
    val, err = integrate.quad(f, 0.0, t, weight="alg", wvar=(mu - 1.0, 0.0), epsabs=1e-12, epsrel=1e-11, limit=200)
    closed = ml_eval(MlParams(alpha, mu + 1.0), lam * t**alpha)
    assert abs(val - t**mu * closed.value) <= 10 * err + t**mu * closed.error_bound + 1e-10


def _l1_error(fun, deriv, sigma, M, T=1.0):
    g = TimeGrid.uniform(T, M)
    d = caputo_l1(g, fun(g.nodes), sigma)
    late = g.nodes >= T / 2
    return float(np.max(np.abs(d[late] - deriv(g.nodes[late]))))


@pytest.mark.parametrize("alpha, lam", [(0.3, 1.0), (0.5, 4.0), (0.7, 10.0)])
def test_derivative_of_relaxation_function(alpha, lam):
    # D^a E_{a,1}(-lam t^a) = -lam E_{a,1}(-lam t^a)
    fun = lambda t: ml_values(alpha, 1.0, lam * t**alpha)
    errs = [_l1_error(fun, lambda t: -lam * fun(t), alpha, M) for M in (256, 1024, 4096)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:])) / 2
    assert errs[-1] < 1e-2 * lam
    assert np.all(orders >= 0.8), (errs, orders)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("sigma", [0.3, 0.6])
@pytest.mark.parametrize("mu_kind", ["alpha+1", "2", "alpha+beta+1"])
def test_derivative_identity_power_ml(alpha, sigma, mu_kind):
    # D^s [t^(mu-1) E_{a,mu}(-lam t^a)] = t^(mu-s-1) E_{a,mu-s}(-lam t^a) for mu > 1
    mu = {"alpha+1": alpha + 1.0, "2": 2.0, "alpha+beta+1": alpha + 0.5 + 1.0}[mu_kind]
    lam = 2.0
    fun = lambda t: t ** (mu - 1) * ml_values(alpha, mu, lam * t**alpha)
    deriv = lambda t: t ** (mu - sigma - 1) * ml_values(alpha, mu - sigma, lam * t**alpha)
    errs = [_l1_error(fun, deriv, sigma, M) for M in (128, 512, 2048)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:])) / 2
    assert errs[-1] < 1e-3
    assert np.all(orders >= 0.8), (errs, orders)
