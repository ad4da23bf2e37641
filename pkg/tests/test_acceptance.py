"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected into an "acceptance criteria" section of the
pytest terminal summary.
"""

from __future__ import annotations

import time

import numpy as np
from scipy import integrate

from fraclangevin.cli import EXIT_GAMMA_ONE, EXIT_NON_UNIQUE, EXIT_UNSOLVABLE, main
from fraclangevin.errors import DegenerateGamma
from fraclangevin.forward import ConstantSource, ProblemSpec, gamma_one_witness, solve_forward
from fraclangevin.inverse import (
    InverseRegime,
    asymptotic_ratio_diagnostic,
    classify,
    classify_params,
    observation_residual,
    recover_source,
)
from fraclangevin.mittag_leffler import (
    MlParams,
    ml_asymptotic,
    ml_bound_constant,
    ml_eval,
    ml_recurrence_residual,
    ml_values,
)
from fraclangevin.oracle import TimeGrid, caputo_l1, default_grid, integrate_mode
from fraclangevin.problem_file import load_problem
from fraclangevin.spectral import SpectrumSpec
from problems import ENG, FIXTURES, roundtrip_instance, write_toml


def one_mode(alpha, beta, gamma, lam, phi=1.0, psi=1.0, f=1.0, T=1.0):
    return ProblemSpec(alpha, beta, gamma, T, SpectrumSpec.explicit([lam]), np.array([phi]),
                       np.array([psi]), ConstantSource(np.array([f])))


# -- 1 ---------------------------------------------------------------------

def _late_l1_error(fun, deriv, sigma, M):
    g = TimeGrid.uniform(1.0, M)
    d = caputo_l1(g, fun(g.nodes), sigma)
    late = g.nodes >= 0.5
    return float(np.max(np.abs(d[late] - deriv(g.nodes[late]))))


def test_ml_identity_suite(verdict):
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    failures = []

    # recurrence E_{a,mu}(-x) = 1/Gamma(mu) - x E_{a,mu+a}(-x) within the combined bounds
    for _ in range(1000):
        alpha, mu, x = rng.uniform(0.1, 1.0), rng.uniform(0.2, 3.0), 10.0 ** rng.uniform(-3, 5)
        tol = ml_eval(MlParams(alpha, mu), x).error_bound + x * ml_eval(MlParams(alpha, mu + alpha), x).error_bound
        if abs(ml_recurrence_residual(MlParams(alpha, mu), x)) > tol + 1e-12:
            failures.append(("recurrence", alpha, mu, x))

    # integral identity, adaptive quadrature with the algebraic endpoint weight
    for _ in range(40):
        alpha, mu, lam, t = rng.uniform(0.2, 1.0), rng.uniform(0.5, 2.0), rng.uniform(0.1, 100), rng.uniform(0.05, 2)
        fun = lambda eta: ml_eval(MlParams(alpha, mu), lam * eta**alpha).value
        val, err = integrate.quad(fun, 0.0, t, weight="alg", wvar=(mu - 1.0, 0.0), epsabs=1e-12, epsrel=1e-11, limit=200)
        closed = ml_eval(MlParams(alpha, mu + 1.0), lam * t**alpha)
        if abs(val - t**mu * closed.value) > 10 * err + t**mu * closed.error_bound + 1e-10:
            failures.append(("integral", alpha, mu, lam, t))

    # derivative identities through the L1 scheme, first order or better at late times
    for alpha in (0.3, 0.5, 0.7):
        lam = 4.0
        fun = lambda t: ml_values(alpha, 1.0, lam * t**alpha)
        errs = [_late_l1_error(fun, lambda t: -lam * fun(t), alpha, M) for M in (256, 1024, 4096)]
        if errs[-1] >= 1e-2 * lam or np.any(np.log2(np.divide(errs[:-1], errs[1:])) / 2 < 0.8):
            failures.append(("relaxation derivative", alpha, errs))
        for sigma in (0.3, 0.6):
            for mu in (alpha + 1.0, 2.0, alpha + 1.5):
                f1 = lambda t: t ** (mu - 1) * ml_values(alpha, mu, 2.0 * t**alpha)
                d1 = lambda t: t ** (mu - sigma - 1) * ml_values(alpha, mu - sigma, 2.0 * t**alpha)
                errs = [_late_l1_error(f1, d1, sigma, M) for M in (128, 512, 2048)]
                if errs[-1] >= 1e-3 or np.any(np.log2(np.divide(errs[:-1], errs[1:])) / 2 < 0.8):
                    failures.append(("power derivative", alpha, sigma, mu, errs))

    # two-term asymptotic expansion, x >= 50
    for _ in range(500):
        alpha, mu, x = rng.uniform(0.3, 0.9), rng.uniform(1.0, 3.0), 10.0 ** rng.uniform(np.log10(50), 6)
        if abs(ml_asymptotic(MlParams(alpha, mu), x, 2) - ml_values(alpha, mu, x)) > 5 * x**-3:
            failures.append(("asymptotic", alpha, mu, x))

    # |E_{a,mu}(-x)| <= C / (1 + x) on the working range
    x = np.concatenate(([0.0], np.logspace(-3, 6, 300)))
    worst = 0.0
    for alpha in (0.3, 0.5, 0.7, 0.9):
        for mu in (1.0, alpha + 1.0, alpha + 1.3, alpha + 1.6):
            worst = max(worst, float(np.max((1.0 + x) * np.abs(ml_values(alpha, mu, x)))))
    if worst > ml_bound_constant():
        failures.append(("bound scan", worst))

    elapsed = time.perf_counter() - start
    verdict("1 ML identity suite", not failures and elapsed < 30,
            f"{len(failures)} failures, bound scan max {worst:.4f} <= C = {ml_bound_constant()}, {elapsed:.1f} s")


# -- 2 ---------------------------------------------------------------------

def test_forward_oracle_equivalence(verdict):
    start = time.perf_counter()
    worst, monotone = 0.0, True
    for alpha in (0.3, 0.5, 0.7):
        for beta in (0.3, 0.5, 0.7):
            for lam in (1.0, 10.0, 100.0):
                spec = one_mode(alpha, beta, -1.0, lam, phi=1.0, psi=1.0, f=1.0)
                errs = []
                for M in (1024, 2048, 4096):
                    grid = default_grid(alpha, 1.0, M)
                    sol = solve_forward(spec, grid.nodes)
                    run = integrate_mode(alpha, beta, lam, sol.modes[0].b_k, 1.0, 1.0, grid, with_order=False)
                    errs.append(np.max(np.abs(run.trajectory - sol.u[0])) / np.max(np.abs(sol.u[0])))
                worst = max(worst, errs[-1])
                monotone &= errs[0] > errs[1] > errs[2]
    elapsed = time.perf_counter() - start
    verdict("2 forward oracle equivalence (27 combinations)", worst <= 1e-3 and monotone and elapsed < 300,
            f"max rel L-inf {worst:.2e} at 4096 steps, decreasing={monotone}, {elapsed:.1f} s")


# -- 3 ---------------------------------------------------------------------

def test_nonlocal_condition(verdict):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(200):
        alpha, beta = rng.uniform(0.05, 0.95, 2)
        gamma = rng.uniform(-5, 5)
        if abs(1 - gamma) < 1e-3:
            continue
        n = 6
        T = rng.uniform(0.1, 5.0)
        spec = ProblemSpec(alpha, beta, gamma, T, SpectrumSpec.power_law(n, rng.uniform(0.1, 10), 2.0),
                           rng.uniform(-3, 3, n), rng.uniform(-3, 3, n), ConstantSource(rng.uniform(-3, 3, n)))
        sol = solve_forward(spec, np.linspace(0, T, 5))
        worst = max(worst, sol.nonlocal_residual / (1 + np.linalg.norm(spec.phi)))
    verdict("3 non-local condition", worst <= 1e-6, f"max ||u(T)-g u(0)-phi||/(1+||phi||) = {worst:.2e} over 200 solves")


# -- 4 ---------------------------------------------------------------------

def test_constant_solution(verdict):
    worst = 0.0
    for alpha in (0.1, 0.5, 0.9):
        for beta in (0.1, 0.5, 0.9):
            for gamma in (-10.0, -1.0, 0.0, 0.5, 0.999, 1.5, 10.0):
                phi = np.array([1.0, -2.0, 0.5, 3.0])
                spec = ProblemSpec(alpha, beta, gamma, 2.0, SpectrumSpec.power_law(4, 1.0, 2.0),
                                   phi, np.zeros(4), ConstantSource(np.zeros(4)))
                sol = solve_forward(spec, np.linspace(0, 2.0, 21))
                worst = max(worst, float(np.max(np.abs(sol.u - (phi / (1 - gamma))[:, None]))))
    verdict("4 constant-solution exactness", worst <= 1e-10, f"max deviation {worst:.2e}")


# -- 5 ---------------------------------------------------------------------

def test_inverse_round_trip(verdict):
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    worst, regimes = 0.0, set()
    for _ in range(100):
        spec, f = roundtrip_instance(rng)
        res = recover_source(spec, verify=False)
        regimes.add(res.classification.regime)
        worst = max(worst, float(np.max(np.abs(res.f - f) / np.abs(f))))
    elapsed = time.perf_counter() - start
    both = regimes == {InverseRegime.GAMMA_ABOVE_ONE, InverseRegime.GAMMA_BELOW_ONE_STRICT}
    verdict("5 inverse round-trip (100 instances)", worst <= 1e-8 and both and elapsed < 120,
            f"max per-mode relative error {worst:.2e}, {elapsed:.1f} s")


# -- 6 ---------------------------------------------------------------------

def test_regime_scans(verdict):
    lam = np.arange(1, 10001, dtype=float) ** 2
    cuts = (100, 1000, 10000)
    above = [classify_params(0.5, 0.5, 2.0, 0.5, 1.0, lam[:n]).lower_bound_constant for n in cuts]
    degen, labelled = [], True
    for gamma in (0.0, 1.0 - 2.0**0.5):  # interior and boundary of the degenerate regime
        cs = [classify_params(0.5, 0.5, gamma, 0.5, 1.0, lam[:n]) for n in cuts]
        labelled &= all(c.regime is InverseRegime.DEGENERATE for c in cs)
        degen.append([c.lower_bound_constant for c in cs])
    stable = lambda xs: xs[-1] > 0 and xs[-1] >= 0.99 * xs[0]
    ok = labelled and stable(above) and all(stable(d) for d in degen)
    verdict("6 regime scans", ok,
            f"min lam|D| = {above[-1]:.4f} (g=2); min lam^2|D| = {degen[0][-1]:.4f} (g=0), "
            f"{degen[1][-1]:.4f} (boundary) for k <= 1e4")


# -- 7 ---------------------------------------------------------------------

def test_asymptotic_constant(verdict):
    lam = np.arange(1, 501, dtype=float) ** 2
    d = asymptotic_ratio_diagnostic(0.4, 0.6, 0.5, 1.0, lam)
    verdict("7 ratio asymptotic constant P", d.relative_gap <= 0.05,
            f"P_fit {d.P_fit:.7f} vs {d.P_formula:.7f}, gap {d.relative_gap:.1e}")


# -- 8 ---------------------------------------------------------------------

def test_dichotomy_fixtures(verdict, tmp_path):
    path = write_toml(tmp_path / "eng.toml", FIXTURES["engineered"]())
    code = main(["inverse", "--input", str(path), "--out", str(tmp_path / "a"), "--quiet"])
    spec = load_problem(path).inverse_spec()
    res = recover_source(spec)
    k0 = ENG["k0"]
    residuals = []
    for value in (0.0, 1.0):
        f = res.f.copy()
        f[k0] = value
        residuals.append(observation_residual(spec, f))
    bad = write_toml(tmp_path / "bad.toml", FIXTURES["engineered_unsolvable"]())
    code_bad = main(["inverse", "--input", str(bad), "--out", str(tmp_path / "b"), "--quiet"])
    ok = (code == EXIT_NON_UNIQUE and code_bad == EXIT_UNSOLVABLE and classify(spec).K0 == (k0,)
          and max(residuals) <= 1e-10)
    verdict("8 non-uniqueness / unsolvable fixtures", ok,
            f"exit {code} and {code_bad}; f_{k0 + 1} in (0, 1) both give ||u(t0)-omega|| <= {max(residuals):.1e}")


# -- 9 ---------------------------------------------------------------------

def test_gamma_one(verdict, tmp_path, capsys):
    spec = one_mode(0.5, 0.5, 1.0, 3.0, phi=0.0, psi=0.8, f=0.0)
    try:
        solve_forward(spec, [0.0, 1.0])
        message = ""
    except DegenerateGamma as exc:
        message = str(exc)
    path = write_toml(tmp_path / "g1.toml", FIXTURES["gamma_one"]())
    code = main(["forward", "--input", str(path)])
    err = capsys.readouterr().err
    wit = gamma_one_witness(spec, 0, (0.0, 2.0))
    gap = float(np.max(np.abs(wit.trajectories[0] - wit.trajectories[1])))
    ok = ("gamma = 1: solution not unique" in message and code == EXIT_GAMMA_ONE
          and "gamma = 1: solution not unique" in err and gap > 0 and max(wit.nonlocal_residuals) <= 1e-12)
    verdict("9 gamma = 1 degeneracy", ok, f"CLI exit {code}; witness pair differs by {gap:.3g}")


# -- 10 --------------------------------------------------------------------

def test_cli_determinism(verdict, tmp_path):
    jobs = [(name, "inverse" if "roundtrip" in name or "engineered" in name else "forward")
            for name in FIXTURES if name != "gamma_one"]
    jobs.append(("full", "verify"))
    same = []
    for name, command in jobs:
        path = write_toml(tmp_path / f"{name}.toml", FIXTURES[name]())
        blobs = []
        for run in ("a", "b"):
            out = tmp_path / f"{name}-{command}-{run}"
            main([command, "--input", str(path), "--out", str(out), "--quiet"])
            csv = out / f"{command}.csv"
            blobs.append(csv.read_bytes() if csv.exists() else b"")
        same.append(blobs[0] == blobs[1])
    verdict("10 CLI determinism", all(same), f"{sum(same)}/{len(same)} fixture runs byte-identical")
