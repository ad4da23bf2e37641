"""Forward non-local problem, solved mode by mode in closed form.

Each mode splits into a homogeneous part ``W_k`` (initial velocity and
non-local data) and a particular part ``V_k`` driven by the source:
``u_k(t) = W_k(t) + V_k(t)``, with ``Phi_k = phi_k - V_k(T)`` feeding the
non-local condition of ``W_k``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np
from scipy import integrate
from scipy.special import zeta

from .errors import DegenerateGamma, DimensionMismatch, DomainError, QuadratureError
from .mittag_leffler import ml_bound_constant, ml_with_bounds
from .oracle import TimeGrid, caputo_l1
from .spectral import SpectrumSpec, as_coeffs

#: |1 - gamma| below this is treated as gamma = 1.
GAMMA_ONE_TOL = 1e-12
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 200


@dataclass(frozen=True)
class DecayRule:
    """Coefficients ``c / k^p`` (1-based k), also used to bound the tail beyond N."""

    c: float
    p: float

    def expand(self, n: int) -> np.ndarray:
        k = np.arange(1, n + 1, dtype=float)
        return self.c / k**self.p

    def tail_l2(self, n: int) -> float:
        """sqrt(sum_{k>n} (c/k^p)^2); infinite unless p > 1/2."""
        if self.c == 0:
            return 0.0
        if self.p <= 0.5:
            return math.inf
        return abs(self.c) * math.sqrt(float(zeta(2.0 * self.p, n + 1)))


@dataclass(frozen=True)
class ConstantSource:
    f: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "f", np.asarray(self.f, dtype=float))


@dataclass(frozen=True)
class SampledSource:
    """``f_k(t)`` given at ``times`` (covering [0, T]), linearly interpolated.

    ``values`` has shape ``(N, len(times))``.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.atleast_2d(np.asarray(self.values, dtype=float))
        if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
            raise DomainError("source times must be strictly increasing with >= 2 entries")
        if v.shape[1] != t.size:
            raise DimensionMismatch(f"source values {v.shape} do not match {t.size} times")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def at(self, k: int, t):
        return np.interp(t, self.times, self.values[k])


Source = Union[ConstantSource, SampledSource]


@dataclass(frozen=True)
class ProblemSpec:
    alpha: float
    beta: float
    gamma: float
    T: float
    spectrum: SpectrumSpec
    phi: np.ndarray
    psi: np.ndarray
    source: Source
    decay: Mapping[str, DecayRule] = field(default_factory=dict)

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0 and 0.0 < self.beta < 1.0):
            raise DomainError("alpha and beta must lie in (0, 1)")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise DomainError("T must be positive and finite")
        if not math.isfinite(self.gamma):
            raise DomainError("gamma must be finite")
        object.__setattr__(self, "phi", as_coeffs(self.spectrum, self.phi, "phi"))
        object.__setattr__(self, "psi", as_coeffs(self.spectrum, self.psi, "psi"))
        if isinstance(self.source, ConstantSource):
            as_coeffs(self.spectrum, self.source.f, "f")
        elif isinstance(self.source, SampledSource):
            if self.source.values.shape[0] != self.spectrum.truncation:
                raise DimensionMismatch("sampled source must have one row per mode")
            if self.source.times[0] > 0 or self.source.times[-1] < self.T:
                raise DomainError("sampled source must cover [0, T]")
        else:
            raise DomainError("source must be ConstantSource or SampledSource")
        unknown = set(self.decay) - {"phi", "psi", "f"}
        if unknown:
            raise DomainError(f"decay rules given for unknown data {sorted(unknown)}")

    @property
    def n_modes(self) -> int:
        return self.spectrum.truncation

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues


def _check_mode(spec: ProblemSpec, k: int):
    if not (0 <= k < spec.n_modes):
        raise DomainError(f"mode index {k} outside 0..{spec.n_modes - 1}")


def _check_times(spec: ProblemSpec, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > spec.T * (1 + 1e-14)):
        raise DomainError("times must lie in [0, T]")
    return np.clip(t, 0.0, spec.T)


def _power_ml(alpha: float, mu: float, lam: float, t):
    """``t^(mu-1) E_{alpha,mu}(-lam t^alpha)`` and its propagated error bound."""
    t = np.asarray(t, dtype=float)
    v, b, _, _ = ml_with_bounds(alpha, mu, lam * t**alpha)
    scale = t ** (mu - 1.0)
    return scale * v, scale * b


def _kernel_quad(spec: ProblemSpec, k: int, t: float) -> float:
    """V_k(t) for a sampled source by adaptive quadrature.

    With ``s = (t - eta)^(a+b)`` the weight ``(t - eta)^(a+b-1)`` is absorbed
    and ``V = 1/(a+b) int_0^{t^(a+b)} E(-lam s^(a/(a+b))) f(t - s^(1/(a+b))) ds``.
    The source breakpoints become quadrature breakpoints.
    """
    a, b = spec.alpha, spec.beta
    ab = a + b
    lam = float(spec.eigenvalues[k])
    if t == 0.0:
        return 0.0
    src = spec.source
    upper = t**ab
    knots = src.times[(src.times > 0) & (src.times < t)]
    pts = np.sort((t - knots) ** ab)
    edges = np.concatenate(([0.0], pts, [upper]))

    def integrand(s):
        e = ml_with_bounds(a, ab, np.array([lam * s ** (a / ab)]))[0][0]
        return e * float(src.at(k, t - s ** (1.0 / ab)))

    total = 0.0
    err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi <= lo:
                continue
            try:
                val, e = integrate.quad(
                    integrand, lo, hi, epsabs=1e-13, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT
                )
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(f"mode {k}, t={t!r}: {exc}") from exc
            total += val
            err += e
    total /= ab
    if err / ab > 1e-8 * (1.0 + abs(total)):
        raise QuadratureError(f"mode {k}, t={t!r}: estimated error {err:.3g}")
    return total


def particular_mode(spec: ProblemSpec, k: int, t):
    """``V_k(t) = int_0^t (t-eta)^(a+b-1) E_{a,a+b}(-lam_k (t-eta)^a) f_k(eta) d eta``."""
    _check_mode(spec, k)
    tt = _check_times(spec, t)
    if isinstance(spec.source, ConstantSource):
        fk = float(spec.source.f[k])
        if fk == 0.0:
            out = np.zeros_like(tt)
        else:
            lam = float(spec.eigenvalues[k])
            out = fk * _power_ml(spec.alpha, spec.alpha + spec.beta + 1.0, lam, tt)[0]
    else:
        out = np.array([_kernel_quad(spec, k, float(x)) for x in np.atleast_1d(tt)])
        out = out.reshape(tt.shape)
    if np.ndim(t) == 0:
        return float(out)
    return out


def _check_gamma(gamma: float):
    if abs(1.0 - gamma) < GAMMA_ONE_TOL:
        raise DegenerateGamma("gamma = 1: solution not unique (b_k = gamma b_k holds for any b_k)")


def solve_b(spec: ProblemSpec, k: int, Phi_k: float) -> float:
    """``b_k = (Phi_k - psi_k T^a E_{a,a+1}(-lam_k T^a)) / (1 - gamma)``."""
    _check_mode(spec, k)
    _check_gamma(spec.gamma)
    lam = float(spec.eigenvalues[k])
    g = _power_ml(spec.alpha, spec.alpha + 1.0, lam, spec.T)[0]
    return float((Phi_k - spec.psi[k] * g) / (1.0 - spec.gamma))


def mode_trajectory(spec: ProblemSpec, k: int, b_k: float, t, form: str = "ii"):
    """Homogeneous mode ``W_k(t)`` with ``W_k(0) = b_k``.

    ``form="i"``: ``b E_{a,1}(-lam t^a) + (psi + lam b) t^a E_{a,a+1}(-lam t^a)``.
    ``form="ii"``: ``b + psi t^a E_{a,a+1}(-lam t^a)``, the same function after
    the recurrence ``E_{a,1}(-z) + z E_{a,a+1}(-z) = 1``; exact for constants.
    """
    _check_mode(spec, k)
    tt = _check_times(spec, t)
    lam = float(spec.eigenvalues[k])
    psi = float(spec.psi[k])
    a = spec.alpha
    g1 = _power_ml(a, a + 1.0, lam, tt)[0]
    if form == "ii":
        _check_gamma(spec.gamma)
        out = b_k + psi * g1
    elif form == "i":
        e1 = _power_ml(a, 1.0, lam, tt)[0]
        out = b_k * e1 + (psi + lam * b_k) * g1
    else:
        raise DomainError(f"unknown form {form!r}")
    if np.ndim(t) == 0:
        return float(out)
    return out


def mode_form_bound(spec: ProblemSpec, k: int, b_k: float, t):
    """Combined ML error bound of the two forms of ``W_k`` at ``t``."""
    tt = _check_times(spec, t)
    lam = float(spec.eigenvalues[k])
    a = spec.alpha
    psi = float(spec.psi[k])
    b1 = _power_ml(a, a + 1.0, lam, tt)[1]
    b0 = _power_ml(a, 1.0, lam, tt)[1]
    return abs(b_k) * b0 + (abs(psi) + lam * abs(b_k)) * b1 + abs(psi) * b1


@dataclass(frozen=True)
class ModeSolution:
    spec: ProblemSpec = field(repr=False)
    k: int
    lambda_k: float
    b_k: float
    phi_cap_k: float
    v_T: float

    def eval(self, t, form: str = "ii"):
        """Homogeneous mode W_k(t)."""
        return mode_trajectory(self.spec, self.k, self.b_k, t, form=form)

    def particular(self, t):
        return particular_mode(self.spec, self.k, t)

    def u(self, t):
        """Full mode ``u_k(t) = W_k(t) + V_k(t)``."""
        return self.eval(t) + self.particular(t)


@dataclass(frozen=True)
class ForwardSolution:
    t: np.ndarray
    modes: list
    u: np.ndarray  # shape (N, len(t))
    norm: np.ndarray  # ||u(t)||
    norm1: np.ndarray  # ||u(t)||_1 = ||A u(t)||
    nonlocal_residual: float  # ||u(T) - gamma u(0) - phi||
    tail: np.ndarray  # truncation tail estimate per t


def _tail_estimate(spec: ProblemSpec, t: np.ndarray) -> np.ndarray:
    """Bound on ``||sum_{k>N} u_k(t) v_k||`` from the data decay rules.

    Uses ``|E| <= C`` termwise, so each mode is bounded by
    ``C[(|phi_k| + |f_k| T^(a+b) + |psi_k| T^a)/|1-gamma| + |psi_k| t^a + |f_k| t^(a+b)]``.
    Without decay rules the data is exactly zero beyond N.
    """
    if not spec.decay:
        return np.zeros_like(t)
    c = ml_bound_constant()
    n = spec.n_modes
    a, ab = spec.alpha, spec.alpha + spec.beta
    g = abs(1.0 - spec.gamma)
    tail = {name: rule.tail_l2(n) for name, rule in spec.decay.items()}
    phi = tail.get("phi", 0.0)
    psi = tail.get("psi", 0.0)
    f = tail.get("f", 0.0) if isinstance(spec.source, ConstantSource) else 0.0
    return c * ((phi + f * spec.T**ab + psi * spec.T**a) / g + psi * t**a + f * t**ab)


def solve_forward(spec: ProblemSpec, t_grid) -> ForwardSolution:
    """Solve every mode and assemble ``u`` on ``t_grid`` (which must contain 0 and T)."""
    _check_gamma(spec.gamma)
    t = _check_times(spec, t_grid)
    if t.ndim != 1 or t.size == 0:
        raise DomainError("t_grid must be a non-empty 1-d sequence")
    if not (np.any(t == 0.0) and np.any(np.isclose(t, spec.T, rtol=1e-14, atol=0))):
        raise DomainError("t_grid must include 0 and T")
    lam = spec.eigenvalues
    n = spec.n_modes
    u = np.empty((n, t.size))
    modes = []
    u0 = np.empty(n)
    uT = np.empty(n)
    for k in range(n):
        v_t = particular_mode(spec, k, t)
        v_T = particular_mode(spec, k, spec.T)
        phi_cap = float(spec.phi[k] - v_T)
        b = solve_b(spec, k, phi_cap)
        m = ModeSolution(spec, k, float(lam[k]), b, phi_cap, v_T)
        modes.append(m)
        u[k] = m.eval(t) + v_t
        u0[k] = b  # W_k(0) = b_k, V_k(0) = 0
        uT[k] = m.eval(spec.T) + v_T
    norm = np.sqrt(np.sum(u**2, axis=0))
    norm1 = np.sqrt(np.sum((lam[:, None] * u) ** 2, axis=0))
    resid = float(np.linalg.norm(uT - spec.gamma * u0 - spec.phi))
    return ForwardSolution(t, modes, u, norm, norm1, resid, _tail_estimate(spec, t))


@dataclass(frozen=True)
class CoerciveReport:
    t: np.ndarray  # positive nodes only
    weighted: np.ndarray  # t^(2 rho) (||D^b D^a u||^2 + ||D^b u||_1^2)
    sup: float
    rho: float


def coercive_report(spec: ProblemSpec, solution: ForwardSolution, t_grid=None) -> CoerciveReport:
    """Empirical ``sup_t t^(2 rho) (||D^b(D^a u)||^2 + ||D^b u||_1^2)`` with ``rho = beta``.

    Derivatives are L1 approximations on ``t_grid`` (default: the solution's
    grid, which must then start at 0). Node 0 is excluded from the sup.
    """
    grid = TimeGrid(solution.t if t_grid is None else np.asarray(t_grid, dtype=float))
    t = grid.nodes
    if t_grid is None:
        u = solution.u
    else:
        u = np.array([m.u(t) for m in solution.modes])
    a, b = spec.alpha, spec.beta
    lam = spec.eigenvalues
    lhs = np.zeros(t.size)
    for k in range(spec.n_modes):
        da = caputo_l1(grid, u[k], a)
        da[0] = spec.psi[k]
        dba = caputo_l1(grid, da, b)
        db = caputo_l1(grid, u[k], b)
        lhs += dba**2 + (lam[k] * db) ** 2
    rho = b
    weighted = t[1:] ** (2 * rho) * lhs[1:]
    return CoerciveReport(t[1:], weighted, float(np.max(weighted)), rho)


@dataclass(frozen=True)
class NonUniquenessWitness:
    """Two homogeneous solutions of the gamma = 1 problem with identical data."""

    t: np.ndarray
    b_values: tuple
    Phi_k: float
    trajectories: np.ndarray  # shape (2, len(t))
    nonlocal_residuals: tuple  # |W(T) - W(0) - Phi_k| for each


def gamma_one_witness(
    spec: ProblemSpec, k: int = 0, b_values=(0.0, 1.0), t_grid: Optional[np.ndarray] = None
) -> NonUniquenessWitness:
    """Exhibit two distinct ``W_k`` solving the homogeneous problem when gamma = 1.

    With ``gamma = 1`` the non-local condition reads
    ``b_k = b_k + Phi_k - psi_k T^a E_{a,a+1}(-lam T^a)``, so any ``b_k`` works
    once ``Phi_k`` takes that compatible value.
    """
    _check_mode(spec, k)
    if abs(1.0 - spec.gamma) >= GAMMA_ONE_TOL:
        raise DomainError("the non-uniqueness witness needs gamma = 1")
    t = np.linspace(0.0, spec.T, 65) if t_grid is None else _check_times(spec, t_grid)
    lam = float(spec.eigenvalues[k])
    psi = float(spec.psi[k])
    phi_cap = psi * float(_power_ml(spec.alpha, spec.alpha + 1.0, lam, spec.T)[0])
    trajs = []
    res = []
    for b in b_values:
        w = mode_trajectory(spec, k, b, t, form="i")
        w_T = mode_trajectory(spec, k, b, spec.T, form="i")
        trajs.append(w)
        res.append(abs(w_T - b - phi_cap))
    return NonUniquenessWitness(
        t, tuple(b_values), phi_cap, np.array(trajs), tuple(res)
    )
