"""Recovery of a time-independent source from the observation ``u(t0) = omega``.

Mode by mode the observation gives ``f_k Delta_k = N_k`` with

    Delta_k = (1-g) t0^(a+b) E_{a,a+b+1}(-lam t0^a) - T^(a+b) E_{a,a+b+1}(-lam T^a)
    N_k     = (1-g) omega_k - phi_k
              + psi_k (T^a E_{a,a+1}(-lam T^a) - (1-g) t0^a E_{a,a+1}(-lam t0^a))

Modes with ``Delta_k = 0`` (the set K0) leave ``f_k`` free, provided ``N_k = 0``.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import (
    DegenerateGamma,
    DimensionMismatch,
    DomainError,
    IllConditioned,
    InsufficientSpectrum,
    Unsolvable,
)
from .forward import GAMMA_ONE_TOL, ConstantSource, ProblemSpec, solve_forward
from .mittag_leffler import ml_with_bounds
from .spectral import SpectrumSpec, as_coeffs

#: Relative size of a K0 numerator still accepted as zero.
SOLVABILITY_TOL = 1e-9
#: |Delta_k| below this times lambda_k^-2 triggers IllConditioned.
ILL_CONDITIONED = 1e-8
#: Asymptotic fit: eigenvalues used must reach this, and the window is the top share.
FIT_MIN_LAMBDA = 1e3
FIT_TOP_SHARE = 0.2


class InverseRegime(enum.Enum):
    GAMMA_ABOVE_ONE = "GammaAboveOne"
    GAMMA_BELOW_ONE_STRICT = "GammaBelowOneStrict"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class InverseSpec:
    """Forward data (its source is ignored) plus the observation time and value."""

    forward: ProblemSpec
    t0: float
    omega: np.ndarray

    def __post_init__(self):
        if not (0.0 < self.t0 < self.forward.T):
            raise DomainError(f"need 0 < t0 < T, got t0={self.t0!r}, T={self.forward.T!r}")
        object.__setattr__(self, "omega", as_coeffs(self.forward.spectrum, self.omega, "omega"))


def with_source(spec: ProblemSpec, f) -> ProblemSpec:
    """Copy of ``spec`` with a constant-in-time source ``f``."""
    return dataclasses.replace(spec, source=ConstantSource(as_coeffs(spec.spectrum, f, "f")))


def _terms(alpha, beta, t, lam):
    """``t^(a+b) E_{a,a+b+1}(-lam t^a)`` with its error bound."""
    lam = np.asarray(lam, dtype=float)
    v, b, _, _ = ml_with_bounds(alpha, alpha + beta + 1.0, lam * t**alpha)
    s = t ** (alpha + beta)
    return s * v, s * b


def _check_times(t0, T):
    if not (0.0 < t0 < T):
        raise DomainError(f"need 0 < t0 < T, got t0={t0!r}, T={T!r}")


def delta_k(alpha, beta, gamma, t0, T, lambda_k):
    """The mode denominator Delta_k; vectorised over ``lambda_k``."""
    _check_times(t0, T)
    a0, _ = _terms(alpha, beta, t0, lambda_k)
    aT, _ = _terms(alpha, beta, T, lambda_k)
    out = (1.0 - gamma) * a0 - aT
    if np.ndim(lambda_k) == 0:
        return float(out)
    return out


def k0_threshold(alpha, beta, gamma, t0, T, lambda_k):
    """Per-mode level below which ``|Delta_k|`` counts as zero.

    The fixed level ``1e-12 (1 + t0^(a+b) + T^(a+b))``, lowered to ``1e-12`` times the
    size of the two cancelling terms; otherwise modes whose Delta_k merely decays
    like ``lambda^-2`` would be swept into K0 for large k.
    """
    a0, _ = _terms(alpha, beta, t0, lambda_k)
    aT, _ = _terms(alpha, beta, T, lambda_k)
    fixed = 1e-12 * (1.0 + t0 ** (alpha + beta) + T ** (alpha + beta))
    return np.minimum(fixed, 1e-12 * (abs(1.0 - gamma) * a0 + aT))


def zero_crossing_window(alpha, beta, t0, T):
    """Open interval of ``1 - gamma`` values for which some lambda > 0 gives Delta = 0.

    The ratio ``T^(a+b) E(-lam T^a) / (t0^(a+b) E(-lam t0^a))`` moves monotonically
    from ``(T/t0)^(a+b)`` at lam = 0 to ``(T/t0)^b`` as lam grows.
    """
    q = T / t0
    return q**beta, q ** (alpha + beta)


@dataclass(frozen=True)
class InverseClassification:
    regime: InverseRegime
    K0: tuple  # 0-based mode indices with Delta_k numerically zero
    delta_values: np.ndarray
    lower_bound_constant: float
    zero_crossing_possible: bool

    @property
    def unique(self) -> bool:
        return not self.K0


def _regime(beta, gamma, t0, T) -> InverseRegime:
    if gamma > 1.0:
        return InverseRegime.GAMMA_ABOVE_ONE
    # the boundary T^b = t0^b |g-1| belongs to the degenerate case; keep it there
    # when rounding lands on the wrong side
    if T**beta < t0**beta * abs(gamma - 1.0) * (1.0 - 1e-12):
        return InverseRegime.GAMMA_BELOW_ONE_STRICT
    return InverseRegime.DEGENERATE


def classify_params(alpha, beta, gamma, t0, T, eigenvalues) -> InverseClassification:
    """Classification from the scalar parameters and an eigenvalue array."""
    _check_times(t0, T)
    lam = np.asarray(eigenvalues, dtype=float)
    regime = _regime(beta, gamma, t0, T)
    delta = delta_k(alpha, beta, gamma, t0, T, lam)
    k0 = np.flatnonzero(np.abs(delta) <= k0_threshold(alpha, beta, gamma, t0, T, lam))
    lo, hi = zero_crossing_window(alpha, beta, t0, T)
    crossing = gamma < 1.0 and lo < 1.0 - gamma < hi
    keep = np.ones(lam.size, dtype=bool)
    keep[k0] = False
    power = 2.0 if regime is InverseRegime.DEGENERATE else 1.0
    if keep.any():
        lower = float(np.min(lam[keep] ** power * np.abs(delta[keep])))
    else:
        lower = 0.0
    return InverseClassification(regime, tuple(int(i) for i in k0), delta, lower, bool(crossing))


def classify(spec: InverseSpec) -> InverseClassification:
    p = spec.forward
    return classify_params(p.alpha, p.beta, p.gamma, spec.t0, p.T, p.eigenvalues)


def numerators(spec: InverseSpec):
    """``N_k`` for every mode and a per-mode magnitude scale for tolerance checks."""
    p = spec.forward
    a = p.alpha
    g = 1.0 - p.gamma
    lam = p.eigenvalues
    eT = p.T**a * ml_with_bounds(a, a + 1.0, lam * p.T**a)[0]
    e0 = spec.t0**a * ml_with_bounds(a, a + 1.0, lam * spec.t0**a)[0]
    psi_term = eT - g * e0
    num = g * spec.omega - p.phi + p.psi * psi_term
    scale = 1.0 + abs(g) * np.abs(spec.omega) + np.abs(p.phi) + np.abs(p.psi * eT) + abs(g) * np.abs(p.psi * e0)
    return num, scale


@dataclass(frozen=True)
class InverseResult:
    f: np.ndarray
    classification: InverseClassification
    free_indices: tuple
    condition_numbers: np.ndarray  # |1-gamma| / |Delta_k|, amplification of omega errors
    numerators: np.ndarray
    observation_residual: float  # ||u(t0) - omega|| after a forward solve with f

    @property
    def unique(self) -> bool:
        return not self.free_indices


def observation_residual(spec: InverseSpec, f) -> float:
    """``||u(t0) - omega||`` for the forward problem driven by ``f``."""
    fwd = with_source(spec.forward, f)
    sol = solve_forward(fwd, np.array([0.0, spec.t0, fwd.T]))
    return float(np.linalg.norm(sol.u[:, 1] - spec.omega))


def recover_source(spec: InverseSpec, *, verify: bool = True) -> InverseResult:
    """Recover ``f``; free modes (K0) get ``f_k = 0``.

    Raises Unsolvable when a K0 mode has a non-zero numerator and warns with
    IllConditioned when some ``|Delta_k| < 1e-8 lambda_k^-2``.
    """
    p = spec.forward
    if abs(1.0 - p.gamma) < GAMMA_ONE_TOL:
        raise DegenerateGamma("gamma = 1: solution not unique, the inverse problem is not posed")
    cls = classify(spec)
    num, scale = numerators(spec)
    delta = cls.delta_values
    lam = p.eigenvalues
    k0 = np.array(cls.K0, dtype=int)
    bad = [int(k) for k in k0 if abs(num[k]) > SOLVABILITY_TOL * scale[k]]
    if bad:
        raise Unsolvable(
            "solvability condition violated at modes " + ", ".join(str(k + 1) for k in bad),
            bad,
        )
    f = np.zeros(p.n_modes)
    cond = np.full(p.n_modes, np.inf)
    free = np.zeros(p.n_modes, dtype=bool)
    free[k0] = True
    f[~free] = num[~free] / delta[~free]
    cond[~free] = max(abs(1.0 - p.gamma), 1.0) / np.abs(delta[~free])
    weak = np.flatnonzero(~free & (np.abs(delta) < ILL_CONDITIONED / lam**2))
    if weak.size:
        warnings.warn(
            IllConditioned(
                "small Delta_k at modes "
                + ", ".join(str(k + 1) for k in weak)
                + f"; max condition number {np.max(cond[weak]):.3g}"
            ),
            stacklevel=2,
        )
    resid = observation_residual(spec, f) if verify else float("nan")
    return InverseResult(f, cls, tuple(int(k) for k in k0), cond, num, resid)


@dataclass(frozen=True)
class AsymptoticDiagnostic:
    P_fit: float
    P_formula: float  # -Gamma(b+1)/Gamma(b-a+1) (t0^-a - T^-a)
    P_printed: float  # the same magnitude with the opposite sign
    limit: float  # (t0/T)^b
    lambdas: np.ndarray  # fit window
    ratios: np.ndarray
    residuals: np.ndarray  # r_k - limit (1 + P_fit / lambda_k) over the window
    relative_gap: float  # |P_fit - P_formula| / |P_formula|
    reduced_confidence: bool  # beta <= alpha


def ratio_values(alpha, beta, t0, T, lam):
    a0, _ = _terms(alpha, beta, t0, lam)
    aT, _ = _terms(alpha, beta, T, lam)
    return a0 / aT


def asymptotic_ratio_diagnostic(alpha, beta, t0, T, spectrum) -> AsymptoticDiagnostic:
    """Fit ``r_k = (t0/T)^b (1 + P / lambda_k)`` over the largest eigenvalues.

    The window is the top 20% of the spectrum restricted to ``lambda >= 1e3``;
    weights ``lambda^2`` suppress the ``O(lambda^-2)`` remainder.
    """
    _check_times(t0, T)
    lam = spectrum.eigenvalues if isinstance(spectrum, SpectrumSpec) else np.asarray(spectrum, float)
    if lam.ndim != 1 or lam.size == 0:
        raise DimensionMismatch("spectrum must be a non-empty 1-d sequence")
    n_top = max(int(math.ceil(FIT_TOP_SHARE * lam.size)), 1)
    window = np.sort(lam)[-n_top:]
    window = window[window >= FIT_MIN_LAMBDA]
    if window.size < 3:
        raise InsufficientSpectrum(
            f"need at least 3 eigenvalues >= {FIT_MIN_LAMBDA:g} in the top {FIT_TOP_SHARE:.0%}"
        )
    limit = (t0 / T) ** beta
    r = ratio_values(alpha, beta, t0, T, window)
    y = r / limit - 1.0
    w = window  # sqrt of the lambda^2 weights
    design = (w / window)[:, None]
    P_fit = float(np.linalg.lstsq(design, w * y, rcond=None)[0][0])
    mag = gamma_fn(beta + 1.0) / gamma_fn(beta - alpha + 1.0) * (t0**-alpha - T**-alpha)
    P_formula = -float(mag)
    resid = r - limit * (1.0 + P_fit / window)
    gap = abs(P_fit - P_formula) / abs(P_formula)
    return AsymptoticDiagnostic(
        P_fit, P_formula, float(mag), limit, window, r, resid, gap, beta <= alpha
    )


def engineer_zero_gamma(alpha, beta, t0, T, lam_star: float) -> float:
    """The gamma for which ``Delta = 0`` at ``lambda = lam_star``."""
    _check_times(t0, T)
    a0, _ = _terms(alpha, beta, t0, lam_star)
    aT, _ = _terms(alpha, beta, T, lam_star)
    return float(1.0 - aT / a0)
