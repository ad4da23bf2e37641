"""Two-parameter Mittag-Leffler function on the non-positive real axis.

``E_{alpha,mu}(-x) = sum_n (-x)^n / Gamma(alpha n + mu)`` for ``0 < alpha <= 1``
and real ``mu``. Three evaluation regimes are available and the one with the
smallest error bound is returned:

* ``SERIES``: the defining power series with compensated summation, used while
  ``x**(1/alpha) <= 4`` so that cancellation stays harmless;
* ``ASYMPTOTIC``: the algebraic expansion ``-sum_k (-x)^-k / Gamma(mu - k alpha)``
  truncated where the Gamma-envelope of its terms is smallest;
* ``CONTOUR``: trapezoidal Laplace inversion of ``s^(alpha-mu)/(s^alpha + x)``
  along a parabolic Talbot-type contour, for the crossover band.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rgamma

from ._backend import ASYMPTOTIC, CONTOUR, SERIES, kernels
from .errors import ConvergenceError, DomainError

#: Largest error bound ml_eval accepts before raising ConvergenceError.
MAX_ERROR_BOUND = 1e-6

#: Empirical constant C with ``(1 + x) |E_{alpha,mu}(-x)| <= C`` over the scan
#: alpha in {0.3,0.5,0.7,0.9}, mu in {1, alpha+1, alpha+beta+1}, beta in
#: {0.3,0.6}, x in [0, 1e6]. The observed maximum is 1.262 (alpha=0.9,
#: mu=1.9); see
#: tests/test_mittag_leffler.py::test_bound_constant_scan.
ML_BOUND_CONSTANT = 1.5


class Regime(enum.IntEnum):
    SERIES = SERIES
    ASYMPTOTIC = ASYMPTOTIC
    CONTOUR = CONTOUR


@dataclass(frozen=True)
class MlParams:
    alpha: float
    mu: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu!r}")


@dataclass(frozen=True)
class MlEvalResult:
    value: float
    regime: Regime
    terms_used: int
    error_bound: float


def ml_bound_constant() -> float:
    """Return the module constant C of the bound |E(-x)| <= C / (1 + x)."""
    return ML_BOUND_CONSTANT


def recip_gamma(y):
    """1/Gamma(y), exactly 0 at the poles y = 0, -1, -2, ..."""
    y_arr = np.asarray(y, dtype=float)
    out = rgamma(y_arr)
    pole = (y_arr <= 0) & (y_arr == np.round(y_arr))
    out = np.where(pole, 0.0, out)
    if np.ndim(y) == 0:
        return float(out)
    return out


def _check_alpha(alpha: float):
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")


def ml_with_bounds(alpha: float, mu: float, x):
    """Vectorised evaluation returning ``(values, bounds, regimes, terms)``.

    ``x`` may have any shape; the outputs have the same shape.
    """
    _check_alpha(alpha)
    if not math.isfinite(mu):
        raise DomainError(f"mu must be finite, got {mu!r}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0) or not np.all(np.isfinite(x_arr)):
        raise DomainError("x must be finite and non-negative")
    v, b, r, n = kernels.ml_array(float(alpha), float(mu), x_arr.ravel())
    if b.size and b.max() > MAX_ERROR_BOUND:
        i = int(np.argmax(b))
        raise ConvergenceError(
            f"E_{{{alpha},{mu}}}(-{x_arr.ravel()[i]!r}): best error bound {b[i]:.3g}"
        )
    shape = x_arr.shape
    return v.reshape(shape), b.reshape(shape), r.reshape(shape), n.reshape(shape)


def ml_values(alpha: float, mu: float, x):
    """E_{alpha,mu}(-x), elementwise over ``x >= 0``."""
    v = ml_with_bounds(alpha, mu, x)[0]
    if np.ndim(x) == 0:
        return float(v)
    return v


def ml_eval(params: MlParams, x: float) -> MlEvalResult:
    """Evaluate E_{alpha,mu}(-x) with an error bound.

    >>> r = ml_eval(MlParams(1.0, 1.0), 1.0)
    >>> round(r.value, 10)
    0.3678794412
    """
    if not (x >= 0.0) or not math.isfinite(x):
        raise DomainError(f"x must be finite and non-negative, got {x!r}")
    v, b, r, n = ml_with_bounds(params.alpha, params.mu, np.array([x]))
    return MlEvalResult(float(v[0]), Regime(int(r[0])), int(n[0]), float(b[0]))


def ml_recurrence_residual(params: MlParams, x: float) -> float:
    """E_{a,mu}(-x) - [1/Gamma(mu) - x E_{a,mu+a}(-x)], zero in exact arithmetic."""
    lhs = ml_eval(params, x).value
    shifted = ml_eval(MlParams(params.alpha, params.mu + params.alpha), x).value
    return lhs - (recip_gamma(params.mu) - x * shifted)


def ml_asymptotic(params: MlParams, x: float, n: int) -> float:
    """The n-term algebraic expansion ``-sum_{k=1..n} (-x)^-k / Gamma(mu - k alpha)``."""
    if not (x > 0.0):
        raise DomainError(f"x must be positive, got {x!r}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    total = 0.0
    for k in range(1, n + 1):
        total -= (-x) ** (-k) * recip_gamma(params.mu - k * params.alpha)
    return total
