"""Independent time-stepping reference for the mode equations.

Everything here works on sampled trajectories and never touches a
Mittag-Leffler function, so it can be used to check the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from ._backend import kernels
from .errors import DomainError

#: Grading exponents above this make the last step needlessly coarse.
MAX_GRADING = 10.0

SourceLike = Union[float, np.ndarray, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing nodes ``0 = t_0 < ... < t_M = T``."""

    nodes: np.ndarray
    grading: float = 1.0

    def __post_init__(self):
        t = np.asarray(self.nodes, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise DomainError("a time grid needs at least 2 nodes")
        if t[0] != 0.0:
            raise DomainError("the first grid node must be 0")
        if np.any(np.diff(t) <= 0):
            raise DomainError("grid nodes must be strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "nodes", t)

    @classmethod
    def uniform(cls, T: float, M: int) -> "TimeGrid":
        return cls.graded(T, M, 1.0)

    @classmethod
    def graded(cls, T: float, M: int, r: float) -> "TimeGrid":
        """Nodes ``t_m = T (m/M)^r``, clustered near 0 for ``r > 1``."""
        if not (T > 0) or M < 1 or not (r >= 1.0):
            raise DomainError("graded grid needs T > 0, M >= 1, r >= 1")
        s = np.arange(M + 1, dtype=float) / M
        t = T * s**r
        t[-1] = T
        return cls(t, float(r))

    @property
    def M(self) -> int:
        return self.nodes.size - 1

    @property
    def T(self) -> float:
        return float(self.nodes[-1])

    def coarsened(self) -> "TimeGrid":
        """Every other node; for graded grids with even M this is the M/2 grid."""
        if self.M % 2:
            raise DomainError("coarsening needs an even number of steps")
        return TimeGrid(self.nodes[::2], self.grading)


def grading_for(alpha: float) -> float:
    """Grading exponent restoring the L1 order for a ``t^alpha`` initial layer."""
    return min((2.0 - alpha) / alpha, MAX_GRADING)


def default_grid(alpha: float, T: float, M: int) -> TimeGrid:
    return TimeGrid.graded(T, M, grading_for(alpha))


@dataclass(frozen=True)
class OracleRun:
    grid: TimeGrid
    trajectory: np.ndarray
    residual_linf: float
    residual_late: float  # same residual restricted to t >= T/2
    observed_order: float
    deviation: float  # max |trajectory - half-resolution trajectory| on shared nodes


def _check_order(sigma: float):
    if not (0.0 < sigma < 1.0):
        raise DomainError(f"derivative order must lie in (0, 1), got {sigma!r}")


def caputo_l1(grid: TimeGrid, samples, sigma: float) -> np.ndarray:
    """L1 approximation of the Caputo derivative of order ``sigma`` at every node.

    The value at node 0 is returned as 0; callers that know ``D^sigma y(0)``
    should overwrite it.
    """
    _check_order(sigma)
    y = np.asarray(samples, dtype=float)
    if y.shape != grid.nodes.shape:
        raise DomainError(f"samples have shape {y.shape}, grid has {grid.nodes.shape}")
    return kernels.caputo_l1(grid.nodes, y, float(sigma))


def _sample_source(grid: TimeGrid, f: SourceLike):
    if callable(f):
        return np.asarray(f(grid.nodes), dtype=float) * np.ones(grid.nodes.size)
    arr = np.asarray(f, dtype=float)
    if arr.ndim == 0:
        return None
    if arr.shape != grid.nodes.shape:
        raise DomainError(f"source samples have shape {arr.shape}, grid has {grid.nodes.shape}")
    return arr


def _velocity_target(grid: TimeGrid, beta: float, y0: float, f: SourceLike):
    """y = y0 + I^beta f on the nodes, and the sampled f."""
    sampled = _sample_source(grid, f)
    if sampled is None:
        fc = float(f)
        y = y0 + fc * grid.nodes**beta / math.gamma(beta + 1.0)
        return y, np.full(grid.nodes.size, fc)
    return y0 + kernels.frac_integral_pl(grid.nodes, sampled, float(beta)), sampled


def _solve(alpha, beta, lam, b, psi, f, grid):
    y, f_s = _velocity_target(grid, beta, psi + lam * b, f)
    traj = kernels.l1_relaxation_solve(grid.nodes, y, float(alpha), float(lam), float(b))
    return traj, f_s


def mode_residual(alpha, beta, lam, psi, traj, f_samples, grid: TimeGrid):
    """``|D^beta(D^alpha traj + lam traj) - f|`` via L1 twice.

    Returns the max over nodes 2..M and the max over nodes with ``t >= T/2``.
    Near t = 0 the L1 error on a ``t^beta`` profile is a fixed fraction at the
    m-th node whatever the step, so only the second number shrinks under
    refinement.
    """
    inner = caputo_l1(grid, traj, alpha)
    inner[0] = psi
    inner = inner + lam * np.asarray(traj)
    outer = caputo_l1(grid, inner, beta)
    err = np.abs(outer - f_samples)
    if grid.M < 2:
        return 0.0, 0.0
    late = grid.nodes >= 0.5 * grid.T
    return float(np.max(err[2:])), float(np.max(err[late]))


def integrate_mode(
    alpha: float,
    beta: float,
    lambda_k: float,
    b_k: float,
    psi_k: float,
    f_k: SourceLike,
    grid: TimeGrid,
    *,
    with_order: bool = True,
) -> OracleRun:
    """Integrate ``D^beta(D^alpha T + lambda T) = f`` with ``T(0) = b``, ``D^alpha T(0) = psi``.

    ``f_k`` is a constant, an array of samples on ``grid``, or a callable
    evaluated at the nodes. Stage 1 forms ``y = psi + lambda b + I^beta f``
    (exact for constants, exact on the piecewise-linear interpolant
    otherwise); stage 2 solves ``D^alpha T + lambda T = y`` by implicit L1.

    With ``with_order`` the run is repeated on the two coarsenings of
    ``grid`` to report a self-convergence order.
    """
    _check_order(alpha)
    _check_order(beta)
    if lambda_k < 0:
        raise DomainError("lambda_k must be non-negative")
    traj, f_s = _solve(alpha, beta, lambda_k, b_k, psi_k, f_k, grid)
    residual, late = mode_residual(alpha, beta, lambda_k, psi_k, traj, f_s, grid)

    order = float("nan")
    deviation = float("nan")
    if with_order and grid.M % 4 == 0 and grid.M >= 8:
        g2 = grid.coarsened()
        g4 = g2.coarsened()
        f2 = f_k if np.ndim(f_k) == 0 or callable(f_k) else np.asarray(f_k)[::2]
        f4 = f_k if np.ndim(f_k) == 0 or callable(f_k) else np.asarray(f_k)[::4]
        t2, _ = _solve(alpha, beta, lambda_k, b_k, psi_k, f2, g2)
        t4, _ = _solve(alpha, beta, lambda_k, b_k, psi_k, f4, g4)
        deviation = float(np.max(np.abs(traj[::2] - t2)))
        d_coarse = float(np.max(np.abs(t2[::2] - t4)))
        if deviation > 0 and d_coarse > 0:
            order = math.log2(d_coarse / deviation)
        else:
            order = float("inf")
    return OracleRun(grid, traj, residual, late, order, deviation)
