"""The operator A, represented by its eigenvalues, and coefficient-space norms.

Elements of H are handled as real coefficient vectors ``h_k = (h, v_k)``;
the k-th entry (0-based in arrays) is the component along the k-th
eigenfunction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DomainError


@dataclass(frozen=True)
class SpectrumSpec:
    """Positive, non-decreasing eigenvalues ``lambda_1 <= ... <= lambda_N``.

    Build with :meth:`power_law` (``lambda_k = c k^p``) or :meth:`explicit`.
    """

    kind: str
    truncation: int
    values: tuple = field(default=(), repr=False)
    c: float = 1.0
    p: float = 2.0

    def __post_init__(self):
        if self.truncation < 1:
            raise DomainError("spectrum truncation N must be >= 1")
        if self.kind == "power_law":
            if not (self.c > 0 and self.p > 0):
                raise DomainError("power-law spectrum needs c > 0 and p > 0")
        elif self.kind == "explicit":
            lam = np.asarray(self.values, dtype=float)
            if lam.size != self.truncation:
                raise DimensionMismatch(
                    f"explicit spectrum has {lam.size} values, truncation is {self.truncation}"
                )
            if np.any(~np.isfinite(lam)) or np.any(lam <= 0):
                raise DomainError("eigenvalues must be finite and positive")
            if np.any(np.diff(lam) < 0):
                raise DomainError("eigenvalues must be non-decreasing")
        else:
            raise DomainError(f"unknown spectrum kind {self.kind!r}")

    @classmethod
    def power_law(cls, n: int, c: float = 1.0, p: float = 2.0) -> "SpectrumSpec":
        return cls("power_law", int(n), c=float(c), p=float(p))

    @classmethod
    def explicit(cls, values) -> "SpectrumSpec":
        vals = tuple(float(v) for v in values)
        return cls("explicit", len(vals), values=vals)

    @property
    def eigenvalues(self) -> np.ndarray:
        if self.kind == "power_law":
            k = np.arange(1, self.truncation + 1, dtype=float)
            return self.c * k**self.p
        return np.asarray(self.values, dtype=float)

    def extended(self, k: np.ndarray) -> np.ndarray:
        """Eigenvalues for 1-based indices ``k`` possibly beyond N.

        Explicit lists are continued with their last value, which under-estimates
        a growing spectrum and therefore over-estimates tail bounds.
        """
        k = np.asarray(k, dtype=float)
        if self.kind == "power_law":
            return self.c * k**self.p
        lam = self.eigenvalues
        idx = np.clip(k.astype(int) - 1, 0, lam.size - 1)
        return lam[idx]

    def __len__(self):
        return self.truncation


def as_coeffs(spec: SpectrumSpec, h, name: str = "coefficients") -> np.ndarray:
    """Validate ``h`` against the truncation of ``spec`` and return a float array."""
    arr = np.asarray(h, dtype=float)
    if arr.ndim != 1 or arr.size != spec.truncation:
        raise DimensionMismatch(
            f"{name} has shape {arr.shape}, expected ({spec.truncation},)"
        )
    return arr


def sobolev_norm_sq(spec: SpectrumSpec, h, eps: float) -> float:
    """``||h||_eps^2 = sum_k lambda_k^(2 eps) |h_k|^2``."""
    arr = as_coeffs(spec, h)
    return float(np.sum(spec.eigenvalues ** (2.0 * eps) * arr**2))


def apply_power(spec: SpectrumSpec, h, eps: float) -> np.ndarray:
    """Coefficients of ``A^eps h``."""
    arr = as_coeffs(spec, h)
    if eps == 0:
        return arr.copy()
    return spec.eigenvalues**eps * arr
