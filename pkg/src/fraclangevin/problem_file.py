"""Strict TOML problem files.

Layout::

    [problem]   alpha, beta, gamma, T, t0 (inverse only)
    [spectrum]  kind = "power_law" (c, p) or "explicit" (values); N
    [data]      phi, psi, f, omega: list of N numbers or a rule "c/k^p";
                f_mode = "constant" | "sampled" with f_times and f_table
    [output]    count or nodes; steps; tol

Unknown sections or keys are rejected.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import DomainError
from .forward import ConstantSource, DecayRule, ProblemSpec, SampledSource
from .inverse import InverseSpec
from .spectral import SpectrumSpec

ALLOWED = {
    "problem": {"alpha", "beta", "gamma", "T", "t0"},
    "spectrum": {"kind", "N", "c", "p", "values"},
    "data": {"phi", "psi", "f", "omega", "f_mode", "f_times", "f_table"},
    "output": {"count", "nodes", "steps", "tol"},
}
REQUIRED = {
    "problem": {"alpha", "beta", "gamma", "T"},
    "spectrum": {"kind", "N"},
}
DEFAULT_COUNT = 11
DEFAULT_STEPS = 4096
DEFAULT_TOL = 1e-3

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_RULE = re.compile(rf"^\s*({_NUM})\s*/\s*k\s*\^\s*({_NUM})\s*$")


class ProblemFileError(DomainError):
    pass


def parse_rule(text: str) -> DecayRule:
    """Parse ``"c/k^p"``, e.g. ``"1/k^2"`` or ``"0.5 / k^1.5"``."""
    m = _RULE.match(text)
    if not m:
        raise ProblemFileError(f"cannot parse coefficient rule {text!r}; expected 'c/k^p'")
    return DecayRule(float(m.group(1)), float(m.group(2)))


def _number(section: str, key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProblemFileError(f"[{section}] {key} must be a number, got {value!r}")
    return float(value)


def _numbers(section: str, key: str, value) -> np.ndarray:
    if not isinstance(value, list):
        raise ProblemFileError(f"[{section}] {key} must be a list of numbers")
    return np.array([_number(section, key, v) for v in value], dtype=float)


@dataclass(frozen=True)
class ProblemFile:
    alpha: float
    beta: float
    gamma: float
    T: float
    spectrum: SpectrumSpec
    phi: np.ndarray
    psi: np.ndarray
    source: object
    decay: dict
    t0: Optional[float] = None
    omega: Optional[np.ndarray] = None
    nodes: np.ndarray = field(default_factory=lambda: np.empty(0))
    steps: int = DEFAULT_STEPS
    tol: float = DEFAULT_TOL

    def forward_spec(self) -> ProblemSpec:
        return ProblemSpec(
            self.alpha, self.beta, self.gamma, self.T, self.spectrum,
            self.phi, self.psi, self.source, self.decay,
        )

    def inverse_spec(self) -> InverseSpec:
        if self.t0 is None or self.omega is None:
            raise ProblemFileError("an inverse problem needs [problem] t0 and [data] omega")
        base = ProblemSpec(
            self.alpha, self.beta, self.gamma, self.T, self.spectrum,
            self.phi, self.psi, ConstantSource(np.zeros(self.spectrum.truncation)),
        )
        return InverseSpec(base, self.t0, self.omega)


def _coeffs(data: dict, key: str, n: int, decay: dict, default_zero: bool = True):
    if key not in data:
        if default_zero:
            return np.zeros(n)
        return None
    value = data[key]
    if isinstance(value, str):
        rule = parse_rule(value)
        decay[key] = rule
        return rule.expand(n)
    arr = _numbers("data", key, value)
    if arr.size != n:
        raise ProblemFileError(f"[data] {key} has {arr.size} entries, N is {n}")
    return arr


def _spectrum(sec: dict) -> SpectrumSpec:
    n = sec["N"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise ProblemFileError("[spectrum] N must be an integer")
    kind = sec["kind"]
    if kind == "power_law":
        if "values" in sec:
            raise ProblemFileError("[spectrum] values is only used with kind = 'explicit'")
        c = _number("spectrum", "c", sec.get("c", 1.0))
        p = _number("spectrum", "p", sec.get("p", 2.0))
        return SpectrumSpec.power_law(n, c, p)
    if kind == "explicit":
        if "c" in sec or "p" in sec:
            raise ProblemFileError("[spectrum] c and p are only used with kind = 'power_law'")
        if "values" not in sec:
            raise ProblemFileError("[spectrum] explicit kind needs values")
        vals = _numbers("spectrum", "values", sec["values"])
        if vals.size != n:
            raise ProblemFileError(f"[spectrum] values has {vals.size} entries, N is {n}")
        return SpectrumSpec.explicit(vals)
    raise ProblemFileError(f"[spectrum] unknown kind {kind!r}")


def _source(data: dict, n: int, decay: dict):
    mode = data.get("f_mode", "constant")
    if mode == "constant":
        if "f_times" in data or "f_table" in data:
            raise ProblemFileError("f_times/f_table need f_mode = 'sampled'")
        return ConstantSource(_coeffs(data, "f", n, decay))
    if mode == "sampled":
        if "f" in data:
            raise ProblemFileError("with f_mode = 'sampled' give f_table, not f")
        if "f_times" not in data or "f_table" not in data:
            raise ProblemFileError("f_mode = 'sampled' needs f_times and f_table")
        times = _numbers("data", "f_times", data["f_times"])
        table = data["f_table"]
        if not isinstance(table, list) or len(table) != n:
            raise ProblemFileError(f"[data] f_table must have N = {n} rows")
        rows = [_numbers("data", "f_table", row) for row in table]
        if any(r.size != times.size for r in rows):
            raise ProblemFileError("every f_table row must match f_times in length")
        return SampledSource(times, np.array(rows))
    raise ProblemFileError(f"[data] unknown f_mode {mode!r}")


def parse_problem(doc: dict) -> ProblemFile:
    """Validate a parsed TOML document and build a ProblemFile."""
    for name, sec in doc.items():
        if name not in ALLOWED:
            raise ProblemFileError(f"unknown section [{name}]")
        if not isinstance(sec, dict):
            raise ProblemFileError(f"[{name}] must be a table")
        extra = set(sec) - ALLOWED[name]
        if extra:
            raise ProblemFileError(f"unknown key(s) in [{name}]: {', '.join(sorted(extra))}")
    for name, keys in REQUIRED.items():
        missing = keys - set(doc.get(name, {}))
        if missing:
            raise ProblemFileError(f"missing key(s) in [{name}]: {', '.join(sorted(missing))}")

    prob = doc["problem"]
    alpha, beta, gamma, T = (_number("problem", k, prob[k]) for k in ("alpha", "beta", "gamma", "T"))
    t0 = _number("problem", "t0", prob["t0"]) if "t0" in prob else None
    spectrum = _spectrum(doc["spectrum"])
    n = spectrum.truncation
    data = doc.get("data", {})
    decay: dict = {}
    phi = _coeffs(data, "phi", n, decay)
    psi = _coeffs(data, "psi", n, decay)
    source = _source(data, n, decay)
    omega = _coeffs(data, "omega", n, {}, default_zero=False)

    out = doc.get("output", {})
    if "count" in out and "nodes" in out:
        raise ProblemFileError("[output] give either count or nodes, not both")
    if "nodes" in out:
        nodes = _numbers("output", "nodes", out["nodes"])
    else:
        count = out.get("count", DEFAULT_COUNT)
        if isinstance(count, bool) or not isinstance(count, int) or count < 2:
            raise ProblemFileError("[output] count must be an integer >= 2")
        nodes = np.linspace(0.0, T, count)
    steps = out.get("steps", DEFAULT_STEPS)
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 8:
        raise ProblemFileError("[output] steps must be an integer >= 8")
    tol = _number("output", "tol", out.get("tol", DEFAULT_TOL))

    pf = ProblemFile(alpha, beta, gamma, T, spectrum, phi, psi, source, decay, t0, omega, nodes, steps, tol)
    pf.forward_spec()  # runs the ProblemSpec invariants at parse time
    if t0 is not None and not (0.0 < t0 < T):
        raise ProblemFileError(f"[problem] t0 must satisfy 0 < t0 < T, got {t0!r}")
    return pf


def load_problem(path) -> ProblemFile:
    try:
        with open(Path(path), "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ProblemFileError(f"{path}: {exc}") from exc
    return parse_problem(doc)
