"""Dissipative phonon swap: surviving fraction, threshold ratio, dressing
and the power-law range solver."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NumericalError


def surviving_fraction(G: float, gamma: float) -> float:
    """Expected molecular phonon fraction left after ``t = pi/2G`` with decay."""
    if not G > 0:
        raise DomainError(f"coupling must be positive, got {G}")
    if gamma < 0:
        raise DomainError(f"decay rate must be non-negative, got {gamma}")
    t_swap = math.pi / (2 * G)
    num = gamma**2 + 2 * G**2 * (-math.expm1(-gamma * t_swap))
    return num / (gamma**2 + 4 * G**2)


def _fraction_of_ratio(x: float) -> float:
    return surviving_fraction(x, 1.0)


@lru_cache(maxsize=256)
def critical_ratio(target: float = 0.05) -> float:
    """G/gamma at which the surviving fraction equals ``target``."""
    if not 0 < target < 1:
        raise DomainError(f"target must lie in (0, 1), got {target}")
    lo, hi = 1e-9, 1.0
    # the fraction tends to 1 as x -> 0 and to 0 as x -> infinity
    while _fraction_of_ratio(hi) > target:
        hi *= 2
        if hi > 1e12:
            raise NumericalError(f"no bracket for target {target}")
    if _fraction_of_ratio(lo) < target:
        raise NumericalError(f"no bracket for target {target}")
    return brentq(lambda x: _fraction_of_ratio(x) - target, lo, hi, xtol=1e-14, rtol=1e-13)


def sample_surviving_fraction(G: float, gamma: float, samples: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo estimate and its standard error.

    A decay at time t < t_swap freezes the molecule at cos^2(G t); runs
    that survive to t_swap end fully swapped.
    """
    rng = np.random.default_rng(seed)
    t = rng.exponential(1.0 / gamma, size=samples)
    vals = np.where(t < math.pi / (2 * G), np.cos(G * t) ** 2, 0.0)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


@dataclass(frozen=True)
class DressingSpec:
    rabi: float
    detuning: float

    @property
    def fraction(self) -> float:
        if self.detuning == 0:
            raise DomainError("dressing detuning must be non-zero")
        return self.rabi**2 / (4 * self.detuning**2)


@dataclass(frozen=True)
class DressedRates:
    G: float
    gamma: float
    ratio: float
    fraction: float


def dressed_rates(dress: DressingSpec, g_bare: float, gamma_r: float) -> DressedRates:
    f = dress.fraction
    if not 0 < f < 1:
        raise DomainError(f"dressing fraction {f:g} is outside the perturbative regime (0, 1)")
    if not gamma_r > 0:
        raise DomainError("Rydberg decay rate must be positive")
    G, gamma = f * g_bare, f * gamma_r
    ratio = g_bare / gamma_r
    if not math.isclose(G / gamma, ratio, rel_tol=1e-14):
        raise NumericalError("dressed ratio lost f-independence")
    return DressedRates(G, gamma, ratio, f)


@dataclass(frozen=True)
class RangeSpec:
    """G(r) = G_ref (r_ref / r)^p, with bare Rydberg decay gamma_r."""

    G_ref: float
    r_ref: float
    power: float
    gamma_r: float
    leroy_half: float = 0.0
    label: str = ""

    def __post_init__(self):
        for name in ("G_ref", "r_ref", "power", "gamma_r"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.leroy_half < 0:
            raise DomainError("leroy_half must be non-negative")

    @classmethod
    def from_ratio(cls, ratio: float, r_ref: float, power: float, leroy_half: float = 0.0, label: str = ""):
        """Build from a tabulated G/gamma_r value (gamma_r set to 1)."""
        return cls(ratio, r_ref, power, 1.0, leroy_half, label)

    def coupling(self, r: float) -> float:
        return self.G_ref * (self.r_ref / r) ** self.power


@dataclass(frozen=True)
class RangeReport:
    label: str
    r_095: float
    leroy_half: float
    feasible: bool
    threshold: float


def swap_range(spec: RangeSpec, threshold: float | None = None) -> RangeReport:
    """Largest distance at which G/gamma_r reaches ``threshold``.

    The default threshold is the solved 95 % ratio. ``feasible`` is False
    when the result lies inside half the LeRoy radius.
    """
    thr = critical_ratio(0.05) if threshold is None else threshold
    if not thr > 0:
        raise DomainError("threshold must be positive")
    r = spec.r_ref * (spec.G_ref / (thr * spec.gamma_r)) ** (1.0 / spec.power)
    return RangeReport(spec.label, r, spec.leroy_half, r >= spec.leroy_half, thr)


SCALING_EXPONENTS = {
    # kind: (ratio exponent in n at fixed r, r_095 exponent in n)
    "vdw": (7.0, 7.0 / 8.0),
    "dipolar": (5.0, 1.0),
    "hyperfine-vdw": (5.0, 1.0),
}


def scaling_project(value: float, n0: float, n: float, kind: str, mode: str = "fixed-r") -> float:
    """Project a ratio (``mode='fixed-r'``) or r_095 (``mode='r095'``) from n0 to n."""
    key = kind.lower().replace("_", "-")
    if key not in SCALING_EXPONENTS:
        raise DomainError(f"unknown interaction kind {kind!r}; expected one of {sorted(SCALING_EXPONENTS)}")
    if n < 1 or n0 < 1:
        raise DomainError("principal quantum numbers must be >= 1")
    ratio_exp, range_exp = SCALING_EXPONENTS[key]
    if mode == "fixed-r":
        return value * (n / n0) ** ratio_exp
    if mode == "r095":
        return value * (n / n0) ** range_exp
    raise DomainError(f"mode must be 'fixed-r' or 'r095', got {mode!r}")


@dataclass(frozen=True)
class RowConsistency:
    """Agreement of one table row's two (G, G/gamma_r) column pairs."""

    gamma_ref: float
    gamma_leroy: float
    gamma_mismatch: float
    implied_leroy_half: float
    leroy_mismatch: float


def table_row_consistency(
    G_ref: float, ratio_ref: float, G_leroy: float, ratio_leroy: float,
    leroy_half: float, power: float, r_ref: float = 1.0,
) -> RowConsistency:
    """Check a (G, ratio) pair at r_ref against one at half the LeRoy radius.

    Both pairs must imply the same gamma_r, and the power law must carry
    G_ref at r_ref to G_leroy at the tabulated ``leroy_half``. Mismatches
    are relative.
    """
    for v in (G_ref, ratio_ref, G_leroy, ratio_leroy, leroy_half, power, r_ref):
        if not v > 0:
            raise DomainError("table entries must be positive")
    g1, g2 = G_ref / ratio_ref, G_leroy / ratio_leroy
    r_implied = r_ref * (G_ref / G_leroy) ** (1.0 / power)
    return RowConsistency(g1, g2, g2 / g1 - 1, r_implied, r_implied / leroy_half - 1)
