"""Qubit fidelity after a swap whose interaction deviates from identity.

The qubit branches |0~> and |1~> displace the molecular phonon mode to
coherent amplitudes +eps*sqrt(n) and -eps*sqrt(n), so tracing out the phonons
damps the qubit coherence by their overlap.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class QubitPhononInput:
    a: complex
    b: complex
    n: float
    epsilon: float

    def __post_init__(self):
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1) > 1e-12:
            raise DomainError(f"|a|^2 + |b|^2 = {norm!r}, expected 1")
        if not self.n >= 0:
            raise DomainError(f"phonon number must be non-negative, got {self.n}")
        if not math.isfinite(self.epsilon):
            raise DomainError("epsilon must be finite")

    @classmethod
    def from_population(cls, a2: float, n: float, epsilon: float, phase: float = 0.0) -> "QubitPhononInput":
        if not 0 <= a2 <= 1:
            raise DomainError(f"|a|^2 must lie in [0, 1], got {a2}")
        return cls(math.sqrt(a2), cmath.exp(1j * phase) * math.sqrt(1 - a2), n, epsilon)


def reduced_density_matrix(inp: QubitPhononInput) -> np.ndarray:
    damp = math.exp(-2 * inp.n * inp.epsilon**2)
    a, b = inp.a, inp.b
    return np.array(
        [[abs(a) ** 2, a * b.conjugate() * damp], [a.conjugate() * b * damp, abs(b) ** 2]],
        dtype=complex,
    )


@dataclass(frozen=True)
class FidelityResult:
    exact: float
    linearized: float

    @property
    def difference(self) -> float:
        return self.exact - self.linearized

    def __float__(self) -> float:
        return self.exact


def fidelity(inp: QubitPhononInput) -> FidelityResult:
    """``1 - 4|a|^2(1-|a|^2) exp(-x) sinh(x)`` with ``x = n eps^2``."""
    p = abs(inp.a) ** 2
    x = inp.n * inp.epsilon**2
    weight = 4 * p * (1 - p)
    # exp(-x) sinh(x) = -expm1(-2x)/2, accurate for tiny x
    exact = 1 - weight * (-math.expm1(-2 * x) / 2)
    return FidelityResult(exact, 1 - weight * x)


def coherent_overlap(alpha: complex, beta: complex) -> complex:
    """<alpha|beta> for coherent states."""
    return cmath.exp(-abs(alpha - beta) ** 2 / 2 + 1j * (alpha.conjugate() * beta).imag)


def coherent_oracle(inp: QubitPhononInput) -> np.ndarray:
    """Reduced qubit matrix rebuilt from explicit coherent-state overlaps.

    The atom mode carries the same amplitude in both branches, so its
    overlap is 1 and is kept only for completeness.
    """
    shift = inp.epsilon * math.sqrt(inp.n)
    amp_atom = math.sqrt(max(0.0, (1 - inp.epsilon) * inp.n))
    branches = [(inp.a, complex(shift)), (inp.b, complex(-shift))]
    rho = np.zeros((2, 2), dtype=complex)
    for i, (ci, mi) in enumerate(branches):
        for j, (cj, mj) in enumerate(branches):
            # rho_ij = c_i c_j^* <m_j|m_i> <atom|atom>
            rho[i, j] = ci * cj.conjugate() * coherent_overlap(mj, mi) * coherent_overlap(amp_atom, amp_atom)
    return rho


def target_fidelity(inp: QubitPhononInput, rho: np.ndarray) -> float:
    psi = np.array([inp.a, inp.b], dtype=complex)
    return float(np.real(psi.conj() @ rho @ psi))
