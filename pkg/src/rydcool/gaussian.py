"""Exact Gaussian-state dynamics of the quadratic atom/molecule chain.

Modes are ordered atoms first (0..N-1), then molecules (N..2N-1). Phase-space
vectors list all positions then all momenta, with x = (b + b^dag)/sqrt2 and
p = -i(b - b^dag)/sqrt2, so [x, p] = i and the vacuum covariance is I/2.

A quadratic form is ``H = 1/2 x^T Vx x + 1/2 p^T Vp p + l^T x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, InstabilityError, NumericalError

STABILITY_FLOOR = 1e-12


@dataclass(frozen=True)
class ChainSpec:
    """Two parallel chains of N atoms and N molecules.

    Couplings are in internal frequency units; ``eta`` is the ratio of the
    in-chain spacing to the chain-chain separation.
    """

    N: int
    G_am: float
    G_aa: float = 0.0
    G_mm: float = 0.0
    eta: float = 1.0
    alpha: float = 6.0
    omega_z: float = 50.0
    initial_molecule_occupation: float = 20.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"chain length must be a positive integer, got {self.N}")
        if not self.eta > 0:
            raise DomainError(f"eta must be positive, got {self.eta}")
        if not self.omega_z > 0:
            raise DomainError(f"trap frequency must be positive, got {self.omega_z}")
        if self.G_am == 0:
            raise DomainError("G_am must be non-zero to define a swap time")
        if self.initial_molecule_occupation < 0:
            raise DomainError("initial occupation must be non-negative")

    @property
    def swap_time(self) -> float:
        return math.pi / (2 * abs(self.G_am))


@dataclass(frozen=True)
class QuadraticForm:
    position_matrix: np.ndarray
    momentum_matrix: np.ndarray
    linear_positions: Optional[np.ndarray] = None

    def __post_init__(self):
        vx = np.asarray(self.position_matrix, dtype=float)
        vp = np.asarray(self.momentum_matrix, dtype=float)
        if vx.ndim != 2 or vx.shape[0] != vx.shape[1] or vp.shape != vx.shape:
            raise DomainError("position and momentum matrices must be square and equal-sized")
        if not (np.allclose(vx, vx.T, atol=0, rtol=1e-14) and np.allclose(vp, vp.T, atol=0, rtol=1e-14)):
            raise DomainError("quadratic form matrices must be symmetric")
        lin = np.zeros(vx.shape[0]) if self.linear_positions is None else np.asarray(self.linear_positions, float)
        if lin.shape != (vx.shape[0],):
            raise DomainError("linear term has the wrong length")
        object.__setattr__(self, "position_matrix", vx)
        object.__setattr__(self, "momentum_matrix", vp)
        object.__setattr__(self, "linear_positions", lin)

    @property
    def mode_count(self) -> int:
        return self.position_matrix.shape[0]

    @property
    def stable(self) -> bool:
        return (
            np.linalg.eigvalsh(self.position_matrix)[0] > STABILITY_FLOOR
            and np.linalg.eigvalsh(self.momentum_matrix)[0] > STABILITY_FLOOR
        )

    def hamiltonian_matrix(self) -> np.ndarray:
        n = self.mode_count
        h = np.zeros((2 * n, 2 * n))
        h[:n, :n] = self.position_matrix
        h[n:, n:] = self.momentum_matrix
        return h

    def flow_matrix(self) -> np.ndarray:
        return symplectic_form(self.mode_count) @ self.hamiltonian_matrix()

    def propagator(self, t: float) -> np.ndarray:
        if not math.isfinite(t):
            raise DomainError(f"evolution time must be finite, got {t}")
        if not self.stable:
            raise InstabilityError("quadratic form is not positive definite; refusing to evolve")
        return expm(self.flow_matrix() * t)

    def equilibrium(self) -> np.ndarray:
        n = self.mode_count
        xi = np.zeros(2 * n)
        if np.any(self.linear_positions):
            xi[:n] = -np.linalg.solve(self.position_matrix, self.linear_positions)
        return xi

    def energy(self, state: "GaussianState") -> float:
        """Expectation value of H in ``state``."""
        h = self.hamiltonian_matrix()
        mu = state.mean
        n = self.mode_count
        return float(
            0.5 * np.sum(h * state.covariance) + 0.5 * mu @ h @ mu + self.linear_positions @ mu[:n]
        )


def symplectic_form(n_modes: int) -> np.ndarray:
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.covariance, dtype=float)
        if mu.ndim != 1 or mu.size % 2 or cov.shape != (mu.size, mu.size):
            raise DomainError("state needs a 2n mean vector and a 2n x 2n covariance")
        object.__setattr__(self, "mean", mu)
        object.__setattr__(self, "covariance", cov)

    @property
    def mode_count(self) -> int:
        return self.mean.size // 2

    @classmethod
    def vacuum(cls, n_modes: int) -> "GaussianState":
        return cls(np.zeros(2 * n_modes), np.eye(2 * n_modes) / 2)

    @classmethod
    def thermal(cls, occupations) -> "GaussianState":
        occ = np.asarray(occupations, dtype=float)
        if np.any(occ < 0):
            raise DomainError("occupations must be non-negative")
        d = np.concatenate([occ, occ]) + 0.5
        return cls(np.zeros(2 * occ.size), np.diag(d))

    @classmethod
    def coherent(cls, occupations) -> "GaussianState":
        """Coherent states with real amplitudes sqrt(n), i.e. <x> = sqrt(2n)."""
        occ = np.asarray(occupations, dtype=float)
        if np.any(occ < 0):
            raise DomainError("occupations must be non-negative")
        mean = np.concatenate([np.sqrt(2 * occ), np.zeros(occ.size)])
        return cls(mean, np.eye(2 * occ.size) / 2)

    def uncertainty_violation(self) -> float:
        """Most negative eigenvalue of cov + (i/2) J, or 0 if none."""
        m = self.covariance + 0.5j * symplectic_form(self.mode_count)
        return max(0.0, -float(np.linalg.eigvalsh(m)[0]))


def mode_occupations(state: GaussianState) -> np.ndarray:
    n = state.mode_count
    cov, mu = state.covariance, state.mean
    diag = np.diag(cov)
    return (diag[:n] + diag[n:] - 1) / 2 + (mu[:n] ** 2 + mu[n:] ** 2) / 2


def evolve(form: QuadraticForm, state: GaussianState, t: float) -> GaussianState:
    if form.mode_count != state.mode_count:
        raise DomainError("form and state have different mode counts")
    s = form.propagator(t)
    xi = form.equilibrium()
    mean = s @ (state.mean - xi) + xi
    cov = s @ state.covariance @ s.T
    return GaussianState(mean, (cov + cov.T) / 2)


def symplectic_defect(s: np.ndarray) -> float:
    j = symplectic_form(s.shape[0] // 2)
    return float(np.max(np.abs(s @ j @ s.T - j)))


# ---------------------------------------------------------------------------
# chain construction


def chain_couplings(spec: ChainSpec):
    """Return (K, L, F) coupling matrices; K and L have zero diagonals."""
    idx = np.arange(spec.N)
    sep = np.abs(idx[:, None] - idx[None, :]).astype(float)
    p = spec.alpha + 2
    with np.errstate(divide="ignore"):
        decay = np.where(sep > 0, 1.0 / (spec.eta * sep) ** p, 0.0)
    k = spec.G_aa * decay
    l = spec.G_mm * decay
    f = spec.G_am / ((spec.eta * sep) ** 2 + 1) ** (p / 2)
    return k, l, f


def _coupling_matrix(spec: ChainSpec) -> np.ndarray:
    """Position-space matrix of the coupling terms alone."""
    n = spec.N
    k, l, f = chain_couplings(spec)
    v = np.zeros((2 * n, 2 * n))
    # each unordered intraspecies pair appears once after the 1/2
    for block, c in ((slice(0, n), k), (slice(n, 2 * n), l)):
        v[block, block] += np.diag(2 * c.sum(axis=1)) - 2 * c
    v[:n, :n] += np.diag(2 * f.sum(axis=1))
    v[n:, n:] += np.diag(2 * f.sum(axis=0))
    v[:n, n:] -= 2 * f
    v[n:, :n] -= 2 * f.T
    return v


def build_chain(spec: ChainSpec, rwa: bool = False) -> QuadraticForm:
    """Quadratic form of the z-direction chain Hamiltonian.

    With ``rwa=True`` the counter-rotating parts are dropped, which makes the
    position and momentum matrices equal.
    """
    n = 2 * spec.N
    w = spec.omega_z * np.eye(n)
    v = _coupling_matrix(spec)
    if rwa:
        form = QuadraticForm(w + v / 2, w + v / 2)
    else:
        form = QuadraticForm(w + v, w)
    if not form.stable:
        raise InstabilityError("chain couplings overwhelm the trap: position matrix not positive definite")
    return form


def initial_chain_state(spec: ChainSpec, kind: str = "thermal") -> GaussianState:
    occ = np.concatenate([np.zeros(spec.N), np.full(spec.N, spec.initial_molecule_occupation)])
    if kind == "thermal":
        return GaussianState.thermal(occ)
    if kind == "coherent":
        return GaussianState.coherent(occ)
    raise DomainError(f"initial state must be 'thermal' or 'coherent', got {kind!r}")


def swap_efficiency(spec: ChainSpec, initial: str = "thermal", rwa: bool = False) -> float:
    """``1 - n_m(pi/2G_am) / n_m(0)`` averaged over the molecules."""
    if spec.initial_molecule_occupation == 0:
        raise DomainError("efficiency is undefined for an empty initial molecular occupation")
    form = build_chain(spec, rwa=rwa)
    state = initial_chain_state(spec, initial)
    final = evolve(form, state, spec.swap_time)
    n0 = mode_occupations(state)[spec.N:].mean()
    n1 = mode_occupations(final)[spec.N:].mean()
    if not math.isfinite(n1):
        raise NumericalError("non-finite occupation after evolution")
    return float(1 - n1 / n0)


# ---------------------------------------------------------------------------
# two-mode beam splitter


def rwa_pair(G: float, Delta: float, t, n0: float):
    """Molecular occupation of a detuned two-mode beam splitter.

    Starts with ``n0`` in the molecule and vacuum in the atom.
    """
    om = math.sqrt(4 * G * G + Delta * Delta)
    if om == 0:
        return n0 * np.ones_like(np.asarray(t, dtype=float))
    contrast = 4 * G * G / om**2
    return n0 * (1 - contrast * np.sin(om * np.asarray(t, dtype=float) / 2) ** 2)


def pair_form(G: float, Delta: float, omega: float) -> QuadraticForm:
    """Lab-frame beam splitter ``(w+D) a^dag a + w m^dag m - G(a^dag m + h.c.)``.

    Mode 0 is the atom, mode 1 the molecule.
    """
    h = np.array([[omega + Delta, -G], [-G, omega]], dtype=float)
    return QuadraticForm(h, h.copy())
