"""Bialkali hyperfine and Zeeman structure within one rotational manifold.

Basis states are |N, m_N, m_I1, m_I2> with every projection in ascending
order and m_I2 varying fastest. Energies are in internal frequency units.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .angular import HalfInt, wigner_3j
from .constants import MU_B_KHZ_PER_MT, MU_N_KHZ_PER_MT, G_L, G_S
from .errors import DomainError

MHZ = 1e3
HZ = 1e-3


@dataclass(frozen=True)
class HyperfineSpec:
    """Nuclear spins and coupling constants.

    ``eQq`` in MHz, ``c1..c4`` in Hz, ``B0`` in GHz, as tabulated; the
    ``*_internal`` accessors convert to internal units.
    """

    I1: HalfInt
    I2: HalfInt
    eQq1: float = 0.0
    eQq2: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0
    c4: float = 0.0
    g1: float = 0.0
    g2: float = 0.0
    sigma1: float = 0.0
    sigma2: float = 0.0
    B0: float = 0.0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "I1", HalfInt.of(self.I1))
        object.__setattr__(self, "I2", HalfInt.of(self.I2))
        for spin, eqq, tag in ((self.I1, self.eQq1, "1"), (self.I2, self.eQq2, "2")):
            if spin.twice_value < 0:
                raise DomainError(f"nuclear spin I{tag} must be non-negative")
            if spin.twice_value < 2 and eqq != 0:
                raise DomainError(f"nucleus {tag} has I={spin} < 1 but a quadrupole constant {eqq}")
        vals = [self.eQq1, self.eQq2, self.c1, self.c2, self.c3, self.c4, self.g1, self.g2, self.sigma1, self.sigma2]
        if not all(math.isfinite(v) for v in vals):
            raise DomainError("hyperfine constants must be finite")

    @classmethod
    def load(cls, name: str) -> "HyperfineSpec":
        table = _molecule_table()
        if name not in table:
            raise DomainError(f"no constants for {name!r}; available: {sorted(k for k in table if not k.startswith('_'))}")
        row = {k: v for k, v in table[name].items() if k in cls.__dataclass_fields__}
        return cls(name=name, **row)

    def without(self, *names: str) -> "HyperfineSpec":
        """Copy with the named constants set to zero."""
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        for n in names:
            d[n] = 0.0
        return HyperfineSpec(**d)


@lru_cache(maxsize=1)
def _molecule_table() -> dict:
    return json.loads(resources.files("rydcool").joinpath("data/molecules.json").read_text())


def molecule_dipole(name: str) -> float:
    """Permanent dipole moment (Debye) from the bundled table."""
    return float(_molecule_table()[name]["dipole"])


# ---------------------------------------------------------------------------
# single-space operators


def _spin_components(j: HalfInt) -> dict:
    """Spherical components J_{-1}, J_0, J_{+1} on ascending projections."""
    ms = np.array([m.twice_value / 2 for m in j.projections()])
    jj = j.twice_value / 2
    n = ms.size
    jp = np.zeros((n, n))
    for k in range(n - 1):
        jp[k + 1, k] = math.sqrt(jj * (jj + 1) - ms[k] * (ms[k] + 1))
    return {+1: -jp / math.sqrt(2), 0: np.diag(ms), -1: jp.T / math.sqrt(2)}


def _rank2_c(n: int) -> dict:
    """C^2_p within a single rotational level N, for p = -2..2."""
    dim = 2 * n + 1
    red = (2 * n + 1) * wigner_3j(n, 2, n, 0, 0, 0)
    out = {}
    for p in range(-2, 3):
        c = np.zeros((dim, dim))
        for i, m in enumerate(range(-n, n + 1)):
            for k, mp in enumerate(range(-n, n + 1)):
                w = wigner_3j(n, 2, n, -m, p, mp)
                if w:
                    c[i, k] = (-1) ** (m % 2) * red * w
        out[p] = c
    return out


def _cg_11(q1: int, q2: int, p: int) -> float:
    return (-1) ** (p % 2) * math.sqrt(5) * wigner_3j(1, 1, 2, q1, q2, -p)


def _rank2_product(a: dict, b: dict) -> dict:
    """T^2_p(A, B) from two rank-1 spherical operators."""
    return {
        p: sum(_cg_11(q1, p - q1, p) * (a[q1] @ b[p - q1]) for q1 in (-1, 0, 1) if abs(p - q1) <= 1)
        for p in range(-2, 3)
    }


def _scalar(a: dict, b: dict, rank: int):
    return sum((-1) ** (p % 2) * (a[p] @ b[-p]) for p in range(-rank, rank + 1))


@dataclass(frozen=True)
class ManifoldBasis:
    N: int
    I1: HalfInt
    I2: HalfInt
    states: tuple  # (m_N, m_I1, m_I2) with HalfInt spins

    def total_projection(self) -> np.ndarray:
        return np.array([2 * mn + a.twice_value + b.twice_value for mn, a, b in self.states]) / 2

    def index(self, m_N, m_I1, m_I2) -> int:
        return self.states.index((int(m_N), HalfInt.of(m_I1), HalfInt.of(m_I2)))

    def label(self, k: int) -> str:
        mn, a, b = self.states[k]
        return f"N={self.N},mN={mn},mI1={a},mI2={b}"


def manifold_basis(N: int, spec: HyperfineSpec) -> ManifoldBasis:
    if N < 0:
        raise DomainError(f"rotational level must be non-negative, got {N}")
    states = tuple(
        (mn, a, b)
        for mn in range(-N, N + 1)
        for a in spec.I1.projections()
        for b in spec.I2.projections()
    )
    return ManifoldBasis(N, spec.I1, spec.I2, states)


def _embed(n_op, i1_op, i2_op):
    return np.kron(np.kron(n_op, i1_op), i2_op)


def build_hyperfine(N: int, spec: HyperfineSpec, m_N: Optional[int] = None) -> np.ndarray:
    """Hyperfine Hamiltonian on the N manifold.

    With ``m_N`` given, the matrix is restricted to that rotational
    projection, as when unused m_N states are shifted away by a drive.
    """
    basis = manifold_basis(N, spec)
    dn, d1, d2 = 2 * N + 1, spec.I1.twice_value + 1, spec.I2.twice_value + 1
    eye_n, eye_1, eye_2 = np.eye(dn), np.eye(d1), np.eye(d2)
    nvec = _spin_components(HalfInt(2 * N))
    i1 = _spin_components(spec.I1)
    i2 = _spin_components(spec.I2)
    c2 = _rank2_c(N)

    h = np.zeros((dn * d1 * d2,) * 2)
    big_c = {p: _embed(c2[p], eye_1, eye_2) for p in c2}
    big_n = {q: _embed(nvec[q], eye_1, eye_2) for q in nvec}
    big_i1 = {q: _embed(eye_n, i1[q], eye_2) for q in i1}
    big_i2 = {q: _embed(eye_n, eye_1, i2[q]) for q in i2}

    for eqq, spin, op in ((spec.eQq1, spec.I1, big_i1), (spec.eQq2, spec.I2, big_i2)):
        if eqq and spin.twice_value >= 2:
            ii = spin.twice_value / 2
            h += eqq * MHZ * math.sqrt(6) / (4 * ii * (2 * ii - 1)) * _scalar(big_c, _rank2_product(op, op), 2)
    if spec.c1:
        h += spec.c1 * HZ * _scalar(big_n, big_i1, 1)
    if spec.c2:
        h += spec.c2 * HZ * _scalar(big_n, big_i2, 1)
    if spec.c3:
        h += -spec.c3 * HZ * math.sqrt(6) * _scalar(big_c, _rank2_product(big_i1, big_i2), 2)
    if spec.c4:
        h += spec.c4 * HZ * _scalar(big_i1, big_i2, 1)

    h = (h + h.T.conj()) / 2
    if np.allclose(h.imag, 0, atol=0):
        h = h.real
    if m_N is not None:
        keep = _mn_indices(basis, m_N)
        h = h[np.ix_(keep, keep)]
    return h


def _mn_indices(basis: ManifoldBasis, m_N: int) -> list:
    if abs(m_N) > basis.N:
        raise DomainError(f"|m_N|={abs(m_N)} exceeds N={basis.N}")
    return [k for k, s in enumerate(basis.states) if s[0] == m_N]


def restricted_basis(N: int, spec: HyperfineSpec, m_N: Optional[int] = None) -> ManifoldBasis:
    basis = manifold_basis(N, spec)
    if m_N is None:
        return basis
    keep = _mn_indices(basis, m_N)
    return ManifoldBasis(N, spec.I1, spec.I2, tuple(basis.states[k] for k in keep))


def build_zeeman_molecule(N: int, spec: HyperfineSpec, B: float, m_N: Optional[int] = None) -> np.ndarray:
    """Nuclear Zeeman term ``-sum_i g_i mu_N B (1 - sigma_i) m_Ii`` (diagonal)."""
    if not math.isfinite(B):
        raise DomainError("magnetic field must be finite")
    basis = restricted_basis(N, spec, m_N)
    k1 = spec.g1 * MU_N_KHZ_PER_MT * B * (1 - spec.sigma1)
    k2 = spec.g2 * MU_N_KHZ_PER_MT * B * (1 - spec.sigma2)
    diag = [-(k1 * a.twice_value + k2 * b.twice_value) / 2 for _, a, b in basis.states]
    return np.diag(np.array(diag, dtype=float))


def build_zeeman_atom(L, S, B: float) -> tuple[np.ndarray, tuple]:
    """Atomic Zeeman term ``mu_B B (g_L m_L + g_s m_S)`` in the decoupled basis.

    Returns the diagonal matrix and the (m_L, m_S) labels, m_S fastest.
    """
    if not math.isfinite(B):
        raise DomainError("magnetic field must be finite")
    L, S = HalfInt.of(L), HalfInt.of(S)
    labels = tuple((ml, ms) for ml in L.projections() for ms in S.projections())
    diag = [MU_B_KHZ_PER_MT * B * (G_L * float(ml) + G_S * float(ms)) for ml, ms in labels]
    return np.diag(np.array(diag)), labels


# ---------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    basis: ManifoldBasis
    labels: tuple = field(default_factory=tuple)
    mixing: np.ndarray = field(default_factory=lambda: np.zeros(0))


def diagonalize(h: np.ndarray, basis: ManifoldBasis) -> SpectrumReport:
    """Eigen-decomposition done separately in each total-projection block."""
    mtot = basis.total_projection()
    n = h.shape[0]
    vals = np.zeros(n)
    vecs = np.zeros((n, n), dtype=h.dtype)
    col = 0
    for m in np.unique(mtot):
        idx = np.flatnonzero(mtot == m)
        w, v = np.linalg.eigh(h[np.ix_(idx, idx)])
        vals[col:col + idx.size] = w
        vecs[idx, col:col + idx.size] = v
        col += idx.size
    order = np.argsort(vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    weights = np.abs(vecs) ** 2
    dominant = weights.argmax(axis=0)
    labels = tuple(basis.label(k) for k in dominant)
    mixing = 1 - weights.max(axis=0)
    return SpectrumReport(vals, vecs, basis, labels, mixing)


def spectrum(N: int, spec: HyperfineSpec, B: float = 0.0, m_N: Optional[int] = None) -> SpectrumReport:
    h = build_hyperfine(N, spec, m_N) + build_zeeman_molecule(N, spec, B, m_N)
    return diagonalize(h, restricted_basis(N, spec, m_N))


def stretched_state_purity(N: int, spec: HyperfineSpec, B: float = 0.0) -> dict:
    """Largest eigenvector weight on each of the two stretched basis states."""
    rep = spectrum(N, spec, B)
    out = {}
    for sign in (+1, -1):
        k = rep.basis.index(sign * N, sign * spec.I1.value, sign * spec.I2.value)
        out[rep.basis.label(k)] = float(np.max(np.abs(rep.eigenvectors[k, :]) ** 2))
    return out


@dataclass(frozen=True)
class DressingReport:
    epsilon: float
    deviation: float
    detunings: np.ndarray
    spread: float
    half_std: float
    epsilon_std: float


def dressing_deviation(
    N_low: int,
    N_high: int,
    spec: HyperfineSpec,
    B: float,
    rabi: float,
    m_N_low: Optional[int] = None,
    m_N_high: Optional[int] = None,
) -> DressingReport:
    """Spread of microwave detunings between matched nuclear states.

    Each manifold is restricted to one m_N (default m_N = N_low in both,
    the projection the drive preserves). Eigenstates are paired by maximum
    overlap in the shared nuclear basis. ``spread`` is half the full range of
    detunings and ``epsilon = spread / rabi``; the half standard deviation is
    reported alongside as ``half_std``.
    """
    if not rabi > 0:
        raise DomainError(f"Rabi frequency must be positive, got {rabi}")
    m_lo = N_low if m_N_low is None else m_N_low
    m_hi = m_lo if m_N_high is None else m_N_high
    lo = spectrum(N_low, spec, B, m_lo)
    hi = spectrum(N_high, spec, B, m_hi)
    overlap = np.abs(lo.eigenvectors.conj().T @ hi.eigenvectors) ** 2
    rows, cols = linear_sum_assignment(-overlap)
    det = hi.eigenvalues[cols] - lo.eigenvalues[rows]
    spread = float((det.max() - det.min()) / 2)
    half_std = float(det.std() / 2)
    eps = spread / rabi
    return DressingReport(eps, eps**2, det, spread, half_std, half_std / rabi)
