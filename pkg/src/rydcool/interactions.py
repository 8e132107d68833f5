"""Molecule-Rydberg van der Waals channels.

A channel is one virtual intermediate manifold: the molecule goes from
rotational level N to N~ and the atom from fine-structure level J to J~.
Each channel contributes ``C6^(p) * D^(p) / r^6`` where ``C6^(p)`` carries
the reduced dipoles and the energy defect and ``D^(p)`` is an m_J-resolved
angular matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .angular import HalfInt, dipole_angular_matrix, wigner_3j
from .constants import DEBYE2_UM3_KHZ, EA0_IN_DEBYE
from .errors import DomainError, ResonanceError

DIPOLE_UNITS = {"debye": 1.0, "ea0": EA0_IN_DEBYE}


@dataclass(frozen=True)
class ChannelSpec:
    """One virtual vdW channel.

    ``energy_defect`` is (E_N + E_nLJ) - (E_N~ + E_n~L~J~) in internal
    frequency units. ``d_atom`` is in ``d_atom_unit`` ("debye" or "ea0").
    """

    molecule_N: int
    molecule_Ntilde: int
    atom_J: HalfInt
    atom_Jtilde: HalfInt
    d_mol: float = 0.0
    d_atom: float = 0.0
    energy_defect: float = 1.0
    atom_Ltilde: int = 1
    d_atom_unit: str = "debye"
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "atom_J", HalfInt.of(self.atom_J))
        object.__setattr__(self, "atom_Jtilde", HalfInt.of(self.atom_Jtilde))
        if self.molecule_N < 0 or abs(self.molecule_Ntilde - self.molecule_N) != 1:
            raise DomainError(
                f"molecular channel N={self.molecule_N} -> {self.molecule_Ntilde} "
                "is not dipole allowed"
            )
        if self.atom_J.twice_value < 0 or abs(self.atom_Jtilde.twice_value - self.atom_J.twice_value) > 2:
            raise DomainError(f"atomic channel J={self.atom_J} -> {self.atom_Jtilde} is not dipole allowed")
        if self.atom_Jtilde.twice_value == 0 and self.atom_J.twice_value == 0:
            raise DomainError("J=0 -> J~=0 is dipole forbidden")
        if self.d_atom_unit not in DIPOLE_UNITS:
            raise DomainError(f"unknown dipole unit {self.d_atom_unit!r}")

    @property
    def tag(self) -> str:
        return self.label or f"({self.atom_Jtilde};{self.molecule_Ntilde})"

    @property
    def d_atom_debye(self) -> float:
        return self.d_atom * DIPOLE_UNITS[self.d_atom_unit]

    @property
    def c3(self) -> float:
        """Dipole-dipole scale d_mol * d_atom / (4 pi eps0), in kHz um^3."""
        return DEBYE2_UM3_KHZ * self.d_mol * self.d_atom_debye


def c6_channel(channel: ChannelSpec) -> float:
    """Channel coefficient ``(d_mol d_atom)^2 / defect`` in kHz um^6."""
    if channel.energy_defect == 0:
        raise ResonanceError(f"channel {channel.tag} has zero energy defect")
    return channel.c3**2 / channel.energy_defect


@dataclass(frozen=True)
class AngularMatrix:
    """m_J-resolved angular matrix of one channel.

    ``entries[i, k]`` couples ``m_values[i]`` to ``m_values[k]``; the
    projections are listed in ascending order.
    """

    entries: np.ndarray
    tag: str
    molecular_sign: int
    m_values: tuple
    theta: float
    phi: float

    def scalar(self) -> float:
        """Value of a state-independent matrix (mean of the real diagonal)."""
        return float(np.mean(self.entries.diagonal().real))


def _sign(molecular_sign) -> int:
    if molecular_sign in (1, "+", "+N"):
        return 1
    if molecular_sign in (-1, "-", "-N"):
        return -1
    raise DomainError(f"molecular sign must be +1 or -1, got {molecular_sign!r}")


def angular_matrix(
    channel: ChannelSpec,
    molecular_sign=+1,
    theta: float = math.pi / 2,
    phi: float = 0.0,
    intermediate_m: Optional[HalfInt] = None,
) -> AngularMatrix:
    """Angular matrix for the molecule in ``|N, +-N>``.

    ``intermediate_m`` keeps only virtual atomic states with projection
    ``m_J - q_a`` equal to the given value. This is how the magnetic-field
    forms are obtained, where a single m_L intermediate is resonant.
    """
    s = _sign(molecular_sign)
    N, Nt = channel.molecule_N, channel.molecule_Ntilde
    J, Jt = channel.atom_J, channel.atom_Jtilde
    d = dipole_angular_matrix(theta, phi)
    ms = J.projections()
    mint = None if intermediate_m is None else HalfInt.of(intermediate_m)
    out = np.zeros((len(ms), len(ms)), dtype=complex)

    for i, mj in enumerate(ms):
        for k, mjp in enumerate(ms):
            dm = (mjp - mj).twice_value // 2
            total = 0j
            for qm in (-1, 0, 1):
                mol = wigner_3j(N, 1, Nt, -s * N, qm, s * N - qm) * wigner_3j(
                    Nt, 1, N, -s * N + qm, -qm, s * N
                )
                if mol == 0.0:
                    continue
                for qa in (-1, 0, 1):
                    q2 = -qa - dm
                    if abs(q2) > 1:
                        continue
                    if mint is not None and mj - qa != mint:
                        continue
                    atom = wigner_3j(J, 1, Jt, -mj, qa, mj - qa) * wigner_3j(
                        Jt, 1, J, qa - mj, q2, mjp
                    )
                    if atom == 0.0:
                        continue
                    twice_exp = (
                        2 * (N + Nt - 2 * s * N + qm + qa)
                        + J.twice_value + Jt.twice_value - 2 * mj.twice_value
                    )
                    phase = -1.0 if (twice_exp // 2) % 2 else 1.0
                    total += phase * d[qa, qm] * d[q2, -qm] * mol * atom
            out[i, k] = total
    return AngularMatrix(out, channel.tag, s, tuple(ms), float(theta), float(phi))


def mirror_sign(mat: AngularMatrix) -> AngularMatrix:
    """Matrix for the opposite molecular sign, by the m_J mirror rule.

    Entries are conjugated, m_J -> -m_J, and multiplied by (-1)^(dm_J).
    """
    n = mat.entries.shape[0]
    out = np.empty_like(mat.entries)
    for i in range(n):
        for k in range(n):
            out[i, k] = (-1) ** abs(k - i) * np.conj(mat.entries[n - 1 - i, n - 1 - k])
    return AngularMatrix(out, mat.tag, -mat.molecular_sign, mat.m_values, mat.theta, mat.phi)


# ---------------------------------------------------------------------------
# symmetrized basis


#: Columns: symmetric (|-1/2> + |+1/2>)/sqrt2 and antisymmetric
#: (|+1/2> - |-1/2>)/sqrt2 in the (-1/2, +1/2) basis.
SYMMETRIZED_BASIS = np.array([[1.0, -1.0], [1.0, 1.0]]) / math.sqrt(2.0)


@dataclass(frozen=True)
class SymmetrizedDecomposition:
    identity_coefficient: float
    asymmetry: np.ndarray
    half: np.ndarray
    three_half: np.ndarray
    theta: float
    phi: float

    def reconstruct(self):
        """Return (D~1/2, D~3/2) rebuilt from the identity part and M."""
        eye = np.eye(2)
        c = self.identity_coefficient
        return -c / 2 * eye + 2 * self.asymmetry, c / 2 * eye + self.asymmetry


def symmetrize(d_half: AngularMatrix, d_three_half: AngularMatrix) -> SymmetrizedDecomposition:
    """Split the J=1/2 channel pair into an identity part and M.

    The identity coefficient comes from the fine-structure-free combination
    -2/3 D^(1/2) + 4/3 D^(3/2), which must be proportional to identity.
    """
    if (d_half.theta, d_half.phi) != (d_three_half.theta, d_three_half.phi):
        raise DomainError("angular matrices evaluated at different angles")
    if d_half.molecular_sign != d_three_half.molecular_sign:
        raise DomainError("angular matrices refer to different molecular states")
    if d_half.entries.shape != (2, 2) or d_three_half.entries.shape != (2, 2):
        raise DomainError("symmetrization needs J = 1/2 matrices")

    combined = -2.0 / 3.0 * d_half.entries + 4.0 / 3.0 * d_three_half.entries
    coeff = float(np.trace(combined).real / 2)
    if np.max(np.abs(combined - coeff * np.eye(2))) > 1e-10 * max(1.0, abs(coeff)):
        raise DomainError("fine-structure-free combination is not proportional to identity")

    u = SYMMETRIZED_BASIS
    half = u.T @ d_half.entries @ u
    three = u.T @ d_three_half.entries @ u
    m = three - coeff / 2 * np.eye(2)
    return SymmetrizedDecomposition(coeff, m, half, three, d_half.theta, d_half.phi)


def total_c6(terms: Iterable[tuple]) -> float:
    """Sum of ``C6^(p) * D^(p)`` over ``(c6, angular_scalar)`` pairs."""
    terms = list(terms)
    if not terms:
        raise DomainError("total_c6 needs at least one channel")
    return float(math.fsum(c6 * ang for c6, ang in terms))


# ---------------------------------------------------------------------------
# perturbative mixing


@dataclass(frozen=True)
class MixingReport:
    f_mix: float
    per_channel: dict = field(default_factory=dict)
    r: float = 0.0
    theta: float = math.pi / 2


def _default_atom_state(j: HalfInt) -> np.ndarray:
    n = j.twice_value + 1
    return np.full(n, 1.0 / math.sqrt(n))


def first_order_amplitudes(
    channel: ChannelSpec,
    theta: float,
    phi: float = 0.0,
    atom_state: Optional[Sequence[complex]] = None,
    molecular_sign=+1,
) -> dict:
    """Angular part of <N,sN; psi_atom| V |N~ m~N; J~ m~J> per intermediate.

    ``atom_state`` lists amplitudes over ascending m_J; the default is the
    equal-weight superposition. The result maps (m~N, m~J) to the amplitude
    in units of C3/r^3.
    """
    s = _sign(molecular_sign)
    N, Nt = channel.molecule_N, channel.molecule_Ntilde
    J, Jt = channel.atom_J, channel.atom_Jtilde
    ms = J.projections()
    c = _default_atom_state(J) if atom_state is None else np.asarray(atom_state, dtype=complex)
    if c.shape != (len(ms),):
        raise DomainError(f"atom state needs {len(ms)} amplitudes")
    norm = np.vdot(c, c).real
    if not math.isclose(norm, 1.0, rel_tol=1e-9):
        raise DomainError("atom state is not normalized")
    d = dipole_angular_matrix(theta, phi)

    amps: dict = {}
    for ci, mj in zip(c, ms):
        if ci == 0:
            continue
        atom_phase = -1.0 if ((J - mj).twice_value // 2) % 2 else 1.0
        for qa in (-1, 0, 1):
            mjt = mj - qa
            if abs(mjt.twice_value) > Jt.twice_value:
                continue
            a3j = wigner_3j(J, 1, Jt, -mj, qa, mjt)
            if a3j == 0.0:
                continue
            for qm in (-1, 0, 1):
                mnt = s * N - qm
                if abs(mnt) > Nt:
                    continue
                m3j = wigner_3j(N, 1, Nt, -s * N, qm, mnt)
                if m3j == 0.0:
                    continue
                key = (mnt, mjt)
                amps[key] = amps.get(key, 0j) + np.conj(ci) * atom_phase * d[qa, qm] * a3j * m3j
    return amps


def mixing_fraction(
    channels: Sequence[ChannelSpec],
    r: float,
    theta: float = math.pi / 2,
    phi: float = 0.0,
    atom_state=None,
    molecular_sign=+1,
) -> MixingReport:
    """First-order admixture of intermediate pair states.

    Degenerate intermediates are summed incoherently.
    """
    if not r > 0:
        raise DomainError(f"separation must be positive, got r={r}")
    per: dict = {}
    for ch in channels:
        if ch.energy_defect == 0:
            raise ResonanceError(f"channel {ch.tag} has zero energy defect")
        amps = first_order_amplitudes(ch, theta, phi, atom_state, molecular_sign)
        scale = ch.c3 / (r**3 * ch.energy_defect)
        contrib = scale**2 * math.fsum(abs(a) ** 2 for a in amps.values())
        key = ch.tag
        while key in per:
            key += "'"
        per[key] = contrib
    return MixingReport(math.fsum(per.values()), per, float(r), float(theta))


def delta_for_target_mixing(c3_eff: float, r: float, f_target: float) -> tuple[float, float]:
    """Detuning giving admixture ``f_target`` in a two-level model.

    Returns ``(delta, c6_eff)`` with ``delta = |C3|/r^3/sqrt(f)`` and
    ``c6_eff = C3^2/delta``. At this detuning the effective interaction
    ``c6_eff / r^6`` equals ``sqrt(f) |C3| / r^3``, i.e. it scales like r^-3.
    """
    if not 0 < f_target < 1:
        raise DomainError(f"target mixing must lie in (0, 1), got {f_target}")
    if not r > 0:
        raise DomainError(f"separation must be positive, got r={r}")
    delta = abs(c3_eff) / r**3 / math.sqrt(f_target)
    if delta == 0:
        raise DomainError("zero dipole coupling admits no finite detuning")
    return delta, c3_eff**2 / delta
