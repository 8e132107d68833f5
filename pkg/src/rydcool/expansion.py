"""Second-order expansion of a molecule-atom potential into phonon couplings.

The separation points along +y and the quantization axis is z, so the
evaluation point is (0, r, 0) with theta = pi/2. Quadratic coefficients are
reported as the prefactor of the squared relative displacement, i.e.
one half of the second derivative; the linear coefficient is the first
derivative along y; the x-z coefficient multiplies dx*dz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Union

from .constants import HBAR_OVER_U_UM2, SPECIES_MASS
from .errors import DomainError

AXES = ("x", "y", "z")


@dataclass(frozen=True)
class RadialAngularPotential:
    """``V(r, theta) = C (a + b cos^2 + c cos^4) / r^alpha``."""

    amplitude: float
    alpha: float
    a: float = 1.0
    b: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"radial power must be positive, got {self.alpha}")

    def __call__(self, x: float, y: float, z: float) -> float:
        r2 = x * x + y * y + z * z
        c2 = z * z / r2
        return self.amplitude * (self.a + self.b * c2 + self.c * c2 * c2) / r2 ** (self.alpha / 2)


@dataclass(frozen=True)
class ExpansionCoefficients:
    x: float
    y_linear: float
    y: float
    z: float
    xz: float = 0.0

    def as_tuple(self) -> tuple:
        return (self.x, self.y_linear, self.y, self.z)

    def quadratic(self, axis: str) -> float:
        return {"x": self.x, "y": self.y, "z": self.z}[axis]

    def scaled(self, factor: float) -> "ExpansionCoefficients":
        return ExpansionCoefficients(*(factor * v for v in (self.x, self.y_linear, self.y, self.z, self.xz)))


def expand_closed_form(pot: RadialAngularPotential, r_am: float) -> ExpansionCoefficients:
    if not r_am > 0:
        raise DomainError(f"separation must be positive, got {r_am}")
    al, a, b = pot.alpha, pot.a, pot.b
    quad = pot.amplitude / r_am ** (al + 2)
    return ExpansionCoefficients(
        x=-(al / 2) * a * quad,
        y_linear=-al * a * pot.amplitude / r_am ** (al + 1),
        y=al * (al + 1) / 2 * a * quad,
        z=(-(al / 2) * a + b) * quad,
        xz=0.0,
    )


def expand_finite_difference(
    pot: Callable[[float, float, float], float], r_am: float, h: float
) -> ExpansionCoefficients:
    """Central differences around (0, r_am, 0).

    Works for any callable ``pot(x, y, z)``, including forms with a
    non-zero x-z cross term.
    """
    if not r_am > 0:
        raise DomainError(f"separation must be positive, got {r_am}")
    if not 0 < h < r_am / 10:
        raise DomainError(f"step h={h} must satisfy 0 < h < r_am/10")
    y0 = r_am
    v0 = pot(0.0, y0, 0.0)

    def second(fp, fm):
        return (fp - 2 * v0 + fm) / (h * h) / 2

    cross = (
        pot(h, y0, h) - pot(h, y0, -h) - pot(-h, y0, h) + pot(-h, y0, -h)
    ) / (4 * h * h)
    return ExpansionCoefficients(
        x=second(pot(h, y0, 0.0), pot(-h, y0, 0.0)),
        y_linear=(pot(0.0, y0 + h, 0.0) - pot(0.0, y0 - h, 0.0)) / (2 * h),
        y=second(pot(0.0, y0 + h, 0.0), pot(0.0, y0 - h, 0.0)),
        z=second(pot(0.0, y0, h), pot(0.0, y0, -h)),
        xz=cross,
    )


# ---------------------------------------------------------------------------
# rates


@dataclass(frozen=True)
class SpeciesSpec:
    """Mass (u) and trap angular frequencies per axis (internal units)."""

    mass: float
    trap_frequencies: tuple

    def __post_init__(self):
        freqs = self.trap_frequencies
        if isinstance(freqs, (int, float)):
            freqs = (float(freqs),) * 3
        elif isinstance(freqs, Mapping):
            freqs = tuple(float(freqs[k]) for k in AXES)
        freqs = tuple(float(f) for f in freqs)
        if len(freqs) != 3:
            raise DomainError("trap frequencies need one value per axis")
        object.__setattr__(self, "trap_frequencies", freqs)
        if not self.mass > 0 or not all(f > 0 for f in freqs):
            raise DomainError("mass and trap frequencies must be positive")

    @classmethod
    def named(cls, name: str, trap: Union[float, tuple]) -> "SpeciesSpec":
        try:
            mass = SPECIES_MASS[name]
        except KeyError:
            raise DomainError(f"unknown species {name!r}; known: {sorted(SPECIES_MASS)}") from None
        return cls(mass, trap)

    def omega(self, axis: str) -> float:
        return self.trap_frequencies[AXES.index(axis)]


@dataclass(frozen=True)
class AxisRates:
    coefficient: float
    G_am: float
    G_a: float
    G_m: float


@dataclass(frozen=True)
class PhononCouplings:
    linear_y: float
    axes: dict

    def __getitem__(self, axis: str) -> AxisRates:
        return self.axes[axis]


def coupling_rates(coefficient: float, mol: SpeciesSpec, atom: SpeciesSpec, axis: str = "z") -> AxisRates:
    """Exchange and self rates from a quadratic coefficient.

    ``coefficient`` is the prefactor of (dz_a - dz_m)^2, so the curvature
    is twice it.
    """
    if axis not in AXES:
        raise DomainError(f"axis must be one of {AXES}")
    wa, wm = atom.omega(axis), mol.omega(axis)
    curv = 2.0 * coefficient * HBAR_OVER_U_UM2
    return AxisRates(
        coefficient=coefficient,
        G_am=curv / (2 * math.sqrt(atom.mass * mol.mass * wa * wm)),
        G_a=curv / (4 * atom.mass * wa),
        G_m=curv / (4 * mol.mass * wm),
    )


def expand_couplings(
    pot: RadialAngularPotential, r_am: float, mol: SpeciesSpec, atom: SpeciesSpec
) -> PhononCouplings:
    coeffs = expand_closed_form(pot, r_am)
    return PhononCouplings(
        linear_y=coeffs.y_linear,
        axes={ax: coupling_rates(coeffs.quadratic(ax), mol, atom, ax) for ax in AXES},
    )


def anharmonicity(m1: SpeciesSpec, m2: SpeciesSpec, r: float, axis: str = "z") -> float:
    """Relative size of the quartic term, ``hbar / (sqrt(M1 M2 w1 w2) r^2)``."""
    if not r > 0:
        raise DomainError(f"separation must be positive, got {r}")
    w = math.sqrt(m1.mass * m2.mass * m1.omega(axis) * m2.omega(axis))
    return HBAR_OVER_U_UM2 / (w * r * r)
