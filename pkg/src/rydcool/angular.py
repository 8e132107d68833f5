"""Angular-momentum primitives: exact Wigner 3j symbols and the
dipole-dipole angular matrix D(theta, phi).

Quantum numbers are carried as :class:`HalfInt`, which stores twice the
value so that half-integers compare exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Union

import numpy as np

HalfIntLike = Union["HalfInt", int, float, Fraction, str]


@dataclass(frozen=True, order=True)
class HalfInt:
    """An integer or half-integer, stored as ``twice_value``."""

    twice_value: int

    @classmethod
    def of(cls, value: HalfIntLike) -> "HalfInt":
        """Coerce ``1``, ``1.5``, ``Fraction(3, 2)`` or ``"3/2"``."""
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, (bool, np.bool_)):
            raise TypeError("booleans are not quantum numbers")
        twice = 2 * Fraction(value)
        if twice.denominator != 1:
            raise ValueError(f"{value!r} is not an integer or half-integer")
        return cls(int(twice))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __float__(self) -> float:
        return self.twice_value / 2

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice_value)

    def __add__(self, other: HalfIntLike) -> "HalfInt":
        return HalfInt(self.twice_value + HalfInt.of(other).twice_value)

    __radd__ = __add__

    def __sub__(self, other: HalfIntLike) -> "HalfInt":
        return HalfInt(self.twice_value - HalfInt.of(other).twice_value)

    def __rsub__(self, other: HalfIntLike) -> "HalfInt":
        return HalfInt.of(other) - self

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"

    def projections(self) -> list["HalfInt"]:
        """All m = -j, ..., j in ascending order."""
        if self.twice_value < 0:
            raise ValueError("projections of a negative angular momentum")
        return [HalfInt(t) for t in range(-self.twice_value, self.twice_value + 1, 2)]


class SqrtRational(NamedTuple):
    """``sign * sqrt(square)`` with ``square`` an exact rational."""

    sign: int
    square: Fraction

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.sqrt(self.square)


def _check_pair(j: HalfInt, m: HalfInt) -> None:
    if j.twice_value < 0:
        raise ValueError(f"angular momentum j={j} is negative")
    if (j.twice_value - m.twice_value) % 2:
        raise ValueError(f"j - m is not integral for j={j}, m={m}")


@lru_cache(maxsize=65536)
def _racah(t1: int, t2: int, t3: int, u1: int, u2: int, u3: int) -> SqrtRational:
    # all arguments doubled
    if u1 + u2 + u3 != 0:
        return SqrtRational(0, Fraction(0))
    if t3 > t1 + t2 or t3 < abs(t1 - t2) or (t1 + t2 + t3) % 2:
        return SqrtRational(0, Fraction(0))
    if abs(u1) > t1 or abs(u2) > t2 or abs(u3) > t3:
        return SqrtRational(0, Fraction(0))

    f = math.factorial
    a = (t1 + t2 - t3) // 2
    b = (t1 - t2 + t3) // 2
    c = (-t1 + t2 + t3) // 2
    triangle = Fraction(f(a) * f(b) * f(c), f((t1 + t2 + t3) // 2 + 1))
    prefactor = (
        f((t1 + u1) // 2) * f((t1 - u1) // 2)
        * f((t2 + u2) // 2) * f((t2 - u2) // 2)
        * f((t3 + u3) // 2) * f((t3 - u3) // 2)
    )

    j1_m1 = (t1 - u1) // 2
    j2_p_m2 = (t2 + u2) // 2
    s1 = (t3 - t2 + u1) // 2
    s2 = (t3 - t1 - u2) // 2
    kmin = max(0, -s1, -s2)
    kmax = min(a, j1_m1, j2_p_m2)
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        denom = f(k) * f(a - k) * f(j1_m1 - k) * f(j2_p_m2 - k) * f(s1 + k) * f(s2 + k)
        total += Fraction((-1) ** k, denom)
    if total == 0:
        return SqrtRational(0, Fraction(0))

    phase = -1 if ((t1 - t2 - u3) // 2) % 2 else 1
    sign = phase * (1 if total > 0 else -1)
    return SqrtRational(sign, triangle * prefactor * total * total)


def wigner_3j_exact(j1, j2, j3, m1, m2, m3) -> SqrtRational:
    """Exact 3j symbol as ``sign * sqrt(rational)``.

    Raises ValueError for malformed arguments (negative j, or j - m not
    integral). Selection-rule violations give exactly zero.
    """
    js = [HalfInt.of(x) for x in (j1, j2, j3)]
    ms = [HalfInt.of(x) for x in (m1, m2, m3)]
    for j, m in zip(js, ms):
        _check_pair(j, m)
    return _racah(*(j.twice_value for j in js), *(m.twice_value for m in ms))


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol (j1 j2 j3; m1 m2 m3) from the Racah formula."""
    return float(wigner_3j_exact(j1, j2, j3, m1, m2, m3))


# ---------------------------------------------------------------------------
# dipole-dipole angular matrix


@dataclass(frozen=True)
class DipoleAngularMatrix:
    """3x3 angular factor of the dipole-dipole interaction.

    Rows and columns are spherical components q = -1, 0, +1 in that order.
    """

    entries: np.ndarray
    theta: float
    phi: float

    def __getitem__(self, qq):
        q1, q2 = qq
        return self.entries[q1 + 1, q2 + 1]


def dipole_angular_matrix(theta: float, phi: float) -> DipoleAngularMatrix:
    ct, st = math.cos(theta), math.sin(theta)
    e1 = complex(math.cos(phi), math.sin(phi))
    e2 = e1 * e1
    r2 = math.sqrt(2.0)
    off = 3.0 / r2 * ct * st
    d = np.array(
        [
            [-1.5 * e2 * st * st, -off * e1, (1 - 3 * ct * ct) / 2],
            [-off * e1, 1 - 3 * ct * ct, off / e1],
            [(1 - 3 * ct * ct) / 2, off / e1, -1.5 / e2 * st * st],
        ],
        dtype=complex,
    )
    return DipoleAngularMatrix(d, float(theta), float(phi))
