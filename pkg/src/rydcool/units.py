"""Parsing of unit-annotated quantities into internal units.

Frequencies: a bare number is already internal (2*pi*kHz). Strings take
the form ``"<value> <unit>"``, optionally prefixed by ``2pi*`` (or ``2π×``)
to state that the value is the coefficient of 2*pi. Hz-family units denote
ordinary frequencies, so ``"25 kHz"`` and ``"2pi*25 kHz"`` both mean an
angular frequency of 2*pi*25 kHz; ``rad/s``-family units are angular and
are divided by 2*pi unless prefixed. A mapping ``{value, unit, two_pi}`` is
equivalent to the string form.
"""

from __future__ import annotations

import math
import re
from typing import Any, Callable, Optional

from .constants import EA0_IN_DEBYE, TWO_PI


class UnitError(ValueError):
    """A quantity could not be converted; the caller attaches the field name."""


_FREQ_ORDINARY = {"hz": 1e-3, "khz": 1.0, "mhz": 1e3, "ghz": 1e6}
_FREQ_ANGULAR = {"rad/s": 1e-3, "krad/s": 1.0, "rad/ms": 1.0, "mrad/s": 1e3, "rad/us": 1e3}
_LENGTH = {"um": 1.0, "µm": 1.0, "micron": 1.0, "nm": 1e-3, "mm": 1e3, "m": 1e6}
_DIPOLE = {"d": 1.0, "debye": 1.0, "ea0": EA0_IN_DEBYE}
_FIELD = {"mt": 1.0, "t": 1e3, "g": 0.1}
_ANGLE = {"rad": 1.0, "deg": math.pi / 180}

_TWO_PI_PREFIX = re.compile(r"^\s*(?:2\s*\*?\s*pi|2\s*π)\s*[*×x]?\s*", re.IGNORECASE)
_NUM_UNIT = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


def _split(text: str) -> tuple[float, str, bool]:
    two_pi = False
    m = _TWO_PI_PREFIX.match(text)
    if m:
        two_pi = True
        text = text[m.end():]
    m = _NUM_UNIT.match(text)
    if not m:
        raise UnitError(f"cannot parse quantity {text!r}")
    return float(m.group(1)), m.group(2), two_pi


def _normalize(value: Any) -> tuple[float, Optional[str], bool]:
    if isinstance(value, bool):
        raise UnitError("boolean is not a quantity")
    if isinstance(value, (int, float)):
        return float(value), None, False
    if isinstance(value, str):
        v, unit, tp = _split(value)
        return v, unit or None, tp
    if isinstance(value, dict):
        extra = set(value) - {"value", "unit", "two_pi"}
        if extra or "value" not in value:
            raise UnitError(f"quantity mapping needs 'value' (and optionally 'unit', 'two_pi'), got keys {sorted(value)}")
        v = value["value"]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise UnitError("quantity 'value' must be a number")
        return float(v), value.get("unit"), bool(value.get("two_pi", False))
    raise UnitError(f"unsupported quantity {value!r}")


def _table_lookup(table: dict, unit: str, what: str) -> float:
    key = unit.strip().lower()
    if key not in table:
        raise UnitError(f"unit {unit!r} is not a {what} unit (expected one of {sorted(table)})")
    return table[key]


def frequency(value: Any) -> float:
    v, unit, two_pi = _normalize(value)
    if unit is None:
        return v
    key = unit.strip().lower()
    if key in _FREQ_ORDINARY:
        return v * _FREQ_ORDINARY[key]
    if key in _FREQ_ANGULAR:
        scaled = v * _FREQ_ANGULAR[key]
        return scaled if two_pi else scaled / TWO_PI
    raise UnitError(f"unit {unit!r} is not a frequency unit")


def _simple(table: dict, what: str) -> Callable[[Any], float]:
    def parse(value: Any) -> float:
        v, unit, two_pi = _normalize(value)
        if two_pi:
            raise UnitError(f"a 2pi prefix makes no sense for a {what}")
        return v if unit is None else v * _table_lookup(table, unit, what)

    parse.__name__ = what
    return parse


length = _simple(_LENGTH, "length")
dipole = _simple(_DIPOLE, "dipole")
magnetic_field = _simple(_FIELD, "magnetic field")
angle = _simple(_ANGLE, "angle")


def dispersion(power: int) -> Callable[[Any], float]:
    """Coefficients such as C6 in ``<freq unit> um^power`` (e.g. "-3062 kHz um^6")."""

    pat = re.compile(rf"^(\w+)\s*[*·]?\s*(?:um|µm)\^?{power}$", re.IGNORECASE)

    def parse(value: Any) -> float:
        v, unit, two_pi = _normalize(value)
        if unit is None:
            return v
        m = pat.match(unit.strip())
        if not m:
            raise UnitError(f"unit {unit!r} is not a frequency times um^{power}")
        return frequency({"value": v, "unit": m.group(1), "two_pi": two_pi})

    parse.__name__ = f"C{power} coefficient"
    return parse


def dimensionless(value: Any) -> float:
    v, unit, _ = _normalize(value)
    if unit is not None:
        raise UnitError(f"expected a plain number, got unit {unit!r}")
    return v
