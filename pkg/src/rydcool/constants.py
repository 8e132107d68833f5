"""Unit system and physical constants.

Internal units: hbar = 1, lengths in micrometres, masses in unified atomic
mass units, and every frequency/energy is a number ``x`` standing for the
angular frequency ``2*pi*x kHz``. Tabulated ``/2pi (kHz)`` values therefore
enter unchanged. All conversion factors live here.
"""

import math

from scipy import constants as _c

TWO_PI = 2.0 * math.pi

#: hbar / (u * um^2) expressed in 2*pi*kHz.
HBAR_OVER_U_UM2 = _c.hbar / (_c.atomic_mass * 1e-12) / (TWO_PI * 1e3)

#: One Debye^2 / (4 pi eps0 um^3), as an ordinary frequency in kHz.
DEBYE2_UM3_KHZ = (1e-21 / _c.c) ** 2 / (4 * math.pi * _c.epsilon_0 * 1e-18) / _c.h / 1e3

#: e*a0 in Debye.
EA0_IN_DEBYE = _c.e * _c.physical_constants["Bohr radius"][0] / (1e-21 / _c.c)

#: Bohr and nuclear magnetons, as ordinary frequency per field (kHz / mT).
MU_B_KHZ_PER_MT = _c.physical_constants["Bohr magneton in Hz/T"][0] * 1e-3 * 1e-3
MU_N_KHZ_PER_MT = _c.physical_constants["nuclear magneton in MHz/T"][0] * 1e3 * 1e-3

#: Electron spin g-factor magnitude.
G_S = -_c.physical_constants["electron g factor"][0]
G_L = 1.0

#: Isotopic masses (u).
ATOMIC_MASS = {
    "Li6": 6.0151228874,
    "Na23": 22.9897692820,
    "Rb87": 86.9091805310,
    "Cs133": 132.9054519610,
    "Ca40": 39.962590863,
    "F19": 18.998403163,
}

SPECIES_MASS = {
    "Li": ATOMIC_MASS["Li6"],
    "Na": ATOMIC_MASS["Na23"],
    "Rb": ATOMIC_MASS["Rb87"],
    "Cs": ATOMIC_MASS["Cs133"],
    "NaCs": ATOMIC_MASS["Na23"] + ATOMIC_MASS["Cs133"],
    "LiCs": ATOMIC_MASS["Li6"] + ATOMIC_MASS["Cs133"],
    "CaF": ATOMIC_MASS["Ca40"] + ATOMIC_MASS["F19"],
}
