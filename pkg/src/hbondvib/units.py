"""
Unit conversions and physical constants.

All internal computations run in atomic units (Hartree, Bohr, electron
masses). Input data usually arrives in Angstrom and Hartree; this module
converts between the two and defines the small mass parameter epsilon from
a reference nuclear mass.

Constants are CODATA-2018 values, fixed here rather than pulled from
``scipy.constants`` so that results do not drift with the scipy version.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

HARTREE_TO_WAVENUMBER = 219474.6313632  # cm^-1 per Hartree
BOHR_RADIUS_ANGSTROM = 0.529177210903
ANGSTROM_TO_BOHR = 1.0 / BOHR_RADIUS_ANGSTROM
HARTREE_TO_EV = 27.211386245988
AMU_TO_ELECTRON_MASS = 1822.888486209

# nuclear masses in electron masses (atomic mass minus bound electrons)
PROTON_MASS = 1836.15267343
FLUORINE19_NUCLEUS = 18.998403163 * AMU_TO_ELECTRON_MASS - 9.0
CARBON12_NUCLEUS = 12.0 * AMU_TO_ELECTRON_MASS - 6.0

NAMED_MASSES = {"proton": PROTON_MASS, "fluorine19": FLUORINE19_NUCLEUS,
                "carbon12": CARBON12_NUCLEUS}


class Dimension(enum.Enum):
    """The closed set of physical dimensions the package converts."""

    LENGTH = "length"
    ENERGY = "energy"
    MASS = "mass"
    ENERGY_PER_LENGTH2 = "energy/length^2"
    ENERGY_PER_LENGTH3 = "energy/length^3"
    ENERGY_PER_LENGTH4 = "energy/length^4"


# (energy power, length power, mass power)
_EXPONENTS = {
    Dimension.LENGTH: (0, 1, 0),
    Dimension.ENERGY: (1, 0, 0),
    Dimension.MASS: (0, 0, 1),
    Dimension.ENERGY_PER_LENGTH2: (1, -2, 0),
    Dimension.ENERGY_PER_LENGTH3: (1, -3, 0),
    Dimension.ENERGY_PER_LENGTH4: (1, -4, 0),
}

LENGTH_UNITS = {"bohr": 1.0, "angstrom": ANGSTROM_TO_BOHR}
ENERGY_UNITS = {"hartree": 1.0, "ev": 1.0 / HARTREE_TO_EV}
MASS_UNITS = {"electron_mass": 1.0, "amu": AMU_TO_ELECTRON_MASS}


@dataclass(frozen=True)
class UnitSystem:
    """Multipliers taking one input unit to the corresponding atomic unit."""

    length_to_bohr: float = 1.0
    energy_to_hartree: float = 1.0
    mass_to_electron_mass: float = 1.0

    def __post_init__(self):
        for name in ("length_to_bohr", "energy_to_hartree", "mass_to_electron_mass"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")

    @classmethod
    def from_names(cls, length="bohr", energy="hartree", mass="electron_mass"):
        try:
            return cls(LENGTH_UNITS[length.lower()], ENERGY_UNITS[energy.lower()],
                       MASS_UNITS[mass.lower()])
        except KeyError as exc:
            raise ValueError(f"unknown unit name {exc.args[0]!r}") from None

    def factor(self, dim):
        e, l, m = _EXPONENTS[Dimension(dim)]
        return self.energy_to_hartree ** e * self.length_to_bohr ** l * self.mass_to_electron_mass ** m


ATOMIC = UnitSystem()
ANGSTROM_HARTREE = UnitSystem(length_to_bohr=ANGSTROM_TO_BOHR)


def hartree_to_wavenumber(e):
    """Convert an energy in Hartree to cm^-1."""
    if not math.isfinite(e):
        raise ValueError("energy must be finite")
    return e * HARTREE_TO_WAVENUMBER


def epsilon_from_reference_mass(m_ref):
    """Return epsilon = m_ref**(-1/4) for a reference mass in electron masses.

    With the carbon-12 nucleus as reference this gives epsilon ~ 0.08221.
    """
    if not m_ref > 0:
        raise ValueError(f"reference mass must be positive, got {m_ref!r}")
    return m_ref ** -0.25


def to_atomic(value, dim, units):
    """Express ``value`` (given in ``units``) in atomic units."""
    return value * units.factor(dim)


def from_atomic(value, dim, units):
    """Inverse of :func:`to_atomic`."""
    return value / units.factor(dim)


def constants_table():
    """The conversion constants used by the package, for audit output."""
    return {
        "hartree_to_wavenumber": (HARTREE_TO_WAVENUMBER, "cm^-1/hartree"),
        "angstrom_to_bohr": (ANGSTROM_TO_BOHR, "bohr/angstrom"),
        "amu_to_electron_mass": (AMU_TO_ELECTRON_MASS, "m_e/u"),
        "proton_mass": (PROTON_MASS, "m_e"),
        "fluorine19_nucleus": (FLUORINE19_NUCLEUS, "m_e"),
        "carbon12_nucleus": (CARBON12_NUCLEUS, "m_e"),
        "epsilon_carbon12": (epsilon_from_reference_mass(CARBON12_NUCLEUS), "1"),
    }
