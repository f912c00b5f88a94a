"""Conversion between SI / atomic inputs and the internal unit system.

Internally hbar = c = eps0 = 1, frequencies are in units of omega_ref, lengths in
c/omega_ref and energies in hbar*omega_ref. Magnetic moments are carried as m/c, so
both dipole kinds share the internal dipole unit sqrt(hbar*eps0*c^3/omega_ref^2).
"""

import math
from enum import StrEnum

from scipy import constants

HBAR = constants.hbar
C_LIGHT = constants.c
EPSILON_0 = constants.epsilon_0
E_BOHR = constants.e * constants.physical_constants["Bohr radius"][0]
BOHR_MAGNETON = constants.physical_constants["Bohr magneton"][0]
FINE_STRUCTURE = constants.fine_structure

# Rb D2 line, 780.24 nm
DEFAULT_OMEGA_REF = 2.0 * math.pi * C_LIGHT / 780.241e-9


class UnitSystem(StrEnum):
    INTERNAL = "internal"
    ATOMIC = "atomic"
    SI = "SI"


def dipole_unit(omega_ref: float) -> float:
    """Internal electric dipole unit in C*m."""
    return math.sqrt(HBAR * EPSILON_0 * C_LIGHT**3 / omega_ref**2)


def length_unit(omega_ref: float) -> float:
    """Internal length unit c/omega_ref in m."""
    return C_LIGHT / omega_ref


def energy_unit(omega_ref: float) -> float:
    """Internal energy unit hbar*omega_ref in J."""
    return HBAR * omega_ref


def force_unit(omega_ref: float) -> float:
    return energy_unit(omega_ref) / length_unit(omega_ref)


def electric_dipole_to_internal(
    value: float, units: UnitSystem, omega_ref: float
) -> float:
    match units:
        case UnitSystem.INTERNAL:
            return value
        case UnitSystem.ATOMIC:
            return value * E_BOHR / dipole_unit(omega_ref)
        case UnitSystem.SI:
            return value / dipole_unit(omega_ref)
    raise ValueError(f"electric_dipole_to_internal: unknown unit system {units!r}")


def magnetic_dipole_to_internal(
    value: float, units: UnitSystem, omega_ref: float
) -> float:
    """Convert a magnetic moment to the internal m/c representation."""
    match units:
        case UnitSystem.INTERNAL:
            return value
        case UnitSystem.ATOMIC:
            return value * BOHR_MAGNETON / C_LIGHT / dipole_unit(omega_ref)
        case UnitSystem.SI:
            return value / C_LIGHT / dipole_unit(omega_ref)
    raise ValueError(f"magnetic_dipole_to_internal: unknown unit system {units!r}")


def frequency_to_internal(value: float, units: UnitSystem, omega_ref: float) -> float:
    """Atomic molecule files give transition frequencies in omega_ref already."""
    if units is UnitSystem.SI:
        return value / omega_ref
    return value
