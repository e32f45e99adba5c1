"""Closed-form conversions between the informational and customary notions of mass.

Relations used throughout::

    c = a / tau
    m = hbar * omega / c**2
    lambda = c / omega = hbar / (m c)
    M = hbar / (2 a c),   mu = m / M = 2 a / lambda

A zero mass (or frequency) is admissible and maps to an infinite Compton
wavelength; negative or non-finite inputs are rejected.
"""

from __future__ import annotations

import math

from .errors import ArgumentError
from .lattice import LatticeParams, MassCoupling


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise ArgumentError(f"{name} must be positive and finite, got {value}")


def _nonnegative(name, value):
    if not (value >= 0 and math.isfinite(value)):
        raise ArgumentError(f"{name} must be nonnegative and finite, got {value}")


def planck_like_mass(params: LatticeParams, hbar: float) -> float:
    """Mass ``M = hbar / (2 a c)`` at which propagation halts."""
    _positive("hbar", hbar)
    return hbar / (2.0 * params.chorus * params.max_speed())


def omega_from_mu(mass: MassCoupling, params: LatticeParams) -> float:
    """Angular frequency (1/time) of the direction flips: ``omega = mu c / (2a)``."""
    return mass.mu * params.max_speed() / (2.0 * params.chorus)


def mu_from_omega(omega: float, params: LatticeParams) -> MassCoupling:
    _nonnegative("omega", omega)
    return MassCoupling(2.0 * params.chorus * omega / params.max_speed())


def mass_kg_from_omega(omega: float, hbar: float, c: float) -> float:
    _nonnegative("omega", omega)
    _positive("hbar", hbar)
    _positive("c", c)
    return hbar * omega / c**2


def omega_from_mass_kg(mass_kg: float, hbar: float, c: float) -> float:
    _nonnegative("mass_kg", mass_kg)
    _positive("hbar", hbar)
    _positive("c", c)
    return mass_kg * c**2 / hbar


def compton_wavelength(mass_kg: float, hbar: float, c: float) -> float:
    """``hbar / (m c)``; ``inf`` for a massless field."""
    _nonnegative("mass_kg", mass_kg)
    _positive("hbar", hbar)
    _positive("c", c)
    if mass_kg == 0.0:
        return math.inf
    return hbar / (mass_kg * c)


def compton_wavelength_from_omega(omega: float, c: float) -> float:
    """``c / omega``; ``inf`` for ``omega == 0``."""
    _nonnegative("omega", omega)
    _positive("c", c)
    return math.inf if omega == 0.0 else c / omega


def mu_from_compton(wavelength: float, params: LatticeParams) -> float:
    """``2a / lambda``."""
    _positive("wavelength", wavelength)
    return 2.0 * params.chorus / wavelength


def mu_from_mass_kg(mass_kg: float, params: LatticeParams, hbar: float) -> float:
    """``m / M``."""
    _nonnegative("mass_kg", mass_kg)
    return mass_kg / planck_like_mass(params, hbar)
