"""Numerical constructions behind the second-order (LHY) lower bound for the dilute Bose gas."""

from __future__ import annotations

from .bogolubov import LHY_COEFFICIENT, LHY_INTEGRAL, lhy_dimensionless_integral
from .potentials import RadialPotential, parse_potential
from .regime import select_parameters
from .scattering import scattering_length_ode

__all__ = [
    "LHY_COEFFICIENT",
    "LHY_INTEGRAL",
    "RadialPotential",
    "lhy_dimensionless_integral",
    "parse_potential",
    "scattering_length_ode",
    "select_parameters",
]
