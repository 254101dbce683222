"""Nonretarded Casimir-Polder shift of a molecule facing a dielectric half-space.

The X axis is the surface normal, so the X dipole component carries weight 2.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import constants as C

__all__ = ["CasimirInput", "cp_shift", "cp_shift_au", "effective_input"]


@dataclass(frozen=True)
class CasimirInput:
    distance_nm: float
    n1: float
    dipole_terms: tuple  # (|d_X|^2, |d_Y|^2, |d_Z|^2) per transition, atomic units

    def __post_init__(self):
        if not self.distance_nm > 0:
            raise ValueError("distance to the surface must be positive")
        if not self.n1 > 1:
            raise ValueError("refractive index must exceed 1")
        terms = tuple(tuple(float(v) for v in t) for t in self.dipole_terms)
        for t in terms:
            if len(t) != 3 or min(t) < 0:
                raise ValueError("each dipole term is three non-negative squared moments")
        object.__setattr__(self, "dipole_terms", terms)


def effective_input(distance_nm: float, n1: float, moment_au: float) -> CasimirInput:
    """Single effective transition with the same moment along X, Y and Z."""
    d2 = float(moment_au) ** 2
    return CasimirInput(distance_nm, n1, ((d2, d2, d2),))


def cp_shift_au(inp: CasimirInput) -> float:
    D = C.nm_to_bohr(inp.distance_nm)
    n2 = inp.n1**2
    weight = sum(2 * dx + dy + dz for dx, dy, dz in inp.dipole_terms)
    return -(n2 - 1) / (n2 + 1) * weight / (16 * D**3)


def cp_shift(inp: CasimirInput) -> float:
    """Energy shift in uK (negative: attraction towards the surface)."""
    return C.hartree_to_uK(cp_shift_au(inp))
