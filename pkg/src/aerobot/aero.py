"""Aerodynamic drag and virtual mass.

Drag uses constant coefficients referred to a fixed reference area; variation
of the actual projected areas enters through the coefficient matrix ratios.
Virtual mass scales the displaced volume by a constant coefficient and adds
to the inertia on every translational axis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class AeroCoefficients:
    c_d_top: float = 0.8
    c_d_side: float = 1.0
    c_m: float = 0.2
    a_ref: float = 1.0           # m^2, fixed reference projection

    def __post_init__(self):
        if min(self.c_d_top, self.c_d_side, self.c_m, self.a_ref) <= 0:
            raise ValidationError("aero coefficients must be positive")


def drag_matrix(coeffs: AeroCoefficients, a_top: float, a_side: float) -> np.ndarray:
    """Diagonal drag-coefficient matrix (x, y, z) scaled by projected areas."""
    if a_top <= 0 or a_side <= 0:
        raise ValidationError("projected areas must be positive")
    cd_side = coeffs.c_d_side * a_side / coeffs.a_ref
    cd_top = coeffs.c_d_top * a_top / coeffs.a_ref
    return np.diag([cd_side, cd_side, cd_top])


def drag_force(rho_atm: float, coeffs: AeroCoefficients, a_top: float,
               a_side: float, v_rel) -> np.ndarray:
    """Drag force vector opposing relative motion, body axes.

    -0.5 rho A_ref |v| (C_D v) with the diagonal coefficient matrix, which is
    the quadratic-drag law applied per axis.
    """
    if rho_atm <= 0:
        raise ValidationError("rho_atm must be positive")
    v = np.asarray(v_rel, dtype=float)
    speed = float(np.linalg.norm(v))
    if speed == 0.0:
        return np.zeros(3)
    cd = drag_matrix(coeffs, a_top, a_side)
    return -0.5 * rho_atm * coeffs.a_ref * speed * (cd @ v)


def drag_force_components(rho_atm: float, coeffs: AeroCoefficients, a_top: float,
                          a_side: float, vx: float, vy: float, vz: float) -> tuple:
    """Scalar form of drag_force for the integrator hot path."""
    speed = (vx * vx + vy * vy + vz * vz) ** 0.5
    if speed == 0.0:
        return (0.0, 0.0, 0.0)
    ks = -0.5 * rho_atm * speed * coeffs.c_d_side * a_side
    kt = -0.5 * rho_atm * speed * coeffs.c_d_top * a_top
    return (ks * vx, ks * vy, kt * vz)


def virtual_mass(c_m: float, rho_atm: float, volume: float) -> float:
    """Added inertia of the accelerated surrounding fluid, kg."""
    if volume < 0:
        raise ValidationError("volume must be >= 0")
    return c_m * rho_atm * volume
