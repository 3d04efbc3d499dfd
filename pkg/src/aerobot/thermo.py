"""Open-system gas thermodynamics of the two chambers.

Each chamber is a spatially averaged ideal-gas control volume. The reservoir
(SP) is constant-volume; the outer chamber (ZP) does boundary work as it
expands. Enthalpy flows ride the pump (adiabatic compression, so the outlet
runs hot) and the vent (isenthalpic). Temperature rates come straight from
the first law with internal energy m c_v T and enthalpy streams at c_p.
"""
from __future__ import annotations

from dataclasses import dataclass

from .constants import HELIUM, GasProperties
from .errors import ValidationError

SANITY_BAND_K = (100.0, 800.0)


@dataclass(frozen=True)
class GasChamberState:
    """Mass, temperature, volume, pressure of one chamber's gas."""

    chamber: str                # "sp" | "zp"
    m: float                    # kg
    T: float                    # K
    V: float                    # m^3
    P: float                    # Pa

    def __post_init__(self):
        if min(self.m, self.T, self.V, self.P) <= 0:
            raise ValidationError(f"{self.chamber}: m, T, V, P must be positive")

    def ideal_gas_residual(self, gas: GasProperties = HELIUM) -> float:
        """Relative error of P V = m R T."""
        return abs(self.P * self.V / (self.m * gas.R * self.T) - 1.0)


@dataclass(frozen=True)
class ThermalState:
    """Envelope node temperatures plus both gas temperatures."""

    t_nodes: tuple              # (T1, T2, T3, T4) K
    t_sp: float
    t_zp: float
    node_heat_capacity: tuple   # (mc1..mc4) J/K

    def __post_init__(self):
        lo, hi = SANITY_BAND_K
        for T in (*self.t_nodes, self.t_sp, self.t_zp):
            if not (lo < T < hi):
                raise ValidationError(
                    f"temperature {T:.1f} K outside sanity band ({lo}, {hi})")
        if any(c <= 0 for c in self.node_heat_capacity):
            raise ValidationError("node heat capacities must be positive")


def sp_temp_rate(m: float, t_sp: float, mdot_sp: float, qdot_sp: float,
                 dh_sp: float, gas: GasProperties = HELIUM) -> float:
    """Reservoir gas temperature rate at constant volume.

    dh_sp is the net enthalpy rate crossing the boundary (pump outlet in,
    vent draw out).
    """
    if m <= 0:
        raise ValidationError("chamber mass must be positive")
    return (-mdot_sp * gas.c_v * t_sp + qdot_sp + dh_sp) / (m * gas.c_v)


def zp_temp_rate(m: float, t_zp: float, mdot_zp: float, qdot_zp: float,
                 p_zp: float, vdot_zp: float, dh_zp: float,
                 gas: GasProperties = HELIUM) -> float:
    """Outer-chamber gas temperature rate including boundary work -P dV."""
    if m <= 0:
        raise ValidationError("chamber mass must be positive")
    return (-mdot_zp * gas.c_v * t_zp + qdot_zp - p_zp * vdot_zp + dh_zp) \
        / (m * gas.c_v)


def zp_temp_rate_pressure_closed(m: float, t_zp: float, mdot_zp: float,
                                 qdot_zp: float, v_zp: float, pdot_zp: float,
                                 dh_zp: float, gas: GasProperties = HELIUM) -> float:
    """Outer-chamber temperature rate with the volume eliminated.

    Substituting the ideal-gas closure V = m R T / P into the boundary-work
    form gives Tdot = (-mdot c_p T + qdot + V Pdot + dH) / (m c_p), which the
    engine uses because the chamber volume follows pressure rather than being
    integrated. Algebraically identical to zp_temp_rate along any trajectory.
    """
    if m <= 0:
        raise ValidationError("chamber mass must be positive")
    return (-mdot_zp * gas.c_p * t_zp + qdot_zp + v_zp * pdot_zp + dh_zp) \
        / (m * gas.c_p)


def node_temp_rate(qdot: float, mc: float) -> float:
    """Envelope node temperature rate qdot / (m c)."""
    if mc <= 0:
        raise ValidationError("node heat capacity must be positive")
    return qdot / mc


def pump_enthalpy(mdot_pump: float, t_zp: float, p_sp_abs: float, p_atm: float,
                  gas: GasProperties = HELIUM) -> tuple:
    """(H_in, H_out, T_out) for the adiabatic pump path, ZP inlet to SP outlet.

    The outlet temperature uses the printed pressure ratio against ambient
    static pressure; the outer chamber rides within a fraction of a percent
    of ambient, so the distinction is negligible but kept as published.
    """
    if p_sp_abs <= 0 or p_atm <= 0:
        raise ValidationError("pressures must be positive")
    t_out = t_zp * (p_sp_abs / p_atm) ** ((gas.k_ratio - 1.0) / gas.k_ratio)
    h_in = mdot_pump * gas.c_p * t_zp
    h_out = mdot_pump * gas.c_p * t_out
    return h_in, h_out, t_out


def vent_enthalpy(mdot_vent: float, t_sp: float,
                  gas: GasProperties = HELIUM) -> tuple:
    """(H_in, H_out) for the isenthalpic vent path, SP to ZP."""
    h = mdot_vent * gas.c_p * t_sp
    return h, h


def close_gas_state(chamber: str, m: float, T: float, *,
                    v_fixed: float | None = None, p_match: float | None = None,
                    v_max: float | None = None,
                    gas: GasProperties = HELIUM) -> GasChamberState:
    """Ideal-gas closure of one chamber.

    Fixed-volume closure (reservoir, or a taut outer envelope) solves P from
    V; pressure-match closure (slack outer envelope) pins P to the supplied
    ambient reference and solves V. When a pressure-match closure would
    exceed v_max the chamber has gone taut and the closure switches to fixed
    volume at v_max, the fully inflated float condition.
    """
    if m <= 0 or T <= 0:
        raise ValidationError("mass and temperature must be positive")
    if (v_fixed is None) == (p_match is None):
        raise ValidationError("exactly one of v_fixed / p_match required")
    if v_fixed is not None:
        return GasChamberState(chamber, m, T, v_fixed, m * gas.R * T / v_fixed)
    v = m * gas.R * T / p_match
    if v_max is not None and v > v_max:
        return GasChamberState(chamber, m, T, v_max, m * gas.R * T / v_max)
    return GasChamberState(chamber, m, T, v, p_match)
