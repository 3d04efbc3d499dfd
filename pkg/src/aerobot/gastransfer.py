"""Helium transfer between chambers: pump, vent, and termination poppet.

The pump is a fixed-displacement device moving gas from the outer (ZP)
chamber into the reservoir (SP); the vent is a sharp-edged orifice releasing
reservoir gas back into the outer chamber; the poppet dumps outer-chamber
gas to the atmosphere to terminate a flight. All devices are one-way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ValidationError


@dataclass(frozen=True)
class TransferDeviceSpec:
    """Pump displacement rate and orifice geometries."""

    pump_vdot: float            # m^3/s swept at the pump inlet
    vent_cd: float = 0.6        # sharp-edged orifice default
    vent_d: float = 0.007       # m
    poppet_cd: float = 0.6
    poppet_d: float = 0.095     # m

    def __post_init__(self):
        for name in ("pump_vdot", "vent_cd", "vent_d", "poppet_cd", "poppet_d"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.vent_cd > 1.0 or self.poppet_cd > 1.0:
            raise ValidationError("discharge coefficients must be in (0, 1]")


class CommandKind(str, Enum):
    PUMP_ON = "pump_on"
    PUMP_OFF = "pump_off"
    VENT_OPEN = "vent_open"
    VENT_CLOSE = "vent_close"
    POPPET_OPEN = "poppet_open"


@dataclass(frozen=True)
class TransferCommand:
    t: float
    kind: CommandKind

    def __post_init__(self):
        if self.t < 0:
            raise ValidationError("command timestamps must be non-negative")


def load_commands(text: str) -> list:
    """Parse commands.csv (t_s,action) into a time-ordered timeline."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].replace(" ", "") != "t_s,action":
        raise ValidationError("expected header 't_s,action'")
    cmds = []
    for k, ln in enumerate(lines[1:], start=2):
        parts = [p.strip() for p in ln.split(",")]
        if len(parts) != 2:
            raise ValidationError(f"row {k}: expected 2 columns")
        try:
            cmds.append(TransferCommand(float(parts[0]), CommandKind(parts[1])))
        except ValueError as e:
            raise ValidationError(f"row {k}: {e}") from None
    if any(b.t < a.t for a, b in zip(cmds, cmds[1:])):
        raise ValidationError("command timestamps must be ordered")
    return cmds


def serialize_commands(cmds) -> str:
    lines = ["t_s,action"]
    for c in cmds:
        lines.append(f"{c.t!r},{c.kind.value}")
    return "\n".join(lines) + "\n"


def pump_flow(rho_zp: float, spec: TransferDeviceSpec, on: bool = True) -> float:
    """Pump mass flow, ZP -> SP: rho_ZP * Vdot, zero when commanded off."""
    if rho_zp <= 0:
        raise ValidationError("rho_zp must be positive")
    return rho_zp * spec.pump_vdot if on else 0.0


def orifice_flow(cd: float, d: float, rho_up: float, dp: float) -> float:
    """Incompressible orifice relation Cd (pi/4) d^2 sqrt(2 rho dp), one-way."""
    if dp <= 0.0:
        return 0.0
    return cd * math.pi / 4.0 * d * d * math.sqrt(2.0 * rho_up * dp)


def vent_flow(rho_sp: float, p_sp: float, p_zp: float,
              spec: TransferDeviceSpec, open_: bool = True) -> float:
    """Vent mass flow, SP -> ZP; zero against an adverse pressure gradient."""
    if rho_sp <= 0:
        raise ValidationError("rho_sp must be positive")
    if not open_:
        return 0.0
    return orifice_flow(spec.vent_cd, spec.vent_d, rho_sp, p_sp - p_zp)


def poppet_flow(rho_zp: float, p_zp: float, p_atm: float,
                spec: TransferDeviceSpec, open_: bool = True) -> float:
    """Termination poppet mass flow, ZP -> atmosphere."""
    if not open_:
        return 0.0
    return orifice_flow(spec.poppet_cd, spec.poppet_d, rho_zp, p_zp - p_atm)


def apply_transfer(m_sp: float, m_zp: float, mdot_pump: float, mdot_vent: float,
                   mdot_poppet: float, dt: float, m_lost: float = 0.0,
                   floor_sp: float = 0.0, floor_zp: float = 0.0):
    """Advance chamber masses one step with explicit bookkeeping.

    Flows are clamped so neither chamber dips below its floor within the step
    (the caller sets floors at 1% of initial fill); the helium ledger
    m_sp + m_zp + m_lost is conserved exactly. Returns
    (m_sp, m_zp, m_lost, clamped).
    """
    if dt <= 0:
        raise ValidationError("dt must be positive")
    if m_sp <= 0 or m_zp <= 0:
        raise ValidationError("chamber masses must be positive")
    clamped = False
    net_sp = mdot_pump - mdot_vent
    if m_sp + net_sp * dt < floor_sp:
        scale = (m_sp - floor_sp) / max(-net_sp * dt, 1e-300)
        mdot_pump *= scale
        mdot_vent *= scale
        net_sp = mdot_pump - mdot_vent
        clamped = True
    net_zp = mdot_vent - mdot_pump - mdot_poppet
    if m_zp + net_zp * dt < floor_zp:
        avail = m_zp - floor_zp + (mdot_vent - mdot_pump) * dt
        mdot_poppet = max(avail, 0.0) / dt if mdot_poppet > 0 else 0.0
        net_zp = mdot_vent - mdot_pump - mdot_poppet
        clamped = True
    m_sp_new = m_sp + net_sp * dt
    m_zp_new = m_zp + net_zp * dt
    m_lost_new = m_lost + mdot_poppet * dt
    return m_sp_new, m_zp_new, m_lost_new, clamped


@dataclass
class ActuatorState:
    """Latched pump/vent/poppet switch state driven by a command timeline."""

    pump_on: bool = False
    vent_open: bool = False
    poppet_open: bool = False

    def apply(self, cmd: TransferCommand) -> None:
        k = cmd.kind
        if k == CommandKind.PUMP_ON:
            self.pump_on = True
        elif k == CommandKind.PUMP_OFF:
            self.pump_on = False
        elif k == CommandKind.VENT_OPEN:
            self.vent_open = True
        elif k == CommandKind.VENT_CLOSE:
            self.vent_open = False
        elif k == CommandKind.POPPET_OPEN:
            self.poppet_open = True        # termination is one-way
