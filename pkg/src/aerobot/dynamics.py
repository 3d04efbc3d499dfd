"""Deterministic time-stepped flight engine.

One engine instance advances a single aerobot: chamber masses and
temperatures, four envelope node temperatures, and translational motion, all
integrated together with fixed-step RK4. Within a step the exogenous inputs
(winds, irradiances, solar zenith) and the actuator/heat-network wiring are
held at their step-start values, which keeps replay reconstruction exact;
the atmospheric column and all gas closures are evaluated continuously at
every integrator stage.

Vertical force balance: buoyancy of the displaced volume (outer gas bubble
plus reservoir sphere) against total weight and quadratic drag, with virtual
mass added to the inertia on every axis; horizontally only drag against the
relative wind acts. The outer chamber's pressure closure pins its bulk
pressure to the atmospheric static pressure at the height where the envelope
gauge pressure crosses zero, read from the shape table, and switches to a
constant-volume superpressure closure when the envelope goes taut (10 Pa
hysteresis on the way back).
"""
from __future__ import annotations

import bisect
import math
from collections import deque
from dataclasses import dataclass

from .aero import AeroCoefficients
from .atmosphere import AtmosphereProfile, RadiationEnvironment
from .constants import HELIUM
from .envelope import EnvelopeSpec
from .errors import EngineFault, SolverError, ValidationError
from .gastransfer import (ActuatorState, CommandKind, TransferCommand,
                          TransferDeviceSpec, orifice_flow)
from .heat import HeatNetwork, SurfaceOptics
from .shapetable import ShapeTable
from .thermo import SANITY_BAND_K

TRAJ_HEADER = ("t_s,east_m,north_m,alt_m,vz_ms,m_sp_kg,m_zp_kg,p_sp_pa,p_zp_pa,"
               "t_sp_k,t_zp_k,t1_k,t2_k,t3_k,t4_k,v_zp_m3,mode,event")

MODE_SLACK = "slack"
MODE_FULL = "fully-inflated"
FULL_HYSTERESIS_PA = 10.0


@dataclass(frozen=True)
class AerobotConfig:
    """Masses, devices, optics, and initial fills for one aerobot."""

    envelope: EnvelopeSpec
    m_sp_env: float
    m_zp_env: float
    m_payload: float
    devices: TransferDeviceSpec
    aero: AeroCoefficients
    m_sp_gas0: float
    m_zp_gas0: float
    free_lift: float                      # kg equivalent at launch
    node_heat_capacity: tuple = (2000.0, 6000.0, 4000.0, 5000.0)
    optics: tuple = (SurfaceOptics(0.08, 0.52), SurfaceOptics(0.30, 0.85),
                     SurfaceOptics(0.08, 0.52), SurfaceOptics(0.08, 0.52))
    eps_sp_gas: float = 1.0
    eps_zp_gas: float = 1.0
    include_poppet_enthalpy: bool = True
    launch_alt_m: float = 0.0
    terrain_alt_m: float = 0.0
    start_with_wind: bool = False    # deployed aloft, drifting with the airmass

    def __post_init__(self):
        if min(self.m_sp_env, self.m_zp_env, self.m_payload,
               self.m_sp_gas0, self.m_zp_gas0) <= 0:
            raise ValidationError("masses must be positive")
        if len(self.node_heat_capacity) != 4 or len(self.optics) != 4:
            raise ValidationError("need four node capacities and optics entries")

    @property
    def m_dry(self) -> float:
        return self.m_sp_env + self.m_zp_env + self.m_payload


@dataclass(frozen=True)
class Environment:
    """Atmosphere plus radiative environment and wind channels.

    wind_time, when given, overrides the profile's altitude winds with a
    time-keyed table (t, east, north, up) sampled zero-order-hold at step
    boundaries. zenith_of is an optional callable (t, east_m, north_m) ->
    solar zenith in radians used by zenith-keyed radiation channels and the
    day/night switch.
    """

    atmosphere: AtmosphereProfile
    radiation: RadiationEnvironment = RadiationEnvironment()
    wind_time: tuple | None = None        # (t_knots, east, north, up)
    zenith_of: object = None

    def wind_at(self, t: float, alt: float) -> tuple:
        if self.wind_time is not None:
            tk, e, n, u = self.wind_time
            i = min(max(bisect.bisect_right(tk, t) - 1, 0), len(tk) - 1)
            return (e[i], n[i], u[i])
        if self.atmosphere.winds is not None:
            return self.atmosphere.winds.sample(alt)
        return (0.0, 0.0, 0.0)


@dataclass
class SimState:
    """Full engine state between steps."""

    t: float
    east: float
    north: float
    alt: float
    vx: float
    vy: float
    vz: float
    m_sp: float
    m_zp: float
    m_lost: float
    t_sp: float
    t_zp: float
    t_nodes: tuple
    mode: str = MODE_SLACK
    audit: tuple = (0.0,) * 8
    # derived, refreshed by the engine after each step
    p_sp: float = 0.0
    p_zp: float = 0.0
    v_zp: float = 0.0
    event: str = ""


@dataclass(frozen=True)
class TrajectoryRecord:
    """Recorded run output: snapshot rows at the recorder cadence."""

    rows: tuple                  # dict per snapshot
    events: tuple                # (t, kind, detail)
    fault: str | None = None

    def column(self, name: str) -> list:
        return [r[name] for r in self.rows]

    def to_csv(self) -> str:
        lines = [TRAJ_HEADER]
        for r in self.rows:
            lines.append(
                f"{r['t_s']!r},{r['east_m']!r},{r['north_m']!r},{r['alt_m']!r},"
                f"{r['vz_ms']!r},{r['m_sp_kg']!r},{r['m_zp_kg']!r},"
                f"{r['p_sp_pa']!r},{r['p_zp_pa']!r},{r['t_sp_k']!r},"
                f"{r['t_zp_k']!r},{r['t1_k']!r},{r['t2_k']!r},{r['t3_k']!r},"
                f"{r['t4_k']!r},{r['v_zp_m3']!r},{r['mode']},{r['event']}")
        return "\n".join(lines) + "\n"


class _FastColumn:
    """Piecewise-linear P, T against altitude with last-segment memo.

    Matches atmosphere.sample bit-for-bit inside the table; the engine loop
    calls this several times per integrator stage.
    """

    def __init__(self, profile: AtmosphereProfile):
        self.alt = profile.alt_m
        self.p = profile.pressure_pa
        self.t = profile.temperature_k
        self.r_gas = profile.R_specific
        self.g = profile.surface_gravity
        self.lo = profile.alt_min
        self.hi = profile.alt_max
        self.n = len(self.alt)
        self._i = 0

    def pt(self, z: float) -> tuple:
        alt = self.alt
        if alt[0] <= z <= alt[-1]:
            i = self._i
            if not (alt[i] <= z <= alt[i + 1]):
                i = min(bisect.bisect_right(alt, z) - 1, self.n - 2)
                i = max(i, 0)
                self._i = i
            f = (z - alt[i]) / (alt[i + 1] - alt[i])
            return (self.p[i] + f * (self.p[i + 1] - self.p[i]),
                    self.t[i] + f * (self.t[i + 1] - self.t[i]))
        if z < self.lo:
            raise EngineFault(f"altitude {z:.1f} m below atmosphere bound {self.lo:.1f}")
        if z > self.hi:
            raise EngineFault(f"altitude {z:.1f} m above atmosphere bound {self.hi:.1f}")
        if z < alt[0]:
            lapse = (self.t[1] - self.t[0]) / (alt[1] - alt[0])
            return self._hydro(self.p[0], self.t[0], alt[0], z, lapse)
        lapse = (self.t[-1] - self.t[-2]) / (alt[-1] - alt[-2])
        return self._hydro(self.p[-1], self.t[-1], alt[-1], z, lapse)

    def _hydro(self, p0, t0, z0, z, lapse):
        t = t0 + lapse * (z - z0)
        if abs(lapse) < 1e-12:
            return p0 * math.exp(-self.g * (z - z0) / (self.r_gas * t0)), t
        return p0 * (t / t0) ** (-self.g / (self.r_gas * lapse)), t

    def dpdz(self, z: float) -> float:
        alt = self.alt
        if alt[0] <= z <= alt[-1]:
            i = self._i
            if not (alt[i] <= z <= alt[i + 1]):
                i = max(min(bisect.bisect_right(alt, z) - 1, self.n - 2), 0)
            return (self.p[i + 1] - self.p[i]) / (alt[i + 1] - alt[i])
        p, t = self.pt(z)
        return -self.g * p / (self.r_gas * t)


class Engine:
    """Single-aerobot simulation engine.

    Commands queue in from one producer and are drained only at step
    boundaries; all state is owned by the stepping thread.
    """

    def __init__(self, config: AerobotConfig, environment: Environment,
                 table: ShapeTable, timeline=(), dt: float = 0.5):
        if not (0.0 < dt <= 5.0):
            raise ValidationError("dt must lie in (0, 5] s")
        self.config = config
        self.env = environment
        self.table = table
        self.dt = dt
        self.atm = _FastColumn(environment.atmosphere)
        self.gas = HELIUM
        self.actuators = ActuatorState()
        self._timeline = deque(sorted(timeline, key=lambda c: c.t))
        self._live_queue = deque()
        self._events = []
        self._events_reported = 0
        self._floor_sp = 0.01 * config.m_sp_gas0
        self._floor_zp = 0.01 * config.m_zp_gas0
        self._heatnet = None
        self._heatnet_fill = -1.0
        self._clamp_episode = False
        self._ground_episode = False
        self.state = self._initial_state()
        self._check_free_lift()

    # -- setup helpers -------------------------------------------------------

    def _initial_state(self) -> SimState:
        cfg = self.config
        z0 = cfg.launch_alt_m
        p_atm, t_atm = self.atm.pt(z0)
        vx0 = vy0 = 0.0
        if cfg.start_with_wind:
            vx0, vy0, _ = self.env.wind_at(0.0, z0)
        st = SimState(t=0.0, east=0.0, north=0.0, alt=z0, vx=vx0, vy=vy0,
                      vz=0.0, m_sp=cfg.m_sp_gas0, m_zp=cfg.m_zp_gas0, m_lost=0.0,
                      t_sp=t_atm, t_zp=t_atm,
                      t_nodes=(t_atm, t_atm, t_atm, t_atm))
        self._refresh_derived(st)
        return st

    def zp_closure(self, alt: float, m_zp: float, t_zp: float, mode: str) -> tuple:
        """(P_zp, V_zp, lookup tuple) for the current outer-chamber state."""
        cap = self.config.envelope.gas_capacity
        R = self.gas.R
        p_atm, t_atm = self.atm.pt(alt)
        rho_atm = p_atm / (self.atm.r_gas * t_atm)
        if mode == MODE_FULL:
            v = cap
            p = m_zp * R * t_zp / v
            rho_diff = rho_atm - m_zp / v
            look = self.table.lookup_raw(rho_diff, self.table.fill_axis[-1])
            return p, v, look, rho_atm
        v0 = m_zp * R * t_zp / p_atm
        rho_diff0 = rho_atm - m_zp / v0
        look = self.table.lookup_raw(rho_diff0, min(v0 / cap, 1.0))
        p = self.atm.pt(alt + look[4])[0]          # static pressure at z_p0 height
        v = m_zp * R * t_zp / p
        look = self.table.lookup_raw(rho_atm - m_zp / v, min(v / cap, 1.0))
        return p, v, look, rho_atm

    def _refresh_derived(self, st: SimState) -> None:
        v_sp = self.config.envelope.v_sp
        st.p_sp = st.m_sp * self.gas.R * st.t_sp / v_sp
        p, v, look, _ = self.zp_closure(st.alt, st.m_zp, st.t_zp, st.mode)
        st.p_zp, st.v_zp = p, v

    def _check_free_lift(self) -> None:
        st = self.state
        cfg = self.config
        if cfg.free_lift is None:        # explicitly unchecked configuration
            return
        p_atm, t_atm = self.atm.pt(st.alt)
        rho_atm = p_atm / (self.atm.r_gas * t_atm)
        v_disp = st.v_zp + cfg.envelope.v_sp
        m_total = cfg.m_dry + st.m_sp + st.m_zp
        lift = rho_atm * v_disp - m_total
        if abs(lift - cfg.free_lift) > 1e-3:
            raise ValidationError(
                f"free lift inconsistent with fills: configured "
                f"{cfg.free_lift * 1e3:.1f} g, computed {lift * 1e3:.1f} g")

    # -- public helpers ---------------------------------------------------------

    def enqueue(self, kind: CommandKind) -> None:
        """Queue a live command; it applies at the next step boundary."""
        self._live_queue.append(kind)

    def net_vertical_force(self, st: SimState | None = None) -> float:
        """Buoyancy minus weight minus vertical drag at the current state."""
        st = st or self.state
        p_atm, t_atm = self.atm.pt(st.alt)
        rho_atm = p_atm / (self.atm.r_gas * t_atm)
        g = self.atm.g
        _, v_zp, look, _ = self.zp_closure(st.alt, st.m_zp, st.t_zp, st.mode)
        v_disp = v_zp + self.config.envelope.v_sp
        m_total = self.config.m_dry + st.m_sp + st.m_zp
        we, wn, wu = self.env.wind_at(st.t, st.alt)
        rvx, rvy, rvz = st.vx - we, st.vy - wn, st.vz - wu
        speed = (rvx * rvx + rvy * rvy + rvz * rvz) ** 0.5
        drag_z = -0.5 * rho_atm * speed * self.config.aero.c_d_top * look[1] * rvz
        return rho_atm * v_disp * g - m_total * g + drag_z

    def net_lift_gradient(self, alt: float, dz: float = 5.0) -> float:
        """d(net lift)/dz at fixed masses and temperatures, N/m."""
        st = self.state
        probe = replace_state(st)
        probe.vx = probe.vy = probe.vz = 0.0
        probe.alt = alt + dz
        up = self.net_vertical_force(probe)
        probe.alt = alt - dz
        dn = self.net_vertical_force(probe)
        return (up - dn) / (2 * dz)

    # -- stepping -----------------------------------------------------------------

    def step(self) -> SimState:
        st = self.state
        dt = self.dt

        # (1) commands due at this boundary
        while self._timeline and self._timeline[0].t <= st.t:
            cmd = self._timeline.popleft()
            self.actuators.apply(cmd)
            self._events.append((st.t, "command", cmd.kind.value))
        while self._live_queue:
            kind = self._live_queue.popleft()
            self.actuators.apply(TransferCommand(max(st.t, 0.0), kind))
            self._events.append((st.t, "command", kind.value))

        # (2) mode transitions with hysteresis, then per-step held context
        cap = self.config.envelope.gas_capacity
        p_atm0, t_atm0 = self.atm.pt(st.alt)
        if st.mode == MODE_SLACK:
            p_ref, v_match, look0, _ = self.zp_closure(st.alt, st.m_zp, st.t_zp,
                                                       MODE_SLACK)
            if v_match > cap:
                st.mode = MODE_FULL
                self._events.append((st.t, "mode", MODE_FULL))
        else:
            p_full = st.m_zp * self.gas.R * st.t_zp / cap
            look_edge = self.table.lookup_raw(
                p_atm0 / (self.atm.r_gas * t_atm0) - st.m_zp / cap,
                self.table.fill_axis[-1])
            p_ref = self.atm.pt(st.alt + look_edge[4])[0]
            if p_full < p_ref - FULL_HYSTERESIS_PA:
                st.mode = MODE_SLACK
                self._events.append((st.t, "mode", MODE_SLACK))

        held = self._held_context(st)

        # (3) coupled RK4 over the full continuous state
        y = [st.east, st.north, st.alt, st.vx, st.vy, st.vz,
             st.m_sp, st.m_zp, st.m_lost, st.t_sp, st.t_zp, *st.t_nodes,
             *st.audit]
        try:
            k1 = self._rhs(y, held)
            y2 = [a + 0.5 * dt * b for a, b in zip(y, k1)]
            k2 = self._rhs(y2, held)
            y3 = [a + 0.5 * dt * b for a, b in zip(y, k2)]
            k3 = self._rhs(y3, held)
            y4 = [a + dt * b for a, b in zip(y, k3)]
            k4 = self._rhs(y4, held)
        except (EngineFault, SolverError) as e:
            raise EngineFault(f"step failed at t={st.t:.2f} s, alt="
                              f"{st.alt:.1f} m: {e}") from e
        h6 = dt / 6.0
        y = [a + h6 * (b + 2 * c + 2 * d + e)
             for a, b, c, d, e in zip(y, k1, k2, k3, k4)]

        st.t += dt
        (st.east, st.north, st.alt, st.vx, st.vy, st.vz,
         st.m_sp, st.m_zp, st.m_lost, st.t_sp, st.t_zp) = y[:11]
        st.t_nodes = tuple(y[11:15])
        st.audit = tuple(y[15:23])

        # (4) mass floors: redistribute within the ledger, never create mass
        if st.m_sp < self._floor_sp or st.m_zp < self._floor_zp:
            if not self._clamp_episode:
                self._events.append((st.t, "mass-clamp", f"sp={st.m_sp:.4f},"
                                     f"zp={st.m_zp:.4f}"))
                self._clamp_episode = True
            if st.m_sp < self._floor_sp:
                d = self._floor_sp - st.m_sp
                st.m_sp += d
                st.m_zp -= d
            if st.m_zp < self._floor_zp:
                d = self._floor_zp - st.m_zp
                st.m_zp += d
                if st.m_lost >= d:
                    st.m_lost -= d
                else:
                    st.m_sp -= d
        else:
            self._clamp_episode = False

        # (5) ground contact
        if st.alt < self.config.terrain_alt_m:
            st.alt = self.config.terrain_alt_m
            st.vx = st.vy = st.vz = 0.0
            if not self._ground_episode:
                self._events.append((st.t, "ground-contact",
                                     f"{self.config.terrain_alt_m:.1f} m"))
                self._ground_episode = True
        else:
            self._ground_episode = False

        # (6) sanity checks
        if st.vx * st.vx + st.vy * st.vy + st.vz * st.vz > 500.0 ** 2:
            self._events.append((st.t, "fault", "velocity runaway"))
            raise EngineFault(f"velocity runaway at t={st.t:.2f} s; the drag "
                              "relaxation is unresolved at this dt")
        lo, hi = SANITY_BAND_K
        for T in (st.t_sp, st.t_zp, *st.t_nodes):
            if not (lo < T < hi):
                self._events.append((st.t, "fault", f"temperature {T:.1f} K"))
                raise EngineFault(f"temperature {T:.1f} K outside sanity band "
                                  f"at t={st.t:.2f} s")

        self._refresh_derived(st)
        return st

    def _held_context(self, st: SimState) -> tuple:
        """Exogenous inputs and wiring held constant across the step."""
        env = self.env
        zen = (env.zenith_of(st.t, st.east, st.north)
               if env.zenith_of is not None else None)
        fluxes = env.radiation.fluxes(st.t, st.alt, zenith_rad=zen)
        wind = env.wind_at(st.t, st.alt)
        # refresh the heat network when the envelope geometry moved enough
        _, v_zp, look, _ = self.zp_closure(st.alt, st.m_zp, st.t_zp, st.mode)
        fill = v_zp / self.config.envelope.gas_capacity
        if self._heatnet is None or abs(fill - self._heatnet_fill) > 0.002:
            cfg = self.config
            self._heatnet = HeatNetwork(
                (look[6], look[7], look[8], look[9]), cfg.optics,
                d_sp=2 * cfg.envelope.r_sp,
                d_zp_bubble=2 * math.sqrt(max(look[1], 1e-6) / math.pi),
                height=look[10], atm_gas=env.atmosphere.gas,
                eps_sp_gas=cfg.eps_sp_gas, eps_zp_gas=cfg.eps_zp_gas)
            self._heatnet_fill = fill
        return (self.actuators.pump_on, self.actuators.vent_open,
                self.actuators.poppet_open, st.mode, fluxes, wind, self._heatnet)

    def _rhs(self, y: list, held: tuple) -> list:
        (pump_on, vent_open, poppet_open, mode, fluxes, wind, heatnet) = held
        cfg = self.config
        dev = cfg.devices
        gas = self.gas
        R = gas.R
        cap = cfg.envelope.gas_capacity
        v_sp = cfg.envelope.v_sp
        g = self.atm.g

        (east, north, alt, vx, vy, vz, m_sp, m_zp, m_lost,
         t_sp, t_zp) = y[:11]
        t1, t2, t3, t4 = y[11:15]
        if m_sp <= 0 or m_zp <= 0 or t_sp <= 0 or t_zp <= 0:
            raise EngineFault("non-physical chamber state inside step")

        p_atm, t_atm = self.atm.pt(alt)
        rho_atm = p_atm / (self.atm.r_gas * t_atm)

        # closures
        p_sp = m_sp * R * t_sp / v_sp
        rho_sp = m_sp / v_sp
        if mode == MODE_FULL:
            v_zp = cap
            p_zp = m_zp * R * t_zp / cap
            look = self.table.lookup_raw(rho_atm - m_zp / cap,
                                         self.table.fill_axis[-1])
            pdot_zp = 0.0
        else:
            v0 = m_zp * R * t_zp / p_atm
            look = self.table.lookup_raw(rho_atm - m_zp / v0,
                                         min(v0 / cap, 1.0))
            z_ref = alt + look[4]
            p_zp = self.atm.pt(z_ref)[0]
            v_zp = m_zp * R * t_zp / p_zp
            look = self.table.lookup_raw(rho_atm - m_zp / v_zp,
                                         min(v_zp / cap, 1.0))
            pdot_zp = self.atm.dpdz(z_ref) * vz
        rho_zp = m_zp / v_zp
        a_top, a_side = look[1], look[2]

        # transfer flows and enthalpy streams
        mdot_pump = rho_zp * dev.pump_vdot if pump_on else 0.0
        mdot_vent = (orifice_flow(dev.vent_cd, dev.vent_d, rho_sp, p_sp - p_zp)
                     if vent_open else 0.0)
        mdot_poppet = (orifice_flow(dev.poppet_cd, dev.poppet_d, rho_zp,
                                    p_zp - p_atm) if poppet_open else 0.0)
        mdot_sp = mdot_pump - mdot_vent
        mdot_zp = mdot_vent - mdot_pump - mdot_poppet
        if mdot_pump > 0.0:
            t_pump_out = t_zp * (p_sp / p_atm) ** ((gas.k_ratio - 1.0) / gas.k_ratio)
            h_pump_in = mdot_pump * gas.c_p * t_zp
            h_pump_out = mdot_pump * gas.c_p * t_pump_out
        else:
            h_pump_in = h_pump_out = 0.0
        h_vent = mdot_vent * gas.c_p * t_sp
        dh_sp = h_pump_out - h_vent
        dh_zp = h_vent - h_pump_in
        if cfg.include_poppet_enthalpy and mdot_poppet > 0.0:
            dh_zp -= mdot_poppet * gas.c_p * t_zp

        # heat network
        rel_e, rel_n, rel_u = vx - wind[0], vy - wind[1], vz - wind[2]
        rel_speed = (rel_e * rel_e + rel_n * rel_n + rel_u * rel_u) ** 0.5
        q1, q2, q3, q4, q_sp, q_zp = heatnet.node_heats(
            (t1, t2, t3, t4, t_sp, t_zp), fluxes, t_atm, rho_atm,
            rho_sp, rho_zp, rel_speed)

        # temperature rates
        cv, cp = gas.c_v, gas.c_p
        tdot_sp = (-mdot_sp * cv * t_sp + q_sp + dh_sp) / (m_sp * cv)
        if mode == MODE_FULL:
            tdot_zp = (-mdot_zp * cv * t_zp + q_zp + dh_zp) / (m_zp * cv)
            vdot_zp = 0.0
        else:
            tdot_zp = (-mdot_zp * cp * t_zp + q_zp + v_zp * pdot_zp + dh_zp) \
                / (m_zp * cp)
            vdot_zp = v_zp * (mdot_zp / m_zp + tdot_zp / t_zp - pdot_zp / p_zp)
        mc = cfg.node_heat_capacity
        tdot1, tdot2 = q1 / mc[0], q2 / mc[1]
        tdot3, tdot4 = q3 / mc[2], q4 / mc[3]

        # forces
        v_disp = v_zp + v_sp
        m_total = cfg.m_dry + m_sp + m_zp
        m_eff = m_total + cfg.aero.c_m * rho_atm * v_disp
        speed = rel_speed
        if speed > 0.0:
            ks = -0.5 * rho_atm * speed * cfg.aero.c_d_side * a_side
            kt = -0.5 * rho_atm * speed * cfg.aero.c_d_top * a_top
            fdx, fdy, fdz = ks * rel_e, ks * rel_n, kt * rel_u
        else:
            fdx = fdy = fdz = 0.0
        f_buoy = rho_atm * v_disp * g
        ax = fdx / m_eff
        ay = fdy / m_eff
        az = (f_buoy - m_total * g + fdz) / m_eff

        return [vx, vy, vz, ax, ay, az, mdot_sp, mdot_zp, mdot_poppet,
                tdot_sp, tdot_zp, tdot1, tdot2, tdot3, tdot4,
                q_sp, dh_sp, q_zp, dh_zp, p_zp * vdot_zp,
                fdx * vx + fdy * vy + fdz * vz, f_buoy * vz, mdot_poppet]

    # -- running --------------------------------------------------------------

    def run(self, t_end: float, recorder_cadence: float = 1.0,
            extra_channels: bool = False) -> TrajectoryRecord:
        """Advance to t_end, recording snapshots at the given cadence.

        A fault terminates the run and returns the partial record with the
        fault reason attached.
        """
        every = max(1, int(round(recorder_cadence / self.dt)))
        rows = [self._snapshot(extra_channels)]
        fault = None
        n_steps = int(round((t_end - self.state.t) / self.dt))
        try:
            for k in range(n_steps):
                self.step()
                if (k + 1) % every == 0:
                    rows.append(self._snapshot(extra_channels))
        except EngineFault as e:
            fault = str(e)
            rows.append(self._snapshot(extra_channels))
        return TrajectoryRecord(tuple(rows), tuple(self._events), fault)

    def _snapshot(self, extra: bool = False) -> dict:
        st = self.state
        new_events = self._events[self._events_reported:]
        self._events_reported = len(self._events)
        row = {
            "t_s": st.t, "east_m": st.east, "north_m": st.north,
            "alt_m": st.alt, "vz_ms": st.vz, "m_sp_kg": st.m_sp,
            "m_zp_kg": st.m_zp, "p_sp_pa": st.p_sp, "p_zp_pa": st.p_zp,
            "t_sp_k": st.t_sp, "t_zp_k": st.t_zp, "t1_k": st.t_nodes[0],
            "t2_k": st.t_nodes[1], "t3_k": st.t_nodes[2], "t4_k": st.t_nodes[3],
            "v_zp_m3": st.v_zp, "mode": st.mode,
            "event": ";".join(f"{e[1]}:{e[2]}" for e in new_events) or "",
        }
        if extra:
            zen = (self.env.zenith_of(st.t, st.east, st.north)
                   if self.env.zenith_of is not None else None)
            fx = self.env.radiation.fluxes(st.t, st.alt, zenith_rad=zen)
            we, wn, wu = self.env.wind_at(st.t, st.alt)
            p_atm, t_atm = self.atm.pt(st.alt)
            row.update({
                "wind_e_ms": we, "wind_n_ms": wn, "wind_u_ms": wu,
                "e_up_solar": fx[0], "e_side_solar": fx[1], "e_down_solar": fx[2],
                "e_up_ir": fx[3], "e_side_ir": fx[4], "e_down_ir": fx[5],
                "p_atm_pa": p_atm, "t_atm_k": t_atm,
                "pump": self.actuators.pump_on, "vent": self.actuators.vent_open,
                "poppet": self.actuators.poppet_open,
            })
        return row


def replace_state(st: SimState) -> SimState:
    """Shallow working copy of a SimState."""
    return SimState(t=st.t, east=st.east, north=st.north, alt=st.alt, vx=st.vx,
                    vy=st.vy, vz=st.vz, m_sp=st.m_sp, m_zp=st.m_zp,
                    m_lost=st.m_lost, t_sp=st.t_sp, t_zp=st.t_zp,
                    t_nodes=st.t_nodes, mode=st.mode, audit=st.audit,
                    p_sp=st.p_sp, p_zp=st.p_zp, v_zp=st.v_zp)


def trim_zp_fill_for_free_lift(config: AerobotConfig, environment: Environment,
                               table: ShapeTable, free_lift: float) -> float:
    """Outer-chamber fill mass giving the requested free lift at launch.

    Uses the engine's own pressure closure (including the equality-height
    offset), so a config built from the returned mass passes the init
    consistency check exactly.
    """
    atm = _FastColumn(environment.atmosphere)
    z0 = config.launch_alt_m
    p_atm, t_atm = atm.pt(z0)
    rho_atm = p_atm / (atm.r_gas * t_atm)
    cap = config.envelope.gas_capacity
    R = HELIUM.R

    def lift_of(m_zp):
        v0 = m_zp * R * t_atm / p_atm
        look = table.lookup_raw(rho_atm - m_zp / v0, min(v0 / cap, 1.0))
        p = atm.pt(z0 + look[4])[0]
        v = m_zp * R * t_atm / p
        v_disp = v + config.envelope.v_sp
        m_total = config.m_dry + config.m_sp_gas0 + m_zp
        return rho_atm * v_disp - m_total

    lo, hi = 1e-3, cap * rho_atm * 0.2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if lift_of(mid) < free_lift:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
