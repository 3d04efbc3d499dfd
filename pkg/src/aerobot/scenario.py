"""Scenario definitions, telemetry, and replay.

A scenario is one TOML file (conventionally scenario.cfg) holding the aerobot
configuration, environment references (atmosphere/winds/radiation CSV files or
builtin names), a command timeline, run parameters, and shape-table axes. CSV
references resolve relative to the scenario file. Bundled presets live in the
package data directory and are addressable by bare name.

Telemetry files carry the trajectory columns plus the measured environment
channels and a command log, which is everything replay needs: the engine is
re-driven with telemetry-derived winds/irradiances (zero-order-held at their
sample times, matching the engine's own per-step hold) and the recorded
command times, while pressure/temperature stay parameterized by altitude
through the scenario's profile. Replaying telemetry recorded at the engine's
own step cadence therefore reproduces the run bit-exactly.
"""
from __future__ import annotations

import math

try:
    import tomllib
except ModuleNotFoundError:          # Python 3.10
    import tomli as tomllib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .aero import AeroCoefficients
from .atmosphere import (AtmosphereProfile, Channel, RadiationEnvironment,
                         builtin_profile, load_profile, load_radiation,
                         load_winds)
from .constants import GRAVITY_EARTH, GRAVITY_VENUS
from .dynamics import (AerobotConfig, Engine, Environment, TRAJ_HEADER,
                       TrajectoryRecord)
from .envelope import EnvelopeSpec, InflatedGeometry
from .errors import ParseError, ValidationError
from .gastransfer import (CommandKind, TransferCommand, TransferDeviceSpec,
                          load_commands)
from .heat import SurfaceOptics
from .shape import ShapeLoads
from .shapetable import ShapeTable, build_shape_table
from .venus import VenusGeometry

PRESET_NAMES = ("nevada-flight2", "nevada-float", "venus-b2",
                "venus-b2-kinematic")

TELEMETRY_EXTRA = ("wind_e_ms", "wind_n_ms", "wind_u_ms", "e_up_solar",
                   "e_side_solar", "e_down_solar", "e_up_ir", "e_side_ir",
                   "e_down_ir", "p_atm_pa", "t_atm_k", "pump", "vent", "poppet")
TELEMETRY_HEADER = TRAJ_HEADER + "," + ",".join(TELEMETRY_EXTRA)


@dataclass(frozen=True)
class RunParams:
    t_end_s: float
    dt_s: float = 0.5
    recorder_cadence_s: float = 1.0


@dataclass(frozen=True)
class VenusParams:
    entry_lat_deg: float
    entry_lon_deg: float = 0.0
    entry_local_solar_time_h: float = 12.0

    def geometry(self) -> VenusGeometry:
        return VenusGeometry(entry_lat_rad=math.radians(self.entry_lat_deg),
                             entry_lon_rad=math.radians(self.entry_lon_deg),
                             entry_local_solar_time_h=self.entry_local_solar_time_h)


@dataclass(frozen=True)
class Scenario:
    name: str
    planet: str
    config: AerobotConfig
    environment: Environment
    timeline: tuple
    run: RunParams
    table_axes: dict
    table_path: Path | None = None
    venus: VenusParams | None = None
    raw: dict = field(default=None, compare=False, repr=False)
    base_dir: Path | None = field(default=None, compare=False, repr=False)

    def shape_loads(self) -> ShapeLoads:
        """Nominal loads for table generation: chamber gas at ambient ratio."""
        prof = self.environment.atmosphere
        # helium density relative to the local atmosphere at equal temperature
        ratio = 2077.0 / prof.R_specific
        rho_mid = sum(prof.density_kgm3) / len(prof.density_kgm3)
        return ShapeLoads(m_payload=self.config.m_payload,
                          m_sp_gas=self.config.m_sp_gas0,
                          rho_zp_gas=rho_mid / ratio,
                          g=prof.surface_gravity)


# ---------------------------------------------------------------------------
# loading

def _req(section: dict, key: str, path: str, types):
    if key not in section:
        raise ValidationError(f"{path}.{key}: missing required field")
    v = section[key]
    if types is float and isinstance(v, int):
        v = float(v)
    if not isinstance(v, types):
        raise ValidationError(f"{path}.{key}: expected {types}, got {type(v).__name__}")
    return v


def _resolve(base: Path, name: str, path: str) -> Path:
    p = (base / name).resolve()
    if not p.exists():
        raise ValidationError(f"{path}: referenced file not found: {p}")
    return p


def preset_dir(name: str) -> Path:
    d = resources.files("aerobot").joinpath("data").joinpath(name)
    return Path(str(d))


def load_scenario(source) -> Scenario:
    """Load a scenario file, or a bundled preset by bare name."""
    if isinstance(source, str) and source in PRESET_NAMES:
        source = preset_dir(source) / "scenario.cfg"
    path = Path(source)
    if not path.exists():
        raise ValidationError(f"scenario file not found: {path}")
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as e:
        raise ParseError(f"{path}: {e}") from None
    return scenario_from_dict(raw, base_dir=path.parent)


def scenario_from_dict(raw: dict, base_dir: Path | None = None) -> Scenario:
    base = Path(base_dir) if base_dir is not None else Path(".")
    name = _req(raw, "name", "scenario", str)
    planet = _req(raw, "planet", "scenario", str)
    if planet not in ("earth", "venus"):
        raise ValidationError("planet: must be 'earth' or 'venus'")

    atm_sec = _req(raw, "atmosphere", "scenario", dict)
    prof_ref = _req(atm_sec, "profile", "atmosphere", str)
    if prof_ref.startswith("builtin:"):
        profile = builtin_profile(prof_ref.split(":", 1)[1])
    else:
        gas = "co2-mix" if planet == "venus" else "air"
        g = GRAVITY_VENUS if planet == "venus" else GRAVITY_EARTH
        p = _resolve(base, prof_ref, "atmosphere.profile")
        profile = load_profile(p.read_text(encoding="utf-8"), gas=gas,
                               surface_gravity=g)
    winds_alt = None
    if "winds" in atm_sec:
        p = _resolve(base, atm_sec["winds"], "atmosphere.winds")
        winds_alt = load_winds(p.read_text(encoding="utf-8"))
    if winds_alt is not None:
        profile = AtmosphereProfile(profile.alt_m, profile.pressure_pa,
                                    profile.temperature_k, profile.density_kgm3,
                                    gas=profile.gas,
                                    surface_gravity=profile.surface_gravity,
                                    winds=winds_alt)

    rad_sec = raw.get("radiation", {})
    if "file" in rad_sec:
        p = _resolve(base, rad_sec["file"], "radiation.file")
        radiation = load_radiation(p.read_text(encoding="utf-8"))
    else:
        radiation = RadiationEnvironment()

    wind_time = None
    if "wind_time" in raw:
        rows = _req(raw["wind_time"], "rows", "wind_time", list)
        if not rows or any(len(r) != 4 for r in rows):
            raise ValidationError("wind_time.rows: expected [t, east, north, up] rows")
        cols = list(zip(*[[float(v) for v in r] for r in rows]))
        if any(b <= a for a, b in zip(cols[0], cols[0][1:])):
            raise ValidationError("wind_time.rows: times must increase")
        wind_time = tuple(tuple(c) for c in cols)

    a = _req(raw, "aerobot", "scenario", dict)
    geometry = InflatedGeometry(
        _req(a, "upper_diameter_m", "aerobot", float),
        _req(a, "lower_diameter_m", "aerobot", float),
        math.radians(_req(a, "cone_half_angle_deg", "aerobot", float)))
    m_zp_env = _req(a, "m_zp_env_kg", "aerobot", float)
    m_sp_env = _req(a, "m_sp_env_kg", "aerobot", float)
    r_sp = _req(a, "sp_diameter_m", "aerobot", float) / 2.0
    g_local = profile.surface_gravity
    envelope = EnvelopeSpec(
        geometry=geometry, r_sp=r_sp,
        w_zp=m_zp_env * g_local / geometry.area,
        w_sp=m_sp_env * g_local / (4.0 * math.pi * r_sp ** 2))
    alpha = a.get("alpha_solar", [0.08, 0.30, 0.08, 0.08])
    eps = a.get("eps_ir", [0.52, 0.85, 0.52, 0.52])
    if len(alpha) != 4 or len(eps) != 4:
        raise ValidationError("aerobot.alpha_solar / eps_ir: need four entries")
    config = AerobotConfig(
        envelope=envelope, m_sp_env=m_sp_env, m_zp_env=m_zp_env,
        m_payload=_req(a, "m_payload_kg", "aerobot", float),
        devices=TransferDeviceSpec(
            pump_vdot=_req(a, "pump_vdot_m3s", "aerobot", float),
            vent_cd=float(a.get("vent_cd", 0.6)),
            vent_d=float(a.get("vent_d_m", 0.007)),
            poppet_cd=float(a.get("poppet_cd", 0.6)),
            poppet_d=float(a.get("poppet_d_m", 0.095))),
        aero=AeroCoefficients(
            c_d_top=float(a.get("c_d_top", 0.8)),
            c_d_side=float(a.get("c_d_side", 1.0)),
            c_m=float(a.get("c_m", 0.2)),
            a_ref=math.pi * geometry.r_upper ** 2),
        m_sp_gas0=_req(a, "m_sp_gas_kg", "aerobot", float),
        m_zp_gas0=_req(a, "m_zp_gas_kg", "aerobot", float),
        free_lift=_req(a, "free_lift_kg", "aerobot", float),
        node_heat_capacity=tuple(float(v) for v in a.get(
            "node_heat_capacity_jk", [2000.0, 6000.0, 4000.0, 5000.0])),
        optics=tuple(SurfaceOptics(float(al), float(ep))
                     for al, ep in zip(alpha, eps)),
        include_poppet_enthalpy=bool(a.get("include_poppet_enthalpy", True)),
        launch_alt_m=float(a.get("launch_alt_m", profile.alt_m[0])),
        terrain_alt_m=float(a.get("terrain_alt_m", profile.alt_m[0])),
        start_with_wind=bool(a.get("start_with_wind", False)))

    run_sec = _req(raw, "run", "scenario", dict)
    run = RunParams(t_end_s=_req(run_sec, "t_end_s", "run", float),
                    dt_s=float(run_sec.get("dt_s", 0.5)),
                    recorder_cadence_s=float(run_sec.get("recorder_cadence_s", 1.0)))

    timeline = []
    if "timeline_file" in raw:
        p = _resolve(base, raw["timeline_file"], "timeline_file")
        timeline.extend(load_commands(p.read_text(encoding="utf-8")))
    for k, row in enumerate(raw.get("timeline", [])):
        try:
            timeline.append(TransferCommand(float(row["t_s"]),
                                            CommandKind(row["action"])))
        except (KeyError, ValueError) as e:
            raise ValidationError(f"timeline[{k}]: {e}") from None
    timeline.sort(key=lambda c: c.t)

    ts = raw.get("shape_table", {})
    table_axes = {
        "rho_min": float(ts.get("rho_min", 0.2)),
        "rho_max": float(ts.get("rho_max", 1.3)),
        "n_rho": int(ts.get("n_rho", 16)),
        "n_fill": int(ts.get("n_fill", 32)),
        "fill_min": float(ts.get("fill_min", 0.03)),
        "fill_max": float(ts.get("fill_max", 0.995)),
    }
    table_path = None
    if "file" in ts:
        table_path = _resolve(base, ts["file"], "shape_table.file")

    venus = None
    if planet == "venus":
        v = raw.get("venus", {})
        venus = VenusParams(
            entry_lat_deg=float(v.get("entry_lat_deg", 0.0)),
            entry_lon_deg=float(v.get("entry_lon_deg", 0.0)),
            entry_local_solar_time_h=float(v.get("entry_local_solar_time_h", 12.0)))

    zenith_of = None
    if venus is not None:
        zenith_of = venus.geometry().zenith
    environment = Environment(atmosphere=profile, radiation=radiation,
                              wind_time=wind_time, zenith_of=zenith_of)
    return Scenario(name=name, planet=planet, config=config,
                    environment=environment, timeline=tuple(timeline), run=run,
                    table_axes=table_axes, table_path=table_path, venus=venus,
                    raw=raw, base_dir=base)


def ensure_table(scenario: Scenario) -> ShapeTable:
    """Load the scenario's shape table, or build it from the declared axes."""
    if scenario.table_path is not None:
        return ShapeTable.load(scenario.table_path, scenario.config.envelope)
    ax = scenario.table_axes
    import numpy as np
    return build_shape_table(
        scenario.config.envelope, scenario.shape_loads(),
        rho_axis=np.geomspace(ax["rho_min"], ax["rho_max"], ax["n_rho"]).tolist(),
        fill_axis=np.linspace(ax["fill_min"], ax["fill_max"], ax["n_fill"]).tolist())


def make_engine(scenario: Scenario, table: ShapeTable | None = None) -> Engine:
    table = table if table is not None else ensure_table(scenario)
    return Engine(scenario.config, scenario.environment, table,
                  timeline=scenario.timeline, dt=scenario.run.dt_s)


def simulate(scenario: Scenario, table: ShapeTable | None = None,
             t_end: float | None = None,
             recorder_cadence: float | None = None) -> TrajectoryRecord:
    eng = make_engine(scenario, table)
    return eng.run(t_end if t_end is not None else scenario.run.t_end_s,
                   recorder_cadence or scenario.run.recorder_cadence_s,
                   extra_channels=True)


# ---------------------------------------------------------------------------
# canonical serialization (bit-exact round trip)

def dumps_scenario(raw: dict) -> str:
    """Emit the canonical TOML form of a parsed scenario dict."""
    out = []

    def fmt(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, (int, float)):
            return repr(v)
        if isinstance(v, str):
            return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
        if isinstance(v, list):
            return "[" + ", ".join(fmt(x) for x in v) + "]"
        raise ValidationError(f"cannot serialize {type(v).__name__}")

    scalars = {k: v for k, v in raw.items() if not isinstance(v, (dict, list))}
    for k in scalars:
        out.append(f"{k} = {fmt(raw[k])}")
    for k, v in raw.items():
        if isinstance(v, list) and v and isinstance(v[0], dict):
            continue
        if isinstance(v, list):
            out.append(f"{k} = {fmt(v)}")
    for k, v in raw.items():
        if isinstance(v, dict):
            out.append(f"\n[{k}]")
            for kk, vv in v.items():
                out.append(f"{kk} = {fmt(vv)}")
    for k, v in raw.items():
        if isinstance(v, list) and v and isinstance(v[0], dict):
            for row in v:
                out.append(f"\n[[{k}]]")
                for kk, vv in row.items():
                    out.append(f"{kk} = {fmt(vv)}")
    return "\n".join(out) + "\n"


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(dumps_scenario(scenario.raw), encoding="utf-8")


# ---------------------------------------------------------------------------
# telemetry

@dataclass(frozen=True)
class TelemetryRecord:
    """Recorded flight channels plus the command log."""

    rows: tuple                  # dicts keyed by telemetry column
    commands: tuple              # TransferCommand
    scenario_name: str = ""

    def __post_init__(self):
        ts = [r["t_s"] for r in self.rows]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValidationError("telemetry timestamps must strictly increase")

    def column(self, name: str) -> list:
        return [r[name] for r in self.rows]

    def gaps(self, max_gap_s: float = 60.0) -> list:
        ts = self.column("t_s")
        return [(a, b) for a, b in zip(ts, ts[1:]) if b - a > max_gap_s]


def telemetry_from_record(rec: TrajectoryRecord,
                          scenario_name: str = "") -> TelemetryRecord:
    """Wrap an engine run (recorded with extra channels) as telemetry."""
    cmds = tuple(TransferCommand(t, CommandKind(detail))
                 for (t, kind, detail) in rec.events if kind == "command")
    rows = []
    for r in rec.rows:
        if "p_atm_pa" not in r:
            raise ValidationError("record lacks measured channels; "
                                  "run with extra_channels=True")
        rows.append(dict(r))
    return TelemetryRecord(tuple(rows), cmds, scenario_name)


def serialize_telemetry(tel: TelemetryRecord) -> str:
    lines = ["# aerobot-telemetry v1"]
    if tel.scenario_name:
        lines.append(f"# scenario: {tel.scenario_name}")
    for c in tel.commands:
        lines.append(f"# command,{c.t!r},{c.kind.value}")
    lines.append(TELEMETRY_HEADER)
    cols = TELEMETRY_HEADER.split(",")
    for r in tel.rows:
        vals = []
        for c in cols:
            v = r[c]
            if isinstance(v, bool):
                vals.append("1" if v else "0")
            elif isinstance(v, str):
                vals.append(v)
            else:
                vals.append(repr(v))
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"


def load_telemetry(source) -> TelemetryRecord:
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and Path(source).exists()):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    lines = [ln for ln in text.splitlines() if ln.strip()]
    cmds = []
    scen = ""
    body = []
    for ln in lines:
        if ln.startswith("#"):
            stripped = ln[1:].strip()
            if stripped.startswith("scenario:"):
                scen = stripped.split(":", 1)[1].strip()
            elif stripped.startswith("command,"):
                _, t, action = stripped.split(",")
                cmds.append(TransferCommand(float(t), CommandKind(action)))
        else:
            body.append(ln)
    if not body:
        raise ParseError("empty telemetry file")
    if body[0].replace(" ", "") != TELEMETRY_HEADER:
        raise ParseError("telemetry header mismatch")
    cols = TELEMETRY_HEADER.split(",")
    rows = []
    for k, ln in enumerate(body[1:], start=2):
        parts = ln.split(",")
        if len(parts) != len(cols):
            raise ParseError(f"telemetry row {k}: expected {len(cols)} columns")
        row = {}
        for c, v in zip(cols, parts):
            if c in ("mode", "event"):
                row[c] = v
            elif c in ("pump", "vent", "poppet"):
                row[c] = v == "1"
            else:
                row[c] = float(v)
        rows.append(row)
    return TelemetryRecord(tuple(rows), tuple(cmds), scen)


# ---------------------------------------------------------------------------
# replay

@dataclass(frozen=True)
class ComparisonReport:
    """Simulated-minus-observed error series and summary statistics."""

    t_s: tuple
    d_alt_m: tuple
    d_p_sp_pa: tuple
    d_temps_k: dict              # channel -> tuple
    max_abs_alt_err_m: float
    final_abs_p_sp_err_pa: float
    max_abs_p_sp_err_pa: float
    temp_rms_k: float
    sign_agreement: float        # altitude response direction per command window

    def to_csv(self) -> str:
        keys = sorted(self.d_temps_k)
        lines = ["t_s,d_alt_m,d_p_sp_pa," + ",".join(f"d_{k}" for k in keys)]
        for i, t in enumerate(self.t_s):
            vals = [repr(t), repr(self.d_alt_m[i]), repr(self.d_p_sp_pa[i])]
            vals += [repr(self.d_temps_k[k][i]) for k in keys]
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"

    def all_zero(self) -> bool:
        return (all(v == 0.0 for v in self.d_alt_m)
                and all(v == 0.0 for v in self.d_p_sp_pa)
                and all(v == 0.0 for series in self.d_temps_k.values()
                        for v in series))


def replay(scenario: Scenario, telemetry: TelemetryRecord,
           table: ShapeTable | None = None,
           sign_window_s: float = 900.0) -> ComparisonReport:
    """Re-drive the engine from telemetry and report per-channel errors.

    Winds and irradiances come from the telemetry channels (held at their
    sample times); atmospheric pressure/temperature stay parameterized by
    altitude through the scenario profile; commands come from the telemetry
    command log. Channel gaps beyond 60 s are rejected.
    """
    gaps = telemetry.gaps(60.0)
    if gaps:
        raise ValidationError(f"telemetry channel gaps exceed 60 s: {gaps[:5]}")
    ts = tuple(telemetry.column("t_s"))
    env0 = scenario.environment
    wind_time = (ts, tuple(telemetry.column("wind_e_ms")),
                 tuple(telemetry.column("wind_n_ms")),
                 tuple(telemetry.column("wind_u_ms")))

    def chan(name):
        return Channel("t_s", ts, tuple(telemetry.column(name)))

    radiation = RadiationEnvironment(
        e_up_solar=chan("e_up_solar"), e_side_solar=chan("e_side_solar"),
        e_down_solar=chan("e_down_solar"), e_up_ir=chan("e_up_ir"),
        e_down_ir=chan("e_down_ir"), e_side_ir=chan("e_side_ir"))
    env = Environment(atmosphere=env0.atmosphere, radiation=radiation,
                      wind_time=wind_time, zenith_of=None)
    table = table if table is not None else ensure_table(scenario)
    eng = Engine(scenario.config, env, table, timeline=telemetry.commands,
                 dt=scenario.run.dt_s)
    cadence = ts[1] - ts[0] if len(ts) > 1 else scenario.run.dt_s
    rec = eng.run(ts[-1], recorder_cadence=cadence)

    sim_by_t = {round(r["t_s"], 6): r for r in rec.rows}
    d_alt, d_psp = [], []
    temp_keys = ("t_sp_k", "t_zp_k", "t1_k", "t2_k", "t3_k", "t4_k")
    d_temps = {k: [] for k in temp_keys}
    used_t = []
    for row in telemetry.rows:
        sim = sim_by_t.get(round(row["t_s"], 6))
        if sim is None:
            continue
        used_t.append(row["t_s"])
        d_alt.append(sim["alt_m"] - row["alt_m"])
        d_psp.append(sim["p_sp_pa"] - row["p_sp_pa"])
        for k in temp_keys:
            d_temps[k].append(sim[k] - row[k])
    if not used_t:
        raise ValidationError("telemetry and simulation timestamps never align")

    n_t = sum(len(v) for v in d_temps.values())
    rms = math.sqrt(sum(x * x for v in d_temps.values() for x in v) / n_t)
    agreement = _sign_agreement(telemetry, sim_by_t, sign_window_s)
    return ComparisonReport(
        t_s=tuple(used_t), d_alt_m=tuple(d_alt), d_p_sp_pa=tuple(d_psp),
        d_temps_k={k: tuple(v) for k, v in d_temps.items()},
        max_abs_alt_err_m=max(abs(v) for v in d_alt),
        final_abs_p_sp_err_pa=abs(d_psp[-1]),
        max_abs_p_sp_err_pa=max(abs(v) for v in d_psp),
        temp_rms_k=rms, sign_agreement=agreement)


def _sign_agreement(telemetry, sim_by_t, window_s):
    """Fraction of command windows where the altitude response direction of
    the simulation matches the telemetry."""
    ts = telemetry.column("t_s")
    alt_obs = telemetry.column("alt_m")
    agree = total = 0
    for cmd in telemetry.commands:
        if cmd.kind not in (CommandKind.VENT_OPEN, CommandKind.PUMP_ON):
            continue
        t0, t1 = cmd.t, cmd.t + window_s
        i0 = min(range(len(ts)), key=lambda i: abs(ts[i] - t0))
        i1 = min(range(len(ts)), key=lambda i: abs(ts[i] - t1))
        if i1 <= i0:
            continue
        s0 = sim_by_t.get(round(ts[i0], 6))
        s1 = sim_by_t.get(round(ts[i1], 6))
        if s0 is None or s1 is None:
            continue
        d_obs = alt_obs[i1] - alt_obs[i0]
        d_sim = s1["alt_m"] - s0["alt_m"]
        total += 1
        if d_obs == d_sim == 0.0 or d_obs * d_sim > 0:
            agree += 1
    return agree / total if total else 1.0


def venus_preset_run(preset: str, duration_days: float,
                     table: ShapeTable | None = None):
    """Run a bundled Venus preset and return (record, ground track).

    The track carries per-sample latitude/longitude, local solar time, and a
    day/night flag for mission-planning products.
    """
    from .venus import ground_track
    scen = load_scenario(preset if preset.startswith("venus-")
                         else f"venus-{preset}")
    rec = simulate(scen, table, t_end=duration_days * 86400.0)
    geo = scen.venus.geometry()
    track = ground_track(geo, rec.column("t_s"), rec.column("east_m"),
                         rec.column("north_m"))
    return rec, track
