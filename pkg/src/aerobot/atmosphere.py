"""Atmospheric state and radiative environment.

Profiles are tables of (altitude, pressure, temperature, density). Pressure
and temperature are interpolated linearly in altitude and density is always
recomputed from the ideal gas law so buoyancy and hydrostatics stay mutually
consistent. Beyond the table the terminal lapse rate is held and pressure is
continued hydrostatically, capped at 100 m below the first row and 2 km above
the last.

The builtin profiles carry the Earth (US Standard + 20 C offset) and Venus
cloud-layer columns used for flight-equivalence studies, with pressure
reconstructed per-row from rho*R*T.
"""
from __future__ import annotations

import bisect
import io
import logging
import math
from dataclasses import dataclass, field

from .constants import GRAVITY_EARTH, GRAVITY_VENUS, R_AIR, R_CO2_MIX
from .errors import OutOfRangeError, ParseError, ValidationError

log = logging.getLogger(__name__)

EXTRAP_BELOW_M = 100.0
EXTRAP_ABOVE_M = 2000.0

GAS_CONSTANTS = {"air": R_AIR, "co2-mix": R_CO2_MIX}


@dataclass(frozen=True)
class AtmosphereSample:
    pressure_pa: float
    temperature_k: float
    density_kgm3: float


@dataclass(frozen=True)
class WindTable:
    """Winds vs altitude, linear interpolation, held constant beyond the table."""

    alt_m: tuple
    east_ms: tuple
    north_ms: tuple
    up_ms: tuple

    def __post_init__(self):
        if len(self.alt_m) < 1:
            raise ValidationError("wind table needs at least one row")
        if any(b <= a for a, b in zip(self.alt_m, self.alt_m[1:])):
            raise ValidationError("altitude strictly increasing")

    def sample(self, alt: float) -> tuple:
        a = self.alt_m
        if alt <= a[0]:
            return (self.east_ms[0], self.north_ms[0], self.up_ms[0])
        if alt >= a[-1]:
            return (self.east_ms[-1], self.north_ms[-1], self.up_ms[-1])
        i = bisect.bisect_right(a, alt) - 1
        f = (alt - a[i]) / (a[i + 1] - a[i])
        return (self.east_ms[i] + f * (self.east_ms[i + 1] - self.east_ms[i]),
                self.north_ms[i] + f * (self.north_ms[i + 1] - self.north_ms[i]),
                self.up_ms[i] + f * (self.up_ms[i + 1] - self.up_ms[i]))


@dataclass(frozen=True)
class AtmosphereProfile:
    """Tabulated atmosphere for one planet.

    Rows must have strictly increasing altitude, strictly decreasing pressure,
    and positive temperature/density. Rows whose tabulated density disagrees
    with P/(R T) by more than 2% are recorded in ``closure_flags`` and logged,
    not rejected.
    """

    alt_m: tuple
    pressure_pa: tuple
    temperature_k: tuple
    density_kgm3: tuple
    gas: str = "air"
    surface_gravity: float = GRAVITY_EARTH
    winds: WindTable | None = None
    closure_flags: tuple = field(default=(), compare=False)

    def __post_init__(self):
        n = len(self.alt_m)
        if n < 2:
            raise ValidationError("profile needs at least two rows")
        if not (len(self.pressure_pa) == len(self.temperature_k)
                == len(self.density_kgm3) == n):
            raise ValidationError("profile columns must have equal length")
        if self.gas not in GAS_CONSTANTS:
            raise ValidationError(f"unknown gas {self.gas!r}")
        if any(b <= a for a, b in zip(self.alt_m, self.alt_m[1:])):
            raise ValidationError("altitude strictly increasing")
        if any(b >= a for a, b in zip(self.pressure_pa, self.pressure_pa[1:])):
            raise ValidationError("pressure strictly decreasing with altitude")
        if any(t <= 0 for t in self.temperature_k):
            raise ValidationError("temperature > 0 everywhere")
        if any(d <= 0 for d in self.density_kgm3):
            raise ValidationError("density > 0 everywhere")
        R = self.R_specific
        flags = tuple(i for i in range(n)
                      if abs(self.density_kgm3[i] * R * self.temperature_k[i]
                             / self.pressure_pa[i] - 1.0) > 0.02)
        object.__setattr__(self, "closure_flags", flags)
        for i in flags:
            log.warning("profile row %d at %.0f m violates ideal-gas closure by >2%%",
                        i, self.alt_m[i])

    @property
    def R_specific(self) -> float:
        return GAS_CONSTANTS[self.gas]

    @property
    def alt_min(self) -> float:
        return self.alt_m[0] - EXTRAP_BELOW_M

    @property
    def alt_max(self) -> float:
        return self.alt_m[-1] + EXTRAP_ABOVE_M


def _segment_pt(profile: AtmosphereProfile, alt: float) -> tuple:
    """(P, T) at altitude: linear T and P in-table, lapse + hydrostatic beyond."""
    a, P, T = profile.alt_m, profile.pressure_pa, profile.temperature_k
    g, R = profile.surface_gravity, profile.R_specific
    if alt < profile.alt_min:
        raise OutOfRangeError(
            f"altitude {alt:.1f} m below extrapolation bound {profile.alt_min:.1f} m")
    if alt > profile.alt_max:
        raise OutOfRangeError(
            f"altitude {alt:.1f} m above extrapolation bound {profile.alt_max:.1f} m")
    if alt < a[0]:
        lapse = (T[1] - T[0]) / (a[1] - a[0])
        return _hydrostatic(P[0], T[0], a[0], alt, lapse, g, R)
    if alt > a[-1]:
        lapse = (T[-1] - T[-2]) / (a[-1] - a[-2])
        return _hydrostatic(P[-1], T[-1], a[-1], alt, lapse, g, R)
    i = min(bisect.bisect_right(a, alt) - 1, len(a) - 2)
    f = (alt - a[i]) / (a[i + 1] - a[i])
    return (P[i] + f * (P[i + 1] - P[i]), T[i] + f * (T[i + 1] - T[i]))


def _hydrostatic(P0, T0, z0, z, lapse, g, R):
    T = T0 + lapse * (z - z0)
    if abs(lapse) < 1e-12:
        return P0 * math.exp(-g * (z - z0) / (R * T0)), T
    return P0 * (T / T0) ** (-g / (R * lapse)), T


def sample(profile: AtmosphereProfile, alt_m: float) -> AtmosphereSample:
    """Atmospheric state at altitude; density from the ideal gas law."""
    P, T = _segment_pt(profile, alt_m)
    return AtmosphereSample(P, T, P / (profile.R_specific * T))


def wind(profile: AtmosphereProfile, alt_m: float) -> tuple:
    if profile.winds is None:
        return (0.0, 0.0, 0.0)
    return profile.winds.sample(alt_m)


# ---------------------------------------------------------------------------
# builtin columns: (altitude km, density kg/m3, temperature degC)

_EARTH_US20 = [
    (0.0, 1.15, 35.0), (1.1, 1.03, 27.9), (2.2, 0.92, 20.7), (3.3, 0.82, 13.6),
    (4.5, 0.72, 5.8), (5.7, 0.63, -2.1), (7.0, 0.54, -10.5), (8.2, 0.47, -18.3),
    (9.4, 0.41, -26.1), (10.8, 0.34, -35.2),
]

_VENUS_VIRA = [
    (52.0, 1.28, 60.2), (53.0, 1.15, 49.9), (54.0, 1.03, 39.7), (55.0, 0.92, 29.2),
    (56.0, 0.82, 18.7), (57.0, 0.72, 9.4), (58.0, 0.63, 2.1), (59.0, 0.54, -4.4),
    (60.0, 0.47, -10.4), (61.0, 0.41, -14.5), (62.0, 0.34, -18.7),
]

BUILTIN_PROFILES = ("us-standard-offset20", "vira-clouds")


def builtin_profile(name: str) -> AtmosphereProfile:
    """Bundled flight-equivalence columns; pressure rebuilt from rho*R*T per row."""
    if name == "us-standard-offset20":
        rows, gas, g = _EARTH_US20, "air", GRAVITY_EARTH
    elif name == "vira-clouds":
        rows, gas, g = _VENUS_VIRA, "co2-mix", GRAVITY_VENUS
    else:
        raise ValidationError(f"unknown builtin profile {name!r}; "
                              f"choose from {BUILTIN_PROFILES}")
    R = GAS_CONSTANTS[gas]
    alt = tuple(1000.0 * a for a, _, _ in rows)
    T = tuple(t + 273.15 for _, _, t in rows)
    rho = tuple(d for _, d, _ in rows)
    P = tuple(d * R * t for d, t in zip(rho, T))
    return AtmosphereProfile(alt, P, T, rho, gas=gas, surface_gravity=g)


# ---------------------------------------------------------------------------
# CSV ingestion (replaces forecast-database clients)

PROFILE_HEADER = "alt_m,pressure_pa,temp_k,density_kgm3"
WINDS_HEADER = "alt_m,east_ms,north_ms,up_ms"


def _read_rows(source, header, ncols):
    if isinstance(source, (bytes, bytearray)):
        source = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        source = io.StringIO(source)
    lines = [ln.strip() for ln in source.read().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty file")
    if lines[0].replace(" ", "") != header:
        raise ParseError(f"row 1: expected header {header!r}, got {lines[0]!r}")
    rows = []
    for k, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != ncols:
            raise ParseError(f"row {k}: expected {ncols} columns, got {len(parts)}")
        try:
            rows.append(tuple(float(p) for p in parts))
        except ValueError as e:
            raise ParseError(f"row {k}: {e}") from None
    if not rows:
        raise ParseError("no data rows")
    return rows


def load_profile(source, gas: str = "air", surface_gravity: float | None = None,
                 winds: WindTable | None = None) -> AtmosphereProfile:
    """Parse an atmosphere.csv stream/str/bytes into a validated profile."""
    rows = _read_rows(source, PROFILE_HEADER, 4)
    if surface_gravity is None:
        surface_gravity = GRAVITY_VENUS if gas == "co2-mix" else GRAVITY_EARTH
    return AtmosphereProfile(
        tuple(r[0] for r in rows), tuple(r[1] for r in rows),
        tuple(r[2] for r in rows), tuple(r[3] for r in rows),
        gas=gas, surface_gravity=surface_gravity, winds=winds)


def load_winds(source) -> WindTable:
    rows = _read_rows(source, WINDS_HEADER, 4)
    return WindTable(tuple(r[0] for r in rows), tuple(r[1] for r in rows),
                     tuple(r[2] for r in rows), tuple(r[3] for r in rows))


def serialize_profile(profile: AtmosphereProfile) -> str:
    lines = [PROFILE_HEADER]
    for i in range(len(profile.alt_m)):
        lines.append(f"{profile.alt_m[i]!r},{profile.pressure_pa[i]!r},"
                     f"{profile.temperature_k[i]!r},{profile.density_kgm3[i]!r}")
    return "\n".join(lines) + "\n"


def serialize_winds(table: WindTable) -> str:
    lines = [WINDS_HEADER]
    for i in range(len(table.alt_m)):
        lines.append(f"{table.alt_m[i]!r},{table.east_ms[i]!r},"
                     f"{table.north_ms[i]!r},{table.up_ms[i]!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# radiative environment

def direct_solar(e_side: float, e_up: float, e_down: float) -> float:
    """Direct solar magnitude from the three welling components.

    The ground-reflected half of the upwelling flux is removed from the
    sidewelling signal (clamped at zero) before combining with the vertical
    component as a hypotenuse.
    """
    if e_side < 0 or e_up < 0 or e_down < 0:
        raise ValidationError("irradiances must be >= 0")
    horiz = max(e_side - 0.5 * e_up, 0.0)
    return math.hypot(horiz, e_down)


CHANNEL_KEYS = ("e_up_solar", "e_side_solar", "e_down_solar",
                "e_up_ir", "e_down_ir", "e_side_ir")
CHANNEL_PARAMS = ("alt_m", "t_s", "zenith_rad", "const")


@dataclass(frozen=True)
class Channel:
    """One irradiance channel: a 1-D table against altitude, time, or solar
    zenith angle, or a constant. Linear interpolation, clamped at the ends."""

    param: str                  # one of CHANNEL_PARAMS
    x: tuple = ()
    y: tuple = (0.0,)

    def __post_init__(self):
        if self.param not in CHANNEL_PARAMS:
            raise ValidationError(f"unknown channel param {self.param!r}")
        if any(v < 0 for v in self.y):
            raise ValidationError("irradiances must be >= 0")
        if self.param != "const":
            if len(self.x) != len(self.y) or len(self.x) < 1:
                raise ValidationError("channel table shape mismatch")
            if any(b <= a for a, b in zip(self.x, self.x[1:])):
                raise ValidationError(f"channel {self.param} coordinates must increase")

    def value(self, coord: float) -> float:
        if self.param == "const":
            return self.y[0]
        x, y = self.x, self.y
        if coord <= x[0]:
            return y[0]
        if coord >= x[-1]:
            return y[-1]
        i = bisect.bisect_right(x, coord) - 1
        f = (coord - x[i]) / (x[i + 1] - x[i])
        return y[i] + f * (y[i + 1] - y[i])


def constant_channel(value: float) -> Channel:
    return Channel("const", (), (value,))


@dataclass(frozen=True)
class RadiationEnvironment:
    """Welling irradiances, each parameterized independently.

    Channels keyed by zenith angle require a solar zenith model (time ->
    radians); solar channels are forced to zero past 90 degrees zenith.
    When no sidewelling IR channel is supplied a side-facing surface is
    assumed to see half ground, half sky.
    """

    e_up_solar: Channel = constant_channel(0.0)
    e_side_solar: Channel = constant_channel(0.0)
    e_down_solar: Channel = constant_channel(0.0)
    e_up_ir: Channel = constant_channel(0.0)
    e_down_ir: Channel = constant_channel(0.0)
    e_side_ir: Channel | None = None

    def fluxes(self, t_s: float, alt_m: float, zenith_rad: float | None = None):
        """(up_sol, side_sol, down_sol, up_ir, side_ir, down_ir) at one state."""
        def ev(ch: Channel, solar: bool) -> float:
            if ch.param == "alt_m":
                v = ch.value(alt_m)
            elif ch.param == "t_s":
                v = ch.value(t_s)
            elif ch.param == "zenith_rad":
                if zenith_rad is None:
                    raise ValidationError("zenith-keyed channel needs a zenith model")
                v = ch.value(zenith_rad)
            else:
                v = ch.value(0.0)
            if solar and zenith_rad is not None and zenith_rad > math.pi / 2:
                return 0.0
            return v

        up_s = ev(self.e_up_solar, True)
        side_s = ev(self.e_side_solar, True)
        down_s = ev(self.e_down_solar, True)
        up_i = ev(self.e_up_ir, False)
        down_i = ev(self.e_down_ir, False)
        side_i = (ev(self.e_side_ir, False) if self.e_side_ir is not None
                  else 0.5 * (up_i + down_i))
        return (up_s, side_s, down_s, up_i, side_i, down_i)


RADIATION_HEADER = "key,param,value"


def load_radiation(source) -> RadiationEnvironment:
    """Parse radiation.csv.

    Two row forms share the key,param,value header: a declaration row
    (key, "param", alt_m|t_s|zenith_rad|const) fixing a channel's coordinate,
    and data rows (key, coordinate, flux). A channel with a single data row
    and no declaration is treated as constant.
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        source = io.StringIO(source)
    lines = [ln.strip() for ln in source.read().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty file")
    if lines[0].replace(" ", "") != RADIATION_HEADER:
        raise ParseError(f"row 1: expected header {RADIATION_HEADER!r}")
    kinds: dict = {}
    data: dict = {}
    for k, ln in enumerate(lines[1:], start=2):
        parts = [p.strip() for p in ln.split(",")]
        if len(parts) != 3:
            raise ParseError(f"row {k}: expected 3 columns")
        key, param, value = parts
        if key not in CHANNEL_KEYS:
            raise ParseError(f"row {k}: unknown channel {key!r}")
        if param == "param":
            if value not in CHANNEL_PARAMS:
                raise ParseError(f"row {k}: unknown parameterization {value!r}")
            kinds[key] = value
        else:
            try:
                data.setdefault(key, []).append((float(param), float(value)))
            except ValueError:
                raise ParseError(f"row {k}: non-numeric data row") from None
    channels = {}
    for key, rows in data.items():
        rows.sort()
        kind = kinds.get(key, "const" if len(rows) == 1 else "t_s")
        if kind == "const":
            channels[key] = constant_channel(rows[-1][1])
        else:
            channels[key] = Channel(kind, tuple(r[0] for r in rows),
                                    tuple(r[1] for r in rows))
    try:
        return RadiationEnvironment(**channels)
    except TypeError as e:
        raise ParseError(str(e)) from None


def serialize_radiation(env: RadiationEnvironment) -> str:
    lines = [RADIATION_HEADER]
    for key in CHANNEL_KEYS:
        ch = getattr(env, key)
        if ch is None:
            continue
        if ch.param == "const":
            if key.endswith("_ir") or ch.y[0] != 0.0:
                lines.append(f"{key},param,const")
                lines.append(f"{key},0.0,{ch.y[0]!r}")
        else:
            lines.append(f"{key},param,{ch.param}")
            for x, y in zip(ch.x, ch.y):
                lines.append(f"{key},{x!r},{y!r}")
    return "\n".join(lines) + "\n"
