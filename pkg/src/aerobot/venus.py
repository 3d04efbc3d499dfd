"""Venus mission geometry: solar ephemeris, wind advection, ground tracks.

The aerobot drifts as a Lagrangian tracer; east/north displacements from the
engine map onto the planetary sphere around the entry point. Local solar time
follows the difference between the aerobot longitude and the subsolar
longitude, which retrogrades once per solar day. The solar declination is
taken as zero (the obliquity is under three degrees).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import VENUS_RADIUS, VENUS_SOLAR_DAY


@dataclass(frozen=True)
class VenusGeometry:
    """Entry point and ephemeris conventions for one mission run."""

    entry_lat_rad: float
    entry_lon_rad: float = 0.0
    entry_local_solar_time_h: float = 12.0
    radius_m: float = VENUS_RADIUS
    solar_day_s: float = VENUS_SOLAR_DAY

    def latlon(self, east_m: float, north_m: float) -> tuple:
        lat = self.entry_lat_rad + north_m / self.radius_m
        lon = self.entry_lon_rad + east_m / (self.radius_m * math.cos(lat))
        return lat, lon

    def subsolar_lon(self, t: float) -> float:
        # hour angle at entry fixes the offset; the subsolar point then
        # retrogrades westward through one revolution per solar day
        h0 = (self.entry_local_solar_time_h - 12.0) * math.pi / 12.0
        return (self.entry_lon_rad - h0) - 2.0 * math.pi * t / self.solar_day_s

    def local_solar_time_h(self, t: float, east_m: float, north_m: float) -> float:
        _, lon = self.latlon(east_m, north_m)
        h = lon - self.subsolar_lon(t)
        return (12.0 + h * 12.0 / math.pi) % 24.0

    def zenith(self, t: float, east_m: float, north_m: float) -> float:
        lat, lon = self.latlon(east_m, north_m)
        h = lon - self.subsolar_lon(t)
        cz = math.cos(lat) * math.cos(h)
        return math.acos(max(-1.0, min(1.0, cz)))


def ground_track(geometry: VenusGeometry, t_s, east_m, north_m) -> list:
    """Per-sample (t, lat_deg, lon_deg_wrapped, lst_h, is_day) metadata."""
    out = []
    for t, e, n in zip(t_s, east_m, north_m):
        lat, lon = geometry.latlon(e, n)
        lst = geometry.local_solar_time_h(t, e, n)
        zen = geometry.zenith(t, e, n)
        lon_deg = math.degrees(lon) % 360.0
        out.append((t, math.degrees(lat), lon_deg, lst, zen <= math.pi / 2))
    return out


def circumnavigation_times(geometry: VenusGeometry, t_s, east_m) -> list:
    """Times at which accumulated longitude has swept another full circle."""
    out = []
    k = 1
    for t, e in zip(t_s, east_m):
        lon_sweep = abs(e) / (geometry.radius_m * math.cos(geometry.entry_lat_rad))
        while lon_sweep >= k * 2.0 * math.pi:
            out.append(t)
            k += 1
    return out


def local_noons(geometry: VenusGeometry, t_s, east_m, north_m) -> list:
    """Times where local solar time crosses 12 h (day side)."""
    noons = []
    prev = None
    for t, e, n in zip(t_s, east_m, north_m):
        h = geometry.local_solar_time_h(t, e, n) - 12.0
        if h > 12.0:
            h -= 24.0
        if prev is not None and abs(h - prev[1]) < 12.0 and \
                (prev[1] < 0.0 <= h or prev[1] > 0.0 >= h):
            t0, h0 = prev
            f = -h0 / (h - h0)
            noons.append(t0 + f * (t - t0))
        prev = (t, h)
    return noons
