import math

import pytest

from aerobot.constants import VENUS_RADIUS, VENUS_SOLAR_DAY
from aerobot.venus import (VenusGeometry, circumnavigation_times, ground_track,
                           local_noons)


@pytest.fixture
def geo():
    return VenusGeometry(entry_lat_rad=math.radians(5.0),
                         entry_local_solar_time_h=18.0)


class TestGeometry:
    def test_entry_local_time(self, geo):
        assert geo.local_solar_time_h(0.0, 0.0, 0.0) == pytest.approx(18.0)

    def test_zero_displacement_keeps_longitude(self, geo):
        lat, lon = geo.latlon(0.0, 0.0)
        assert lat == pytest.approx(math.radians(5.0))
        assert lon == 0.0

    def test_eastward_displacement_advances_longitude(self, geo):
        _, lon = geo.latlon(1000.0, 0.0)
        assert lon == pytest.approx(1000.0 / (VENUS_RADIUS
                                              * math.cos(math.radians(5.0))))

    def test_subsolar_point_retrogrades_one_turn_per_solar_day(self, geo):
        l0 = geo.subsolar_lon(0.0)
        l1 = geo.subsolar_lon(VENUS_SOLAR_DAY)
        assert l1 - l0 == pytest.approx(-2.0 * math.pi)

    def test_zenith_zero_at_subsolar_equator(self):
        g = VenusGeometry(entry_lat_rad=0.0, entry_local_solar_time_h=12.0)
        assert g.zenith(0.0, 0.0, 0.0) == pytest.approx(0.0, abs=1e-9)

    def test_night_side_zenith_past_terminator(self, geo):
        # 18 h entry: the sun sits on the horizon
        assert geo.zenith(0.0, 0.0, 0.0) == pytest.approx(math.pi / 2, rel=1e-6)


class TestTrackAnalysis:
    def test_circumnavigation_counter(self, geo):
        # synthetic westward drift at 70 m/s
        period = 2 * math.pi * VENUS_RADIUS * math.cos(math.radians(5.0)) / 70.0
        ts = [k * 3600.0 for k in range(400)]
        east = [-70.0 * t for t in ts]
        times = circumnavigation_times(geo, ts, east)
        assert times
        assert times[0] == pytest.approx(period, rel=0.01)

    def test_zero_wind_keeps_longitude_constant(self, geo):
        ts = [k * 3600.0 for k in range(50)]
        track = ground_track(geo, ts, [0.0] * 50, [0.0] * 50)
        lons = [p[2] for p in track]
        assert max(lons) - min(lons) < 1e-12

    def test_local_noons_spacing(self, geo):
        # drifting + retrograding sun: noons repeat at the relative period
        ts = [k * 1800.0 for k in range(1600)]
        east = [-70.0 * t for t in ts]
        north = [0.0] * len(ts)
        noons = local_noons(geo, ts, east, north)
        assert len(noons) >= 3
        rate = (70.0 / (VENUS_RADIUS * math.cos(math.radians(5.0)))
                - 2 * math.pi / VENUS_SOLAR_DAY)
        t_rel = 2 * math.pi / rate
        spacing = [b - a for a, b in zip(noons, noons[1:])]
        for s in spacing:
            assert s == pytest.approx(t_rel, rel=0.01)

    def test_longitude_monotone_westward_for_westward_wind(self, geo):
        ts = [k * 3600.0 for k in range(300)]
        east = [-70.0 * t for t in ts]
        lons_unwrapped = [geo.latlon(e, 0.0)[1] for e in east]
        assert all(b < a for a, b in zip(lons_unwrapped, lons_unwrapped[1:]))

    def test_day_night_metadata(self, geo):
        ts = [k * 1800.0 for k in range(800)]
        east = [-70.0 * t for t in ts]
        track = ground_track(geo, ts, east, [0.0] * len(ts))
        days = [p[4] for p in track]
        assert any(days) and not all(days)
