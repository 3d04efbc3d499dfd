import pytest

from aerobot import atmosphere as atm
from aerobot.constants import R_AIR, R_CO2_MIX
from aerobot.errors import OutOfRangeError, ParseError, ValidationError


@pytest.fixture(scope="module")
def venus():
    return atm.builtin_profile("vira-clouds")


@pytest.fixture(scope="module")
def earth():
    return atm.builtin_profile("us-standard-offset20")


class TestBuiltins:
    def test_earth_surface_row(self, earth):
        s = atm.sample(earth, 0.0)
        assert s.density_kgm3 == pytest.approx(1.15, abs=1e-9)
        assert s.temperature_k == pytest.approx(308.15, abs=1e-9)

    def test_venus_top_row(self, venus):
        s = atm.sample(venus, 62_000.0)
        assert s.density_kgm3 == pytest.approx(0.34, abs=1e-9)

    def test_flight_equivalence_rows(self, venus, earth):
        sv = atm.sample(venus, 54_000.0)
        assert sv.density_kgm3 == pytest.approx(1.03, abs=1e-9)
        assert sv.temperature_k == pytest.approx(312.85, abs=1e-9)
        se = atm.sample(earth, 2_200.0)
        assert se.density_kgm3 == pytest.approx(0.92, abs=1e-9)
        assert se.temperature_k == pytest.approx(293.85, abs=1e-9)

    def test_ideal_gas_closure_per_row(self, venus, earth):
        for profile, R in ((venus, R_CO2_MIX), (earth, R_AIR)):
            assert profile.closure_flags == ()
            for i in range(len(profile.alt_m)):
                p = profile.density_kgm3[i] * R * profile.temperature_k[i]
                assert p == pytest.approx(profile.pressure_pa[i], rel=1e-12)

    def test_unknown_name(self):
        with pytest.raises(ValidationError):
            atm.builtin_profile("mars")


class TestSample:
    def test_interpolated_density_recomputed(self, venus):
        # midway between the 54 and 55 km rows; density from interpolated P, T
        s = atm.sample(venus, 54_500.0)
        assert s.density_kgm3 == pytest.approx(0.975, rel=2e-3)
        assert s.density_kgm3 == pytest.approx(
            s.pressure_pa / (R_CO2_MIX * s.temperature_k), rel=1e-12)

    def test_continuity_at_every_knot(self, earth):
        eps = 1e-3
        for z in earth.alt_m:
            lo = atm.sample(earth, max(z - eps, earth.alt_m[0]))
            hi = atm.sample(earth, z + eps)
            assert hi.pressure_pa == pytest.approx(lo.pressure_pa, rel=1e-5)
            assert hi.temperature_k == pytest.approx(lo.temperature_k, rel=1e-5)
            assert hi.density_kgm3 == pytest.approx(lo.density_kgm3, rel=1e-5)

    def test_density_monotone_between_rows(self, earth):
        zs = [earth.alt_m[0] + k * 37.0 for k in range(260)]
        ds = [atm.sample(earth, z).density_kgm3 for z in zs]
        assert all(b < a for a, b in zip(ds, ds[1:]))

    def test_extrapolation_continues_hydrostatically(self, earth):
        top = earth.alt_m[-1]
        s0 = atm.sample(earth, top)
        s1 = atm.sample(earth, top + 1000.0)
        lapse = ((earth.temperature_k[-1] - earth.temperature_k[-2])
                 / (earth.alt_m[-1] - earth.alt_m[-2]))
        assert s1.temperature_k == pytest.approx(s0.temperature_k + 1000 * lapse)
        assert s1.pressure_pa < s0.pressure_pa

    def test_out_of_range_names_bound(self, earth):
        with pytest.raises(OutOfRangeError, match="above"):
            atm.sample(earth, earth.alt_m[-1] + 2500.0)
        with pytest.raises(OutOfRangeError, match="below"):
            atm.sample(earth, earth.alt_m[0] - 150.0)


class TestCsv:
    def test_round_trip_bit_exact(self, venus):
        text = atm.serialize_profile(venus)
        back = atm.load_profile(text, gas=venus.gas,
                                surface_gravity=venus.surface_gravity)
        assert back == venus

    def test_empty_file(self):
        with pytest.raises(ParseError):
            atm.load_profile("")

    def test_decreasing_altitude_rejected(self):
        txt = ("alt_m,pressure_pa,temp_k,density_kgm3\n"
               "100,90000,290,1.08\n50,95000,292,1.13\n")
        with pytest.raises(ValidationError, match="altitude strictly increasing"):
            atm.load_profile(txt)

    def test_increasing_pressure_rejected(self):
        txt = ("alt_m,pressure_pa,temp_k,density_kgm3\n"
               "0,90000,290,1.08\n100,95000,292,1.13\n")
        with pytest.raises(ValidationError, match="pressure strictly decreasing"):
            atm.load_profile(txt)

    def test_bad_column_count(self):
        with pytest.raises(ParseError, match="row 2"):
            atm.load_profile("alt_m,pressure_pa,temp_k,density_kgm3\n1,2,3\n")

    def test_winds_round_trip(self):
        w = atm.WindTable((0.0, 1000.0), (3.0, 5.0), (0.0, -1.0), (0.0, 0.2))
        assert atm.load_winds(atm.serialize_winds(w)) == w
        assert w.sample(500.0) == pytest.approx((4.0, -0.5, 0.1))


class TestDirectSolar:
    def test_hand_value(self):
        assert atm.direct_solar(500.0, 200.0, 0.0) == pytest.approx(400.0)

    def test_zero(self):
        assert atm.direct_solar(0.0, 0.0, 0.0) == 0.0

    def test_clamped_cancellation(self):
        assert atm.direct_solar(100.0, 200.0, 0.0) == 0.0

    def test_reduces_to_side_without_vertical(self):
        assert atm.direct_solar(321.5, 0.0, 0.0) == 321.5

    def test_negative_input_rejected(self):
        with pytest.raises(ValidationError):
            atm.direct_solar(-1.0, 0.0, 0.0)


class TestRadiationEnvironment:
    def test_channel_interpolation_and_clamp(self):
        ch = atm.Channel("t_s", (0.0, 10.0), (100.0, 200.0))
        assert ch.value(5.0) == pytest.approx(150.0)
        assert ch.value(-5.0) == 100.0
        assert ch.value(50.0) == 200.0

    def test_solar_zeroed_past_terminator(self):
        env = atm.RadiationEnvironment(
            e_down_solar=atm.constant_channel(800.0),
            e_up_ir=atm.constant_channel(350.0))
        day = env.fluxes(0.0, 0.0, zenith_rad=0.3)
        night = env.fluxes(0.0, 0.0, zenith_rad=2.0)
        assert day[2] == 800.0 and night[2] == 0.0
        assert day[3] == night[3] == 350.0

    def test_side_ir_defaults_to_half_ground_half_sky(self):
        env = atm.RadiationEnvironment(e_up_ir=atm.constant_channel(400.0),
                                       e_down_ir=atm.constant_channel(300.0))
        assert env.fluxes(0.0, 0.0)[4] == pytest.approx(350.0)

    def test_csv_round_trip(self):
        env = atm.RadiationEnvironment(
            e_up_solar=atm.constant_channel(120.0),
            e_side_solar=atm.Channel("t_s", (0.0, 60.0), (0.0, 500.0)),
            e_down_solar=atm.Channel("zenith_rad", (0.0, 1.5), (900.0, 80.0)),
            e_up_ir=atm.Channel("alt_m", (0.0, 2000.0), (420.0, 380.0)),
            e_down_ir=atm.constant_channel(310.0))
        back = atm.load_radiation(atm.serialize_radiation(env))
        assert back == env

    def test_negative_flux_rejected(self):
        with pytest.raises(ValidationError):
            atm.Channel("t_s", (0.0,), (-1.0,))
