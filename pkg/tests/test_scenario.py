import dataclasses

import pytest

from aerobot.errors import ValidationError
from aerobot.gastransfer import CommandKind, TransferCommand
from aerobot.scenario import (RunParams, dumps_scenario, ensure_table,
                              load_scenario, load_telemetry, replay,
                              scenario_from_dict, serialize_telemetry,
                              simulate, telemetry_from_record)

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib


@pytest.fixture(scope="module")
def nevada():
    scen = load_scenario("nevada-flight2")
    return scen, ensure_table(scen)


def short_scenario(scen, t_end, timeline, cadence=None, dt=None):
    return dataclasses.replace(
        scen, timeline=tuple(timeline),
        run=RunParams(t_end_s=t_end, dt_s=dt or scen.run.dt_s,
                      recorder_cadence_s=cadence or scen.run.recorder_cadence_s))


class TestLoad:
    def test_nevada_preset_parameters(self, nevada):
        scen, _ = nevada
        cfg = scen.config
        assert cfg.free_lift == pytest.approx(0.320)
        assert cfg.m_payload == pytest.approx(26.5)
        assert cfg.m_sp_env + cfg.m_zp_env == pytest.approx(21.3)
        assert scen.planet == "earth"
        assert cfg.devices.vent_d == pytest.approx(0.007)
        assert cfg.devices.poppet_d == pytest.approx(0.095)

    def test_venus_preset_parameters(self):
        scen = load_scenario("venus-b2")
        cfg = scen.config
        assert cfg.envelope.geometry.upper_diameter_m == 12.5
        assert cfg.m_payload == pytest.approx(100.0)
        assert scen.venus.entry_lat_deg == pytest.approx(5.0)
        assert scen.environment.atmosphere.alt_m[0] == 52_000.0
        assert scen.environment.atmosphere.alt_m[-1] == 62_000.0

    def test_unknown_file(self):
        with pytest.raises(ValidationError, match="not found"):
            load_scenario("/nonexistent/scenario.cfg")

    def test_missing_winds_file_names_path(self, tmp_path, nevada):
        scen, _ = nevada
        raw = dict(scen.raw)
        raw["atmosphere"] = dict(raw["atmosphere"], winds="winds.csv")
        p = tmp_path / "scenario.cfg"
        p.write_text(dumps_scenario(raw), encoding="utf-8")
        with pytest.raises(ValidationError, match="winds.csv"):
            load_scenario(p)

    def test_field_path_in_errors(self, nevada):
        scen, _ = nevada
        raw = dict(scen.raw)
        raw["aerobot"] = {k: v for k, v in raw["aerobot"].items()
                          if k != "m_payload_kg"}
        with pytest.raises(ValidationError, match="aerobot.m_payload_kg"):
            scenario_from_dict(raw, base_dir=scen.base_dir)


class TestRoundTrip:
    def test_serialization_is_bit_exact(self, nevada):
        scen, _ = nevada
        text = dumps_scenario(scen.raw)
        assert tomllib.loads(text) == scen.raw

    def test_reload_equivalent_scenario(self, tmp_path, nevada):
        scen, _ = nevada
        out = tmp_path / "copy.cfg"
        out.write_text(dumps_scenario(scen.raw), encoding="utf-8")
        # data files resolve relative to the original preset directory
        for name in ("radiation.csv", "shapetable.csv", "shapetable.ext.csv"):
            (tmp_path / name).write_bytes(
                (scen.base_dir / name).read_bytes())
        back = load_scenario(out)
        assert back.config == scen.config
        assert back.timeline == scen.timeline
        assert back.run == scen.run


@pytest.fixture(scope="module")
def short_run(nevada):
    scen, table = nevada
    s = short_scenario(scen, 240.0,
                       [TransferCommand(60.0, CommandKind.VENT_OPEN),
                        TransferCommand(90.0, CommandKind.VENT_CLOSE)],
                       cadence=0.5)
    rec = simulate(s, table)
    return s, table, rec


class TestTelemetry:
    def test_telemetry_round_trip(self, short_run):
        s, table, rec = short_run
        tel = telemetry_from_record(rec, s.name)
        back = load_telemetry(serialize_telemetry(tel))
        assert back.commands == tel.commands
        assert len(back.rows) == len(tel.rows)
        for a, b in zip(back.rows, tel.rows):
            assert a == b

    def test_gap_detection(self, short_run):
        s, table, rec = short_run
        tel = telemetry_from_record(rec, s.name)
        rows = tel.rows[:10] + tel.rows[200:]
        gappy = dataclasses.replace(tel, rows=rows)
        assert gappy.gaps(60.0)
        with pytest.raises(ValidationError, match="gap"):
            replay(s, gappy, table)

    def test_strictly_increasing_timestamps_enforced(self, short_run):
        s, table, rec = short_run
        tel = telemetry_from_record(rec, s.name)
        with pytest.raises(ValidationError):
            dataclasses.replace(tel, rows=tel.rows + (tel.rows[-1],))


@pytest.fixture(scope="module")
def fixture_run(nevada):
    scen, table = nevada
    s = short_scenario(scen, 300.0,
                       [TransferCommand(60.0, CommandKind.VENT_OPEN),
                        TransferCommand(100.0, CommandKind.VENT_CLOSE)],
                       cadence=0.5)          # cadence == dt: exact replay
    rec = simulate(s, table)
    tel = telemetry_from_record(rec, s.name)
    return s, table, tel


class TestReplay:
    def test_self_replay_is_fixed_point(self, fixture_run):
        s, table, tel = fixture_run
        report = replay(s, tel, table)
        assert report.all_zero()
        assert report.max_abs_alt_err_m == 0.0
        assert report.temp_rms_k == 0.0

    def test_known_altitude_bias_recovered(self, fixture_run):
        s, table, tel = fixture_run
        rows = tuple(dict(r, alt_m=r["alt_m"] + 100.0) for r in tel.rows)
        biased = dataclasses.replace(tel, rows=rows)
        report = replay(s, biased, table)
        assert report.max_abs_alt_err_m == pytest.approx(100.0, abs=1.0)

    def test_vent_sign_agreement_on_fixture(self, fixture_run):
        s, table, tel = fixture_run
        report = replay(s, tel, table, sign_window_s=200.0)
        assert report.sign_agreement == 1.0

    def test_comparison_csv_shape(self, fixture_run):
        s, table, tel = fixture_run
        report = replay(s, tel, table)
        lines = report.to_csv().strip().split("\n")
        assert lines[0].startswith("t_s,d_alt_m,d_p_sp_pa")
        assert len(lines) == 1 + len(report.t_s)
