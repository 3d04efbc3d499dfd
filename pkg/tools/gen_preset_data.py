#!/usr/bin/env python3
"""Regenerate the bundled scenario presets under src/aerobot/data/.

Builds each preset's shape table, trims the outer-chamber fill to the target
free lift with the engine's own closure, and writes scenario.cfg plus the
radiation and shape-table artifacts. Rerun after changing preset physics.
"""
import math
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from aerobot.atmosphere import (Channel, RadiationEnvironment, builtin_profile,
                                constant_channel, serialize_radiation)
from aerobot.constants import STEFAN_BOLTZMANN
from aerobot.dynamics import AerobotConfig, Environment, trim_zp_fill_for_free_lift
from aerobot.envelope import EnvelopeSpec, InflatedGeometry
from aerobot.aero import AeroCoefficients
from aerobot.gastransfer import TransferDeviceSpec
from aerobot.scenario import dumps_scenario, scenario_from_dict
from aerobot.shape import ShapeLoads
from aerobot.shapetable import build_shape_table

DATA = ROOT / "src" / "aerobot" / "data"


def build(name, raw, rad_env, rho_axis, fill_axis, loads_rho_zp):
    out = DATA / name
    out.mkdir(parents=True, exist_ok=True)
    (out / "radiation.csv").write_text(serialize_radiation(rad_env),
                                       encoding="utf-8")
    raw = dict(raw)
    raw.setdefault("radiation", {})["file"] = "radiation.csv"
    raw["shape_table"]["file"] = "shapetable.csv"

    # bootstrap without the table reference to build geometry/config objects
    boot = dict(raw)
    boot["shape_table"] = {k: v for k, v in raw["shape_table"].items()
                           if k != "file"}
    boot["aerobot"] = dict(raw["aerobot"], m_zp_gas_kg=1.0, free_lift_kg=0.0)
    scen = scenario_from_dict(boot, base_dir=out)
    loads = ShapeLoads(m_payload=scen.config.m_payload,
                       m_sp_gas=scen.config.m_sp_gas0,
                       rho_zp_gas=loads_rho_zp,
                       g=scen.environment.atmosphere.surface_gravity)
    if (out / "shapetable.csv").exists():
        print(f"[{name}] reusing existing shape table")
        from aerobot.shapetable import ShapeTable
        table = ShapeTable.load(out / "shapetable.csv", scen.config.envelope)
    else:
        print(f"[{name}] building shape table "
              f"({len(rho_axis)}x{len(fill_axis)} cells)...")
        table = build_shape_table(scen.config.envelope, loads,
                                  rho_axis=rho_axis, fill_axis=fill_axis)
        table.save(out / "shapetable.csv")

    m_zp = trim_zp_fill_for_free_lift(scen.config, scen.environment, table,
                                      raw["aerobot"]["free_lift_kg"])
    raw["aerobot"]["m_zp_gas_kg"] = float(repr(m_zp) and m_zp)
    print(f"[{name}] trimmed m_zp_gas = {m_zp!r} kg")
    (out / "scenario.cfg").write_text(dumps_scenario(raw), encoding="utf-8")
    # verify the emitted preset loads and passes the init consistency check
    from aerobot.scenario import load_scenario, make_engine
    scen2 = load_scenario(out / "scenario.cfg")
    eng = make_engine(scen2)
    print(f"[{name}] ok: float check passed, fill0="
          f"{eng.state.v_zp / scen2.config.envelope.gas_capacity:.3f}")


def nevada():
    profile = builtin_profile("us-standard-offset20")
    e_bb = tuple(STEFAN_BOLTZMANN * T ** 4 for T in profile.temperature_k)
    rad = RadiationEnvironment(
        e_up_ir=Channel("alt_m", profile.alt_m, e_bb),
        e_down_ir=Channel("alt_m", profile.alt_m, e_bb))
    raw = {
        "name": "nevada-flight2",
        "planet": "earth",
        "atmosphere": {"profile": "builtin:us-standard-offset20"},
        "radiation": {},
        "wind_time": {"rows": [[0.0, 3.0, 1.0, 0.0],
                               [9000.0, 4.0, 0.5, 0.0],
                               [18000.0, 3.5, 1.5, 0.0]]},
        "aerobot": {
            "upper_diameter_m": 5.0, "lower_diameter_m": 2.5,
            "cone_half_angle_deg": 60.0, "sp_diameter_m": 2.5,
            "m_zp_env_kg": 13.3, "m_sp_env_kg": 8.0, "m_payload_kg": 26.5,
            "m_sp_gas_kg": 1.3, "m_zp_gas_kg": 0.0, "free_lift_kg": 0.32,
            "pump_vdot_m3s": 3.333e-4,
            "vent_cd": 0.6, "vent_d_m": 0.007,
            "poppet_cd": 0.6, "poppet_d_m": 0.095,
            "c_d_top": 0.8, "c_d_side": 1.0, "c_m": 0.2,
            "node_heat_capacity_jk": [2000.0, 6000.0, 4000.0, 5000.0],
            "alpha_solar": [0.08, 0.30, 0.08, 0.08],
            "eps_ir": [0.52, 0.85, 0.52, 0.52],
            "launch_alt_m": 1300.0, "terrain_alt_m": 1300.0,
        },
        "run": {"t_end_s": 25200.0, "dt_s": 0.5, "recorder_cadence_s": 1.0},
        "shape_table": {"rho_min": 0.55, "rho_max": 1.15, "n_rho": 6,
                        "n_fill": 24, "fill_min": 0.66, "fill_max": 0.995},
        "timeline": [
            {"t_s": 3600.0, "action": "vent_open"},
            {"t_s": 3690.0, "action": "vent_close"},
            {"t_s": 7200.0, "action": "pump_on"},
            {"t_s": 9900.0, "action": "pump_off"},
            {"t_s": 12600.0, "action": "vent_open"},
            {"t_s": 12690.0, "action": "vent_close"},
            {"t_s": 16200.0, "action": "pump_on"},
            {"t_s": 18900.0, "action": "pump_off"},
            {"t_s": 21600.0, "action": "vent_open"},
            {"t_s": 21690.0, "action": "vent_close"},
        ],
    }
    build("nevada-flight2", raw, rad,
          np.geomspace(0.55, 1.15, 6).tolist(),
          np.linspace(0.66, 0.995, 24).tolist(), loads_rho_zp=0.103)


VENUS_AEROBOT = {
    "upper_diameter_m": 12.5, "lower_diameter_m": 6.25,
    "cone_half_angle_deg": 60.0, "sp_diameter_m": 6.25,
    "m_zp_env_kg": 65.0, "m_sp_env_kg": 25.0, "m_payload_kg": 100.0,
    "m_sp_gas_kg": 14.0, "m_zp_gas_kg": 0.0, "free_lift_kg": 0.5,
    "pump_vdot_m3s": 2.0e-3,
    "vent_cd": 0.6, "vent_d_m": 0.025,
    "poppet_cd": 0.6, "poppet_d_m": 0.15,
    "c_d_top": 0.8, "c_d_side": 1.0, "c_m": 0.2,
    "node_heat_capacity_jk": [8000.0, 30000.0, 28000.0, 26000.0],
    "alpha_solar": [0.08, 0.30, 0.08, 0.08],
    "eps_ir": [0.52, 0.85, 0.52, 0.52],
    "launch_alt_m": 54500.0, "terrain_alt_m": 52000.0,
    "start_with_wind": True,
}


def venus_radiation():
    # synthetic cloud-layer fluxes keyed by solar zenith angle; shortwave is
    # intense at the cloud tops, longwave up from the hot deep atmosphere
    zen = tuple(math.radians(a) for a in (0, 30, 50, 70, 80, 85, 90))
    return RadiationEnvironment(
        e_down_solar=Channel("zenith_rad", zen, (900.0, 800.0, 600.0, 300.0,
                                                 140.0, 60.0, 0.0)),
        e_side_solar=Channel("zenith_rad", zen, (850.0, 800.0, 650.0, 380.0,
                                                 190.0, 90.0, 0.0)),
        e_up_solar=Channel("zenith_rad", zen, (420.0, 370.0, 280.0, 140.0,
                                               65.0, 28.0, 0.0)),
        e_up_ir=constant_channel(430.0),
        e_down_ir=constant_channel(330.0))


def venus_b2():
    raw = {
        "name": "venus-b2",
        "planet": "venus",
        "atmosphere": {"profile": "builtin:vira-clouds"},
        "radiation": {},
        "wind_time": {"rows": [[0.0, -70.0, 0.3, 0.0]]},
        "aerobot": dict(VENUS_AEROBOT),
        "run": {"t_end_s": 2160000.0, "dt_s": 2.0,
                "recorder_cadence_s": 120.0},
        "shape_table": {"rho_min": 0.28, "rho_max": 1.25, "n_rho": 8,
                        "n_fill": 24, "fill_min": 0.04, "fill_max": 0.995},
        "venus": {"entry_lat_deg": 5.0, "entry_lon_deg": 0.0,
                  "entry_local_solar_time_h": 18.0},
        "timeline": [
            {"t_s": 600000.0, "action": "vent_open"},
            {"t_s": 600090.0, "action": "vent_close"},
            {"t_s": 1620000.0, "action": "pump_on"},
            {"t_s": 1626000.0, "action": "pump_off"},
        ],
    }
    build("venus-b2", raw, venus_radiation(),
          np.geomspace(0.28, 1.25, 8).tolist(),
          np.linspace(0.04, 0.995, 24).tolist(), loads_rho_zp=0.085)


def venus_b2_kinematic():
    raw = {
        "name": "venus-b2-kinematic",
        "planet": "venus",
        "atmosphere": {"profile": "builtin:vira-clouds"},
        "radiation": {},
        "wind_time": {"rows": [[0.0, -70.0, 0.0, 0.0]]},
        "aerobot": dict(VENUS_AEROBOT),
        "run": {"t_end_s": 700000.0, "dt_s": 2.0,
                "recorder_cadence_s": 120.0},
        "shape_table": {"rho_min": 0.28, "rho_max": 1.25, "n_rho": 8,
                        "n_fill": 24, "fill_min": 0.04, "fill_max": 0.995},
        "venus": {"entry_lat_deg": 5.0, "entry_lon_deg": 0.0,
                  "entry_local_solar_time_h": 18.0},
        "timeline": [],
    }
    rad = RadiationEnvironment(e_up_ir=constant_channel(430.0),
                               e_down_ir=constant_channel(330.0))
    build("venus-b2-kinematic", raw, rad,
          np.geomspace(0.28, 1.25, 8).tolist(),
          np.linspace(0.04, 0.995, 24).tolist(), loads_rho_zp=0.085)


def nevada_float():
    """Float-start variant of the desert flight: zero free lift, no timeline.

    Starts at its equilibrium altitude, for piloting sessions and console
    integration tests that need immediate command response.
    """
    import shutil
    src = DATA / "nevada-flight2"
    out = DATA / "nevada-float"
    out.mkdir(parents=True, exist_ok=True)
    for name in ("radiation.csv", "shapetable.csv", "shapetable.ext.csv"):
        shutil.copyfile(src / name, out / name)
    import tomli
    raw = tomli.loads((src / "scenario.cfg").read_text(encoding="utf-8"))
    raw["name"] = "nevada-float"
    raw["timeline"] = []
    raw["run"] = {"t_end_s": 86400.0, "dt_s": 0.5, "recorder_cadence_s": 1.0}
    raw["aerobot"]["launch_alt_m"] = 1700.0
    raw["aerobot"]["free_lift_kg"] = 0.0
    boot = dict(raw)
    boot["aerobot"] = dict(raw["aerobot"], m_zp_gas_kg=1.0, free_lift_kg=0.0)
    scen = scenario_from_dict(boot, base_dir=out)
    from aerobot.shapetable import ShapeTable
    table = ShapeTable.load(out / "shapetable.csv", scen.config.envelope)
    m_zp = trim_zp_fill_for_free_lift(scen.config, scen.environment, table, 0.0)
    raw["aerobot"]["m_zp_gas_kg"] = m_zp
    (out / "scenario.cfg").write_text(dumps_scenario(raw), encoding="utf-8")
    from aerobot.scenario import load_scenario, make_engine
    eng = make_engine(load_scenario(out / "scenario.cfg"))
    print(f"[nevada-float] ok: m_zp={m_zp!r}, starts at "
          f"{eng.state.alt:.0f} m with zero lift")


if __name__ == "__main__":
    which = sys.argv[1:] or ["nevada", "venus", "kinematic", "float"]
    if "nevada" in which:
        nevada()
    if "venus" in which:
        venus_b2()
    if "kinematic" in which:
        venus_b2_kinematic()
    if "float" in which:
        nevada_float()
