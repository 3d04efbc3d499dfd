"""Command-line entry point.

Subcommands: shapetable (generate the lookup artifact), simulate (run a
scenario), replay (drive the engine from telemetry and emit the comparison),
venus (mission presets with ground-track products), and serve (live piloting
session server).

Exit codes: 0 success, 1 configuration or validation error, 2 shape table
with infeasible cells, 3 engine fault during a run.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .errors import AerobotError, EngineFault, ParseError, ValidationError
from .scenario import (ensure_table, load_scenario, load_telemetry,
                       make_engine, replay, serialize_telemetry, simulate,
                       telemetry_from_record)
from .shapetable import build_shape_table
from .venus import circumnavigation_times, ground_track, local_noons

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_FAULT = 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="aerobot",
        description="variable-altitude balloon-in-balloon flight simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shapetable", help="precompute the shape lookup table")
    p.add_argument("--scenario", "--spec", dest="scenario", required=True,
                   help="scenario file or bundled preset name")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--grid", default=None,
                   help="RxC grid (rho_diff x fill), minimum 4x4")

    p = sub.add_parser("simulate", help="run a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--t-end", type=float, default=None)

    p = sub.add_parser("replay", help="re-drive the engine from telemetry")
    p.add_argument("--scenario", required=True)
    p.add_argument("--telemetry", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("venus", help="run a Venus mission preset")
    p.add_argument("--preset", default="b2", choices=["b2", "b2-kinematic"])
    p.add_argument("--days", type=float, default=25.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("serve", help="live piloting session server")
    p.add_argument("--scenario", required=True)
    p.add_argument("--port", type=int, default=8751)
    p.add_argument("--speed", type=float, default=1.0)
    p.add_argument("--host", default="127.0.0.1")

    args = parser.parse_args(argv)
    try:
        return {
            "shapetable": cmd_shapetable,
            "simulate": cmd_simulate,
            "replay": cmd_replay,
            "venus": cmd_venus,
            "serve": cmd_serve,
        }[args.command](args)
    except (ValidationError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except EngineFault as e:
        print(f"engine fault: {e}", file=sys.stderr)
        return EXIT_FAULT
    except AerobotError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


def cmd_shapetable(args) -> int:
    scen = load_scenario(args.scenario)
    ax = dict(scen.table_axes)
    if args.grid is not None:
        try:
            n_rho, n_fill = (int(v) for v in args.grid.lower().split("x"))
        except ValueError:
            print("error: --grid expects RxC, e.g. 16x32", file=sys.stderr)
            return EXIT_CONFIG
        if n_rho < 4 or n_fill < 4:
            print("error: --grid needs at least 4 points per axis",
                  file=sys.stderr)
            return EXIT_CONFIG
        ax["n_rho"], ax["n_fill"] = n_rho, n_fill
    table = build_shape_table(
        scen.config.envelope, scen.shape_loads(),
        rho_axis=np.geomspace(ax["rho_min"], ax["rho_max"], ax["n_rho"]).tolist(),
        fill_axis=np.linspace(ax["fill_min"], ax["fill_max"],
                              ax["n_fill"]).tolist())
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    table.save(out)
    bad = table.infeasible_cells
    if bad:
        print(f"wrote {out} with {len(bad)} infeasible cells: {bad[:10]}",
              file=sys.stderr)
        return EXIT_INFEASIBLE
    print(f"wrote {out} ({len(table.rho_axis)}x{len(table.fill_axis)} cells)")
    return EXIT_OK


def _write_summary(out_dir: Path, scen, rec, wall_s: float, extra=()):
    lines = [f"scenario: {scen.name}",
             f"planet: {scen.planet}",
             f"simulated: {rec.rows[-1]['t_s']:.1f} s "
             f"({len(rec.rows)} snapshots)",
             f"wall time: {wall_s:.1f} s",
             f"final altitude: {rec.rows[-1]['alt_m']:.1f} m",
             f"fault: {rec.fault or 'none'}"]
    alts = [r["alt_m"] for r in rec.rows]
    lines.append(f"altitude band: [{min(alts):.1f}, {max(alts):.1f}] m")
    lines += list(extra)
    lines.append("events:")
    for (t, kind, detail) in rec.events:
        lines.append(f"  {t:12.1f}  {kind}: {detail}")
    (out_dir / "run-summary.txt").write_text("\n".join(lines) + "\n",
                                             encoding="utf-8")


def cmd_simulate(args) -> int:
    scen = load_scenario(args.scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = ensure_table(scen)
    t0 = time.perf_counter()
    rec = simulate(scen, table, t_end=args.t_end)
    wall = time.perf_counter() - t0
    (out / "trajectory.csv").write_text(rec.to_csv(), encoding="utf-8")
    tel = telemetry_from_record(rec, scen.name)
    (out / "telemetry.csv").write_text(serialize_telemetry(tel),
                                       encoding="utf-8")
    _write_summary(out, scen, rec, wall)
    if rec.fault:
        print(f"engine fault: {rec.fault}", file=sys.stderr)
        return EXIT_FAULT
    print(f"wrote {out}/trajectory.csv; float altitude "
          f"{rec.rows[-1]['alt_m']:.1f} m")
    return EXIT_OK


def cmd_replay(args) -> int:
    scen = load_scenario(args.scenario)
    tel = load_telemetry(Path(args.telemetry))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = ensure_table(scen)
    report = replay(scen, tel, table)
    (out / "comparison.csv").write_text(report.to_csv(), encoding="utf-8")
    lines = [f"scenario: {scen.name}",
             f"samples compared: {len(report.t_s)}",
             f"max |d alt|: {report.max_abs_alt_err_m:.6g} m",
             f"accumulated |d P_sp| (final): "
             f"{report.final_abs_p_sp_err_pa:.6g} Pa",
             f"max |d P_sp|: {report.max_abs_p_sp_err_pa:.6g} Pa",
             f"temperature RMS: {report.temp_rms_k:.6g} K",
             f"command sign agreement: {report.sign_agreement:.3f}"]
    (out / "run-summary.txt").write_text("\n".join(lines) + "\n",
                                         encoding="utf-8")
    print("\n".join(lines))
    return EXIT_OK


def cmd_venus(args) -> int:
    scen = load_scenario(f"venus-{args.preset}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = ensure_table(scen)
    t0 = time.perf_counter()
    rec = simulate(scen, table, t_end=args.days * 86400.0)
    wall = time.perf_counter() - t0
    (out / "trajectory.csv").write_text(rec.to_csv(), encoding="utf-8")
    geo = scen.venus.geometry()
    ts = rec.column("t_s")
    track = ground_track(geo, ts, rec.column("east_m"), rec.column("north_m"))
    gt_lines = ["t_s,lat_deg,lon_deg,local_solar_time_h,is_day"]
    for (t, lat, lon, lst, day) in track:
        gt_lines.append(f"{t!r},{lat!r},{lon!r},{lst!r},{int(day)}")
    (out / "groundtrack.csv").write_text("\n".join(gt_lines) + "\n",
                                         encoding="utf-8")
    circum = circumnavigation_times(geo, ts, rec.column("east_m"))
    noons = local_noons(geo, ts, rec.column("east_m"), rec.column("north_m"))
    extra = [f"circumnavigations: {len(circum)} at days "
             f"{[round(t / 86400, 2) for t in circum]}",
             f"local noons at days: {[round(t / 86400, 2) for t in noons]}"]
    _write_summary(out, scen, rec, wall, extra)
    if rec.fault:
        print(f"engine fault: {rec.fault}", file=sys.stderr)
        return EXIT_FAULT
    print(f"wrote {out}/trajectory.csv and groundtrack.csv "
          f"({args.days:.0f} simulated days in {wall:.0f} s)")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import SessionServer
    scen = load_scenario(args.scenario)
    table = ensure_table(scen)

    def fresh_engine():
        return make_engine(scen, table)

    try:
        server = SessionServer(fresh_engine, port=args.port, host=args.host,
                               speed=args.speed)
        server.start()
    except OSError as e:
        print(f"error: cannot bind port {args.port}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"serving {scen.name} on {args.host}:{server.port} "
          f"at {args.speed:g}x real time", flush=True)
    try:
        while True:
            time.sleep(0.5)
    except KeyboardInterrupt:
        server.stop()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
