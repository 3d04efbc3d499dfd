"""
A 25-day Venus mission with three circumnavigations
===================================================

The full-scale aerobot enters at 5 degrees latitude at sunset and rides the
westward super-rotation around the planet. Solar heating of the outer helium
makes the float altitude track the sun, peaking at each local noon; a vent
after the first circumnavigation raises the equilibrium altitude without
spending power, and a pump run on the dayside of the third circumnavigation
brings it back down.

This integrates 25 days at a 2 s step (about a million steps; expect a few
minutes).

Run:  python demos/04_venus_mission.py
"""
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from aerobot.scenario import ensure_table, load_scenario, venus_preset_run
from aerobot.venus import circumnavigation_times, local_noons

scen = load_scenario("venus-b2")
table = ensure_table(scen)
rec, track = venus_preset_run("b2", duration_days=25.0, table=table)
print(f"fault: {rec.fault}")

geo = scen.venus.geometry()
ts = rec.column("t_s")
days = [t / 86400 for t in ts]
noons = local_noons(geo, ts, rec.column("east_m"), rec.column("north_m"))
circum = circumnavigation_times(geo, ts, rec.column("east_m"))
print("circumnavigations at days:", [round(t / 86400, 2) for t in circum])
print("local noons at days:", [round(t / 86400, 2) for t in noons])

fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(10, 7))
ax1.plot(days, [a / 1e3 for a in rec.column("alt_m")], lw=0.8)
for tn in noons:
    ax1.axvline(tn / 86400, color="orange", alpha=0.5, lw=1)
for tc in circum:
    ax1.axvline(tc / 86400, color="gray", alpha=0.5, lw=1, ls="--")
ax1.set_ylabel("altitude km")
ax1.set_xlabel("Earth days (orange: local noon, gray: one circumnavigation)")

night = [not p[4] for p in track]
lons = [p[2] for p in track]
lats = [p[1] for p in track]
ax2.scatter([l for l, n in zip(lons, night) if n],
            [l for l, n in zip(lats, night) if n], s=1, c="navy",
            label="night")
ax2.scatter([l for l, n in zip(lons, night) if not n],
            [l for l, n in zip(lats, night) if not n], s=1, c="gold",
            label="day")
ax2.set_xlabel("longitude deg")
ax2.set_ylabel("latitude deg")
ax2.legend(markerscale=8)
fig.tight_layout()
fig.savefig("demos/out_venus.png", dpi=110)
print("wrote demos/out_venus.png")
