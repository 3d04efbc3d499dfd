"""
Atmosphere columns and the radiative environment
=================================================

The engine carries Earth and Venus cloud-layer columns whose densities match
row for row: the flight-equivalence idea is that balloon dynamics are driven
almost entirely by density, so a low-altitude Earth flight exercises the same
regime as the 54-55 km band on Venus. This script samples both columns,
shows the hydrostatic extrapolation beyond the tables, and decomposes welling
solar fluxes into a direct-sun magnitude.

Run:  python demos/01_atmosphere_and_radiation.py
"""
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from aerobot import atmosphere as atm

earth = atm.builtin_profile("us-standard-offset20")
venus = atm.builtin_profile("vira-clouds")

# sample both columns densely, past the table tops into the extrapolation band
ze = np.linspace(earth.alt_min, earth.alt_max, 400)
zv = np.linspace(venus.alt_min, venus.alt_max, 400)
rho_e = [atm.sample(earth, z).density_kgm3 for z in ze]
rho_v = [atm.sample(venus, z).density_kgm3 for z in zv]

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
ax1.plot(rho_e, ze / 1e3, label="Earth +20C column")
ax1.set_xlabel("density kg/m3")
ax1.set_ylabel("altitude km")
ax1.legend()
ax2.plot(rho_v, zv / 1e3, color="tab:orange", label="Venus cloud layer")
ax2.set_xlabel("density kg/m3")
ax2.set_ylabel("altitude km")
ax2.legend()
fig.tight_layout()
fig.savefig("demos/out_atmosphere.png", dpi=110)
print("wrote demos/out_atmosphere.png")

# the same density appears ~52 km apart on the two planets
for rho in (1.03, 0.92, 0.63):
    ze_m = min(ze, key=lambda z: abs(atm.sample(earth, z).density_kgm3 - rho))
    zv_m = min(zv, key=lambda z: abs(atm.sample(venus, z).density_kgm3 - rho))
    print(f"rho={rho:5.2f} kg/m3:  Earth {ze_m/1e3:5.1f} km  <->  "
          f"Venus {zv_m/1e3:5.1f} km")

# direct-sun decomposition from the three welling channels: the ground-bounce
# half of the upwelling flux is removed from the side signal first
for e_side, e_up, e_down in ((500.0, 200.0, 0.0), (640.0, 300.0, 410.0)):
    d = atm.direct_solar(e_side, e_up, e_down)
    print(f"E_side={e_side:6.0f} E_up={e_up:6.0f} E_down={e_down:6.0f}"
          f"  ->  direct {d:7.1f} W/m2")
