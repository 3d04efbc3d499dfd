"""
Equilibrium envelope shapes across fill fractions
=================================================

The outer envelope drapes around the internal reservoir sphere: seated film
below the separation angle, a free zero-hoop-stress arc in the middle, and
the taut as-fabricated cap on top. Solving the free-arc boundary value
problem across fill fractions shows the progression from a peanut hugging the
reservoir to the fully inflated sphere-cone-sphere, and the solved family has
a hard lower fill limit below which no axisymmetric equilibrium exists (the
film drapes instead; the engine switches to a flagged approximation there).

Run:  python demos/02_envelope_shapes.py
"""
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from aerobot.envelope import nevada_envelope
from aerobot.shape import ShapeLoads, ShapeSolver

spec = nevada_envelope()
loads = ShapeLoads(m_payload=26.5, m_sp_gas=1.3, rho_zp_gas=0.12, g=9.81)
solver = ShapeSolver(spec, loads)

rho_diff = 0.87
family = solver.family(rho_diff)
print(f"solution family spans fills [{family[0][0]:.3f}, {family[-1][0]:.3f}]"
      f" at rho_diff={rho_diff} kg/m3")

fig, ax = plt.subplots(figsize=(6, 7))
theta = np.linspace(0, 2 * np.pi, 200)
ax.plot(spec.r_sp * np.sin(theta), spec.r_sp + spec.r_sp * np.cos(theta),
        "k--", lw=1, label="reservoir sphere")

for fill in (0.68, 0.80, 0.90, 0.99):
    sol = solver.solve_volume(rho_diff, fill * spec.gas_capacity,
                              family=family)
    ax.plot(sol.r, sol.z, label=f"fill {fill:.2f}  (beta={sol.beta:.2f})")
    ax.plot(-sol.r, sol.z, color=ax.lines[-1].get_color())
    print(f"fill={fill:.2f}: beta={sol.beta:.3f} rad, z_p0={sol.z_p0:+.2f} m, "
          f"A_top={sol.a_top:6.2f} m2, A_side={sol.a_side:6.2f} m2, "
          f"tension={sol.f_tension_s0:6.1f} N")

ax.set_aspect("equal")
ax.set_xlabel("radius m")
ax.set_ylabel("height m")
ax.legend(loc="upper right", fontsize=8)
fig.tight_layout()
fig.savefig("demos/out_shapes.png", dpi=110)
print("wrote demos/out_shapes.png")
