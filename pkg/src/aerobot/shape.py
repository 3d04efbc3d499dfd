"""Equilibrium shape of the outer envelope around the internal reservoir.

The meridian has three partitions: a base section seated on the reservoir
sphere up to polar angle beta, a free mid section where the hoop stress is
zero, and a taut apex section that follows the as-fabricated geometry. The
free section obeys a four-state ODE in material arclength s,

    theta' = -q r [w sin(theta) + dp]
    q'     = -q^2 w r cos(theta)
    r'     = sin(theta)
    z'     = cos(theta)

with q = 1/(r sigma_m) the reciprocal meridional stress resultant and dp the
local transmural gauge pressure. The gauge field is hydrostatic,
dp = b (z - z_p0) with b = g rho_diff, where z_p0 is the height (above the
aerobot bottom) at which internal and external pressure are equal. Note the
textbook form of the ODE writes the load term as b (z + z_p0); that offset is
the negative of the equality height used everywhere else in this module.

Boundary conditions at the separation point s0 = R_sp * beta tie the film
tension to the suspended load (payload, reservoir weight and gas, film weight,
minus the base buoyancy integral); the far end must meet the fabricated curve
in both angle and radius at the attachment arclength s_l. beta, z_p0, and s_l
are solved simultaneously against the two matching conditions plus a target
enclosed gas volume.

For a given loading the solution family only reaches down to a minimum fill
fraction (the family folds back); below it no axisymmetric zero-hoop
equilibrium exists and a flagged geometric approximation is returned instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import root

from .constants import GRAVITY_EARTH
from .envelope import EnvelopeSpec
from .errors import InfeasibleError, SolverError, ValidationError

DEGENERATE_FILL = 0.02          # below this, the analytic stand-in is used outright
_DS_DEFAULT = 0.01              # integrator arclength step, scaled to geometry


def shape_rhs(state: tuple, params: tuple) -> tuple:
    """Right-hand side of the free-film ODE, textbook sign convention.

    state = (theta, q, r, z); params = (w_zp, b, z_p0) with the load term
    b * (z + z_p0). Callers that track the pressure-equality height h must
    pass z_p0 = -h. Raises on r <= 0 or q <= 0 (the caller must shrink its
    step or reject the shot).
    """
    theta, q, r, z = state
    if r <= 0.0 or q <= 0.0:
        raise SolverError(f"singular free-film state (r={r:.4g}, q={q:.4g})")
    w_zp, b, z_p0 = params
    sin_t = math.sin(theta)
    cos_t = math.cos(theta)
    return (-q * r * (w_zp * sin_t + b * (z + z_p0)),
            -q * q * w_zp * r * cos_t,
            sin_t,
            cos_t)


def base_buoyancy(beta: float, z_p0: float, rho_diff: float, r_sp: float,
                  g: float = GRAVITY_EARTH) -> float:
    """Net vertical pressure force on the seated base, up to angle beta.

    z_p0 is the pressure-equality height above the aerobot bottom. At
    beta = pi this reduces to the full Archimedes force rho_diff g V_sphere.
    """
    if not (0.0 <= beta <= math.pi):
        raise ValidationError("beta must lie in [0, pi]")
    sin_b = math.sin(beta)
    return (math.pi * sin_b * sin_b * g * rho_diff * (z_p0 - r_sp) * r_sp ** 2
            + 2.0 * math.pi / 3.0 * (1.0 - math.cos(beta) ** 3) * rho_diff * g * r_sp ** 3)


def initial_tension(beta: float, z_p0: float, *, r_sp: float, w_zp: float,
                    w_sp: float, m_payload: float, m_sp_gas: float,
                    rho_zp_gas: float, rho_diff: float,
                    g: float = GRAVITY_EARTH) -> float:
    """Vertical film tension at the separation point.

    Sum of payload weight, reservoir envelope and gas weight, and seated film
    weight, minus the reservoir's buoyancy in the surrounding helium and the
    base pressure integral. Raises if the result is not positive (the base
    cannot be taut).
    """
    a_seated = 2.0 * math.pi * r_sp ** 2 * (1.0 - math.cos(beta))
    a_sp = 4.0 * math.pi * r_sp ** 2
    v_sp = 4.0 / 3.0 * math.pi * r_sp ** 3
    f = (g * (m_payload + m_sp_gas - rho_zp_gas * v_sp)
         + w_zp * a_seated + w_sp * a_sp
         - base_buoyancy(beta, z_p0, rho_diff, r_sp, g))
    if f <= 0.0:
        raise InfeasibleError(
            f"non-positive base tension ({f:.3f} N): load too light for a taut base")
    return f


@dataclass(frozen=True)
class ShapeLoads:
    """Loads hung on the envelope during a shape solve."""

    m_payload: float            # kg, suspended below the bottom fitting
    m_sp_gas: float             # kg, reservoir gas
    rho_zp_gas: float           # kg/m^3, helium density in the outer chamber
    g: float = GRAVITY_EARTH


@dataclass(frozen=True)
class ShapeSolution:
    """Converged (or approximated) equilibrium shape.

    Curves are the composite meridian (seated + free + apex) sampled against
    material arclength; q/sigma_m cover only the free mid section. z_p0 is
    the pressure-equality height above the aerobot bottom.
    """

    beta: float
    z_p0: float
    s_0: float
    s_l: float
    v_gas: float                # helium volume between reservoir and film
    v_enclosed: float           # total displaced volume (gas + reservoir)
    a_top: float
    a_side: float
    f_tension_s0: float
    r_max: float
    height: float
    node_areas: tuple           # (A1 contact, A2 reservoir free, A3 side, A4 top)
    s_grid: np.ndarray
    theta: np.ndarray
    r: np.ndarray
    z: np.ndarray
    s_mid: np.ndarray
    q_mid: np.ndarray
    flag: str = "exact"         # exact | taut | approx | degenerate
    residual_theta: float = 0.0
    residual_r: float = 0.0
    residual_volume: float = 0.0

    @property
    def sigma_m(self) -> np.ndarray:
        """Meridional stress resultant over the mid section, N/m."""
        r_mid = np.interp(self.s_mid, self.s_grid, self.r)
        return 1.0 / (self.q_mid * r_mid)


@dataclass
class _Shot:
    theta: float
    q: float
    r: float
    z: float
    v: float                    # volume of revolution accumulated over the arc
    a: float                    # film area accumulated
    a_side: float               # signed profile projection accumulated
    path: list | None


class ShapeSolver:
    """Shooting solver for one envelope and loading. Pure and reentrant."""

    def __init__(self, spec: EnvelopeSpec, loads: ShapeLoads, ds: float | None = None):
        self.spec = spec
        self.loads = loads
        geo = spec.geometry
        self.ds = ds if ds is not None else _DS_DEFAULT * geo.r_upper / 2.5
        self._phi_j = math.pi / 2 - geo.cone_half_angle_rad

    # -- elementary pieces ---------------------------------------------------

    def _tension(self, beta: float, h0: float, rho_diff: float) -> float:
        L = self.loads
        return initial_tension(beta, h0, r_sp=self.spec.r_sp, w_zp=self.spec.w_zp,
                               w_sp=self.spec.w_sp, m_payload=L.m_payload,
                               m_sp_gas=L.m_sp_gas, rho_zp_gas=L.rho_zp_gas,
                               rho_diff=rho_diff, g=L.g)

    def _shoot(self, beta: float, h0: float, s_l: float, rho_diff: float,
               keep_path: bool = False) -> _Shot:
        """Integrate the free film from separation to the attachment arclength."""
        r_sp = self.spec.r_sp
        w = self.spec.w_zp
        b = self.loads.g * rho_diff
        ft = self._tension(beta, h0, rho_diff)
        s0 = r_sp * beta
        th = math.pi / 2 - beta
        q = 2.0 * math.pi * math.sin(beta) / ft
        r = r_sp * math.sin(beta)
        z = r_sp * (1.0 - math.cos(beta))
        v = a = a_sd = 0.0
        n = max(8, int(math.ceil((s_l - s0) / self.ds)))
        h = (s_l - s0) / n
        path = [(s0, th, q, r, z)] if keep_path else None
        sin, cos, pi = math.sin, math.cos, math.pi
        for i in range(n):
            # RK4 on (theta, q, r, z, v, a, a_side), stages unrolled
            th1, q1, r1, z1 = th, q, r, z
            s_t, c_t = sin(th1), cos(th1)
            k1 = (-q1 * r1 * (w * s_t + b * (z1 - h0)), -q1 * q1 * w * r1 * c_t,
                  s_t, c_t, pi * r1 * r1 * c_t, 2 * pi * r1, 2 * r1 * c_t)
            th2, q2, r2, z2 = th + 0.5 * h * k1[0], q + 0.5 * h * k1[1], \
                r + 0.5 * h * k1[2], z + 0.5 * h * k1[3]
            if r2 <= 0 or q2 <= 0:
                raise SolverError("singular free-film state")
            s_t, c_t = sin(th2), cos(th2)
            k2 = (-q2 * r2 * (w * s_t + b * (z2 - h0)), -q2 * q2 * w * r2 * c_t,
                  s_t, c_t, pi * r2 * r2 * c_t, 2 * pi * r2, 2 * r2 * c_t)
            th3, q3, r3, z3 = th + 0.5 * h * k2[0], q + 0.5 * h * k2[1], \
                r + 0.5 * h * k2[2], z + 0.5 * h * k2[3]
            if r3 <= 0 or q3 <= 0:
                raise SolverError("singular free-film state")
            s_t, c_t = sin(th3), cos(th3)
            k3 = (-q3 * r3 * (w * s_t + b * (z3 - h0)), -q3 * q3 * w * r3 * c_t,
                  s_t, c_t, pi * r3 * r3 * c_t, 2 * pi * r3, 2 * r3 * c_t)
            th4, q4, r4, z4 = th + h * k3[0], q + h * k3[1], r + h * k3[2], z + h * k3[3]
            if r4 <= 0 or q4 <= 0:
                raise SolverError("singular free-film state")
            s_t, c_t = sin(th4), cos(th4)
            k4 = (-q4 * r4 * (w * s_t + b * (z4 - h0)), -q4 * q4 * w * r4 * c_t,
                  s_t, c_t, pi * r4 * r4 * c_t, 2 * pi * r4, 2 * r4 * c_t)
            th += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            q += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            r += h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
            z += h / 6 * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3])
            v += h / 6 * (k1[4] + 2 * k2[4] + 2 * k3[4] + k4[4])
            a += h / 6 * (k1[5] + 2 * k2[5] + 2 * k3[5] + k4[5])
            a_sd += h / 6 * (k1[6] + 2 * k2[6] + 2 * k3[6] + k4[6])
            if r <= 0.0 or q <= 0.0:
                raise SolverError(f"free film hit the axis at s={s0 + (i + 1) * h:.3f}")
            if keep_path:
                path.append((s0 + (i + 1) * h, th, q, r, z))
        return _Shot(th, q, r, z, v, a, a_sd, path)

    # -- two-point matching at fixed attachment ------------------------------

    def _match(self, s_l: float, guess: tuple, rho_diff: float):
        """Solve (beta, z_p0) so theta and r meet the fabricated curve at s_l."""
        geo = self.spec.geometry
        th_i, r_i, _ = geo.at(s_l)
        r_up = geo.r_upper
        beta_lo = self._phi_j * 0.98

        def fun(x):
            beta, h0 = x
            if not (beta_lo < beta < 3.12) or self.spec.r_sp * beta >= s_l - 1e-9:
                return [10.0 + abs(beta), 10.0]
            try:
                y = self._shoot(beta, h0, s_l, rho_diff)
            except (SolverError, InfeasibleError):
                return [5.0, 5.0]
            return [y.theta - th_i, (y.r - r_i) / r_up]

        sol = root(fun, list(guess), method="hybr", tol=1e-13)
        # judge by residual, not the status flag: a warm start that is already
        # at the root can make hybr report "not making progress"
        if max(abs(sol.fun[0]), abs(sol.fun[1])) < 1e-9:
            return True, tuple(sol.x)
        for fb, fh in ((1.02, 1.0), (0.98, 1.0), (1.0, 0.95)):
            sol = root(fun, [guess[0] * fb, guess[1] * fh], method="hybr", tol=1e-13)
            if max(abs(sol.fun[0]), abs(sol.fun[1])) < 1e-9:
                return True, tuple(sol.x)
        return False, tuple(sol.x)

    def _gas_volume(self, beta: float, h0: float, s_l: float, rho_diff: float) -> float:
        y = self._shoot(beta, h0, s_l, rho_diff)
        return self._gas_volume_from_shot(beta, s_l, y)

    def _gas_volume_from_shot(self, beta: float, s_l: float, y: _Shot) -> float:
        geo = self.spec.geometry
        v_seated = _sphere_cap_volume(self.spec.r_sp, beta)
        v_apex = geo.volume - geo.volume_below(s_l)
        return v_seated + y.v + v_apex - self.spec.v_sp

    # -- family walking -------------------------------------------------------

    def family(self, rho_diff: float, n_points: int = 80) -> list:
        """Walk the solution family over attachment arclength.

        Returns [(fill, beta, z_p0, s_l)] sorted by fill, covering the branch
        from the fold (minimum feasible fill) up to near-full inflation.
        """
        geo = self.spec.geometry
        cap = self.spec.gas_capacity
        start = self._cold_start(rho_diff)
        if start is None:
            raise SolverError(f"no shape family found at rho_diff={rho_diff:.4g}")
        s_l0, guess0 = start
        pts = {}

        def walk(direction):
            s_l, guess = s_l0, guess0
            step = direction * geo.s_total / n_points
            last_fill = None
            while True:
                s_next = s_l + step
                if not (self.spec.r_sp * guess[0] + 4 * self.ds < s_next
                        < geo.s_total - 1e-6):
                    break
                ok, sol = self._match(s_next, guess, rho_diff)
                if not ok:
                    if abs(step) < geo.s_total / (40 * n_points):
                        break
                    step *= 0.5
                    continue
                s_l, guess = s_next, sol
                fill = self._gas_volume(sol[0], sol[1], s_l, rho_diff) / cap
                if direction > 0 and last_fill is not None and fill >= last_fill:
                    break               # past the fold: second branch, stop
                last_fill = fill
                pts[round(s_l, 9)] = (fill, sol[0], sol[1], s_l)
                step = direction * geo.s_total / n_points

        fill0 = self._gas_volume(guess0[0], guess0[1], s_l0, rho_diff) / cap
        pts[round(s_l0, 9)] = (fill0, guess0[0], guess0[1], s_l0)
        walk(+1)
        walk(-1)
        out = sorted(pts.values())
        if len(out) < 4:
            raise SolverError(f"shape family too short at rho_diff={rho_diff:.4g}")
        return out

    def _cold_start(self, rho_diff: float):
        """Coarse scan for one point on the family, then polish."""
        geo = self.spec.geometry
        sj = geo.s_junction_upper
        for s_l in (sj + 0.55 * (geo.s_total - sj), sj + 0.35 * (geo.s_total - sj),
                    sj + 0.75 * (geo.s_total - sj)):
            th_i, r_i, _ = geo.at(s_l)
            best = None
            for beta in np.linspace(self._phi_j + 0.05, 2.5, 22):
                if self.spec.r_sp * beta >= s_l - 4 * self.ds:
                    continue
                for hfrac in np.linspace(-0.6, 1.4, 21):
                    h0 = hfrac * geo.height
                    try:
                        y = self._shoot(beta, h0, s_l, rho_diff)
                    except (SolverError, InfeasibleError):
                        continue
                    miss = abs(y.theta - th_i) + abs(y.r - r_i) / geo.r_upper
                    if best is None or miss < best[0]:
                        best = (miss, beta, h0)
            if best is None:
                continue
            ok, sol = self._match(s_l, (best[1], best[2]), rho_diff)
            if ok:
                return s_l, sol
        return None

    # -- public solve ----------------------------------------------------------

    def solve_volume(self, rho_diff: float, v_gas: float,
                     family: list | None = None) -> ShapeSolution:
        """Shape whose enclosed helium volume matches v_gas.

        Exact in the feasible family; below the family fold a flagged
        geometric approximation is returned (``approx``, or ``degenerate``
        under 2% fill). Above the highest solvable fill (film essentially
        taut) the fabricated geometry is returned flagged ``taut``.
        """
        if rho_diff <= 0:
            raise InfeasibleError("rho_diff must be positive")
        cap = self.spec.gas_capacity
        fill = v_gas / cap
        if not (0.0 < fill <= 1.0 + 1e-9):
            raise InfeasibleError(
                f"target gas volume {v_gas:.3f} m^3 outside (0, {cap:.3f}] m^3")
        fam = family if family is not None else self.family(rho_diff)
        fills = [p[0] for p in fam]
        if fill <= fills[0]:
            return self._subfold_solution(rho_diff, v_gas, fam)
        if fill >= fills[-1]:
            return self._taut_solution(rho_diff, v_gas, fam)
        i = next(k for k in range(len(fam) - 1) if fills[k + 1] >= fill)
        return self._refine(rho_diff, v_gas, fam[i], fam[i + 1])

    def _refine(self, rho_diff, v_gas, lo, hi) -> ShapeSolution:
        """Secant in s_l between two bracketing family points, then assemble."""
        cap = self.spec.gas_capacity
        target = v_gas / cap
        f0, s0 = lo[0] - target, lo[3]
        f1, s1 = hi[0] - target, hi[3]
        guess = (lo[1], lo[2]) if abs(f0) < abs(f1) else (hi[1], hi[2])
        s_l, beta, h0 = None, *guess
        for _ in range(60):
            s_l = s1 - f1 * (s1 - s0) / (f1 - f0)
            if not min(s0, s1) <= s_l <= max(s0, s1):
                s_l = 0.5 * (s0 + s1)
            ok, (beta, h0) = self._match(s_l, guess, rho_diff)
            if not ok:
                raise SolverError(f"matching failed during refine at s_l={s_l:.4f}")
            guess = (beta, h0)
            f = self._gas_volume(beta, h0, s_l, rho_diff) / cap - target
            if abs(f) < 1e-7:
                break
            if (f < 0) == (f0 < 0):
                f0, s0 = f, s_l
            else:
                f1, s1 = f, s_l
        else:
            raise SolverError("volume refinement did not converge",
                              residuals={"volume_rel": f})
        return self._assemble(beta, h0, s_l, rho_diff, v_gas, "exact")

    def _assemble(self, beta, h0, s_l, rho_diff, v_gas, flag) -> ShapeSolution:
        geo = self.spec.geometry
        r_sp = self.spec.r_sp
        y = self._shoot(beta, h0, s_l, rho_diff, keep_path=True)
        th_i, r_i, z_i = geo.at(s_l)
        v_gas_actual = self._gas_volume_from_shot(beta, s_l, y)

        # composite curve: seated cap, free section, translated apex section;
        # sampled at the integrator resolution so volume/area oracles of the
        # returned curve resolve to ~1e-5 relative
        s0 = r_sp * beta
        n_seat = max(8, int(s0 / self.ds))
        s_seat = np.linspace(0.0, s0, n_seat, endpoint=False)
        seat = [(math.pi / 2 - s / r_sp, r_sp * math.sin(s / r_sp),
                 r_sp * (1 - math.cos(s / r_sp))) for s in s_seat]
        mid = np.array(y.path)
        z_off = y.z - z_i
        s_apex = np.linspace(s_l, geo.s_total, max(8, int((geo.s_total - s_l)
                                                          / self.ds)) + 1)
        apex = [geo.at(s) for s in s_apex[1:]]
        s_grid = np.concatenate([s_seat, mid[:, 0], s_apex[1:]])
        theta = np.concatenate([[p[0] for p in seat], mid[:, 1],
                                [p[0] for p in apex]])
        r_arr = np.concatenate([[p[1] for p in seat], mid[:, 3],
                                [p[1] for p in apex]])
        z_arr = np.concatenate([[p[2] for p in seat], mid[:, 4],
                                [p[2] + z_off for p in apex]])

        # projections and node areas
        a_side = (r_sp ** 2 * (beta - math.sin(beta) * math.cos(beta))
                  + y.a_side + geo.side_area_between(s_l, geo.s_total))
        r_max = float(np.max(r_arr))
        a_top = math.pi * r_max ** 2
        a1 = 2 * math.pi * r_sp ** 2 * (1 - math.cos(beta))
        a2 = 4 * math.pi * r_sp ** 2 - a1
        a_free = y.a + geo.area_between(s_l, geo.s_total)
        a4 = self._area_above_45(y, s_l, mid)
        a3 = max(a_free - a4, 0.0)
        ft = self._tension(beta, h0, rho_diff)
        return ShapeSolution(
            beta=beta, z_p0=h0, s_0=s0, s_l=s_l, v_gas=v_gas_actual,
            v_enclosed=v_gas_actual + self.spec.v_sp, a_top=a_top, a_side=a_side,
            f_tension_s0=ft, r_max=r_max, height=float(np.max(z_arr)),
            node_areas=(a1, a2, a3, a4), s_grid=s_grid, theta=theta, r=r_arr,
            z=z_arr, s_mid=mid[:, 0], q_mid=mid[:, 2], flag=flag,
            residual_theta=abs(y.theta - th_i), residual_r=abs(y.r - r_i),
            residual_volume=abs(v_gas_actual - v_gas) / max(v_gas, 1e-12))

    def _area_above_45(self, y: _Shot, s_l: float, mid: np.ndarray) -> float:
        """Free film area above the point where theta crosses -45 degrees."""
        geo = self.spec.geometry
        thr = -math.pi / 4
        th = mid[:, 1]
        crossings = np.nonzero((th[:-1] > thr) & (th[1:] <= thr))[0]
        if len(crossings) == 0:
            # crossing is inside the apex section (fabricated upper sphere)
            phi45 = 3 * math.pi / 4
            s45 = geo.s_junction_upper + (phi45 - self._phi_j) * geo.r_upper
            s45 = max(s45, s_l)
            return geo.area_between(s45, geo.s_total)
        i = int(crossings[-1])
        f = (thr - th[i]) / (th[i + 1] - th[i])
        s45 = mid[i, 0] + f * (mid[i + 1, 0] - mid[i, 0])
        # mid-film area above s45 by trapezoid on the stored path
        s, r = mid[:, 0], mid[:, 3]
        mask = s >= s45
        s_sub = np.concatenate([[s45], s[mask]])
        r45 = np.interp(s45, s, r)
        r_sub = np.concatenate([[r45], r[mask]])
        a_mid_above = float(np.trapezoid(2 * math.pi * r_sub, s_sub))
        return a_mid_above + geo.area_between(s_l, geo.s_total)

    # -- out-of-family stand-ins ------------------------------------------------

    def _taut_solution(self, rho_diff, v_gas, fam) -> ShapeSolution:
        """Essentially fully inflated: fabricated geometry, extrapolated z_p0."""
        geo = self.spec.geometry
        (f1, b1, h1, s1), (f2, b2, h2, s2) = fam[-2], fam[-1]
        fill = v_gas / self.spec.gas_capacity
        t = (fill - f2) / (f2 - f1) if f2 > f1 else 0.0
        h0 = h2 + t * (h2 - h1)
        beta = max(self._phi_j, b2 + t * (b2 - b1))
        sol = self._assemble(b2, h2, s2, rho_diff, v_gas, "taut")
        return replace(sol, beta=beta, z_p0=h0, v_gas=v_gas,
                       v_enclosed=v_gas + self.spec.v_sp,
                       residual_volume=0.0)

    def _subfold_solution(self, rho_diff, v_gas, fam) -> ShapeSolution:
        """Below the family fold: blend the fold shape with a bubble-cap model.

        No axisymmetric zero-hoop equilibrium exists here (the film drapes);
        projections are interpolated smoothly between the fold solution and an
        apex spherical-cap bubble so the engine sees continuous geometry.
        """
        cap = self.spec.gas_capacity
        geo = self.spec.geometry
        fold = fam[0]
        fold_sol = self._assemble(fold[1], fold[2], fold[3], rho_diff,
                                  fold[0] * cap, "exact")
        fill = v_gas / cap
        x = min(fill / fold[0], 1.0)
        # apex-cap bubble holding v_gas on the fabricated upper sphere
        r2 = geo.r_upper
        h_cap = _cap_height_for_volume(r2, min(v_gas, 2 * math.pi / 3 * r2 ** 3))
        r_rim = math.sqrt(max(h_cap * (2 * r2 - h_cap), 0.0))
        cap_a_top = math.pi * r_rim ** 2
        cap_height = 2 * self.spec.r_sp + h_cap
        cap_a_side = (math.pi * self.spec.r_sp ** 2
                      + 2 * r_rim * h_cap)
        a_top = x * fold_sol.a_top + (1 - x) * cap_a_top
        a_side = x * fold_sol.a_side + (1 - x) * cap_a_side
        height = x * fold_sol.height + (1 - x) * cap_height
        beta = fold_sol.beta + (1 - x) * (2.9 - fold_sol.beta)
        z_p0 = x * fold_sol.z_p0 + (1 - x) * (height - h_cap)
        a1 = 2 * math.pi * self.spec.r_sp ** 2 * (1 - math.cos(beta))
        a2 = 4 * math.pi * self.spec.r_sp ** 2 - a1
        a_free = geo.area - a1
        a4 = min(fold_sol.node_areas[3], a_free)
        a3 = max(a_free - a4, 0.0)
        flag = "degenerate" if fill < DEGENERATE_FILL else "approx"
        ft = self._tension(min(beta, math.pi), min(z_p0, fold_sol.z_p0), rho_diff)
        return replace(fold_sol, beta=beta, z_p0=z_p0, v_gas=v_gas,
                       v_enclosed=v_gas + self.spec.v_sp, a_top=a_top,
                       a_side=a_side, height=height, r_max=math.sqrt(a_top / math.pi),
                       node_areas=(a1, a2, a3, a4), f_tension_s0=ft, flag=flag,
                       residual_theta=float("nan"), residual_r=float("nan"),
                       residual_volume=0.0)

    # -- independent checks -------------------------------------------------------

    def force_balance_residual(self, sol: ShapeSolution, rho_diff: float) -> float:
        """Relative mismatch of the net residual force computed two ways.

        Route (a) takes the taut apex cap as a free body: transmural pressure
        integrated over the fabricated cap, minus cap weight, minus the pull of
        the free film at the attachment. Route (b) is global bookkeeping:
        gauge-pressure buoyancy of the whole enclosed volume minus every
        supported weight. Both equal the unbalanced (free-lift) force the
        shape model transmits, and agree only if the ODE solution, the start
        conditions, and the base-buoyancy closed form are mutually consistent.
        Returns |a - b| / (b * V_enclosed lift scale).
        """
        if sol.flag not in ("exact", "taut"):
            raise ValidationError("force balance check needs a converged solution")
        geo = self.spec.geometry
        L = self.loads
        b = L.g * rho_diff
        h0 = sol.z_p0
        y = self._shoot(sol.beta, h0, sol.s_l, rho_diff)

        # (a) apex cap free body
        n = 4001
        ss = np.linspace(sol.s_l, geo.s_total, n)
        z_off = y.z - geo.at(sol.s_l)[2]
        integ = np.empty(n)
        for k, s in enumerate(ss):
            th, r, z = geo.at(s)
            integ[k] = b * ((z + z_off) - h0) * (-math.sin(th)) * 2 * math.pi * r
        press_z = float(np.trapezoid(integ, ss))
        a_apex = geo.area_between(sol.s_l, geo.s_total)
        pull_down = 2 * math.pi * (1.0 / y.q) * math.cos(y.theta)
        t_apex = press_z - self.spec.w_zp * a_apex - pull_down

        # (b) global bookkeeping
        a_seated = 2 * math.pi * self.spec.r_sp ** 2 * (1 - math.cos(sol.beta))
        w_film = self.spec.w_zp * (a_seated + y.a + a_apex)
        v_enc = self._gas_volume_from_shot(sol.beta, sol.s_l, y) + self.spec.v_sp
        t_global = (b * v_enc - w_film - L.g * L.m_payload
                    - self.spec.w_sp * self.spec.a_sp - L.g * L.m_sp_gas
                    + L.g * L.rho_zp_gas * self.spec.v_sp)
        return abs(t_apex - t_global) / (b * v_enc)


def solve_shape(spec: EnvelopeSpec, rho_diff: float, *, m_payload: float,
                m_sp_gas: float, rho_zp_gas: float, g: float = GRAVITY_EARTH,
                v_target: float | None = None, m_zp_gas: float | None = None,
                t_zp: float | None = None, rho_atm: float | None = None,
                ds: float | None = None) -> ShapeSolution:
    """One-call equilibrium shape solve.

    The gas volume target is either v_target directly, or derived from a gas
    mass and temperature together with the ambient density (the chamber gas
    density is then rho_atm - rho_diff).
    """
    if v_target is None:
        if m_zp_gas is None or rho_atm is None:
            raise ValidationError("need v_target, or m_zp_gas with rho_atm")
        rho_gas = rho_atm - rho_diff
        if rho_gas <= 0:
            raise InfeasibleError("rho_atm - rho_diff must be positive")
        v_target = m_zp_gas / rho_gas
    loads = ShapeLoads(m_payload=m_payload, m_sp_gas=m_sp_gas,
                       rho_zp_gas=rho_zp_gas, g=g)
    return ShapeSolver(spec, loads, ds=ds).solve_volume(rho_diff, v_target)


def _sphere_cap_volume(R: float, phi: float) -> float:
    c = math.cos(phi)
    return math.pi * R ** 3 * (2.0 / 3.0 - c + c ** 3 / 3.0)


def _cap_height_for_volume(R: float, v: float) -> float:
    """Height of a spherical cap of radius R holding volume v (bisection)."""
    lo, hi = 0.0, 2.0 * R
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if math.pi * mid * mid * (3 * R - mid) / 3.0 < v:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
