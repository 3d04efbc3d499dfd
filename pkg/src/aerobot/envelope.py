"""As-fabricated outer-envelope geometry.

The outer envelope is a body of revolution described by its meridian curve,
parameterized by material arclength s from the bottom apex: tangent angle
theta (from vertical, so dr/ds = sin(theta), dz/ds = cos(theta)), radius r
from the axis, and height z. The stock construction is a sphere-cone-sphere:
a small lower sphere wrapping the internal reservoir, a tangent cone, and a
large upper sphere.

The equilibrium-shape solver needs theta/r at arbitrary s to machine
precision, so the stock geometry is evaluated piecewise analytically; curves
ingested from sampled data use monotone arclength interpolation instead.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

from .errors import ValidationError


def _sphere_zone_volume(R: float, phi0: float, phi1: float) -> float:
    # volume of revolution of a sphere meridian between polar angles
    f = lambda p: -math.cos(p) + math.cos(p) ** 3 / 3.0
    return math.pi * R ** 3 * (f(phi1) - f(phi0))


@dataclass(frozen=True)
class InflatedGeometry:
    """Analytic sphere-cone-sphere meridian.

    upper/lower diameters are the sphere diameters; cone_half_angle is the
    cone surface angle from the vertical axis. The cone is tangent to both
    spheres, which fixes the junction arclengths.
    """

    upper_diameter_m: float
    lower_diameter_m: float
    cone_half_angle_rad: float

    # derived, filled in __post_init__
    r_lower: float = field(init=False)
    r_upper: float = field(init=False)
    s_junction_lower: float = field(init=False)
    s_junction_upper: float = field(init=False)
    s_total: float = field(init=False)
    z_upper_center: float = field(init=False)
    height: float = field(init=False)
    volume: float = field(init=False)
    area: float = field(init=False)

    def __post_init__(self):
        if not (0 < self.lower_diameter_m < self.upper_diameter_m):
            raise ValidationError("need 0 < lower diameter < upper diameter")
        if not (0 < self.cone_half_angle_rad < math.pi / 2):
            raise ValidationError("cone half-angle must be in (0, pi/2)")
        r1 = self.lower_diameter_m / 2.0
        r2 = self.upper_diameter_m / 2.0
        d = self.cone_half_angle_rad
        phi_j = math.pi / 2 - d                     # junction polar angle
        s_a = r1 * phi_j
        cone_len = (r2 - r1) * math.cos(d) / math.sin(d)
        s_b = s_a + cone_len
        s_c = s_b + r2 * (math.pi - phi_j)
        z_a = r1 * (1 - math.sin(d))
        z_b = z_a + cone_len * math.cos(d)
        z2c = z_b + r2 * math.sin(d)
        ra, rb = r1 * math.cos(d), r2 * math.cos(d)
        vol = (_sphere_zone_volume(r1, 0.0, phi_j)
               + math.pi / 3.0 * (z_b - z_a) * (ra * ra + ra * rb + rb * rb)
               + _sphere_zone_volume(r2, phi_j, math.pi))
        area = (2 * math.pi * r1 * r1 * (1 - math.cos(phi_j))
                + math.pi * (ra + rb) * cone_len
                + 2 * math.pi * r2 * r2 * (1 + math.cos(phi_j)))
        for name, val in [("r_lower", r1), ("r_upper", r2),
                          ("s_junction_lower", s_a), ("s_junction_upper", s_b),
                          ("s_total", s_c), ("z_upper_center", z2c),
                          ("height", z2c + r2), ("volume", vol), ("area", area)]:
            object.__setattr__(self, name, val)

    def at(self, s: float) -> tuple:
        """(theta, r, z) at material arclength s from the bottom apex."""
        if s < -1e-12 or s > self.s_total + 1e-12:
            raise ValidationError(f"arclength {s:.4f} outside [0, {self.s_total:.4f}]")
        d = self.cone_half_angle_rad
        if s <= self.s_junction_lower:
            phi = s / self.r_lower
            return (math.pi / 2 - phi, self.r_lower * math.sin(phi),
                    self.r_lower * (1 - math.cos(phi)))
        if s <= self.s_junction_upper:
            ds = s - self.s_junction_lower
            return (d, self.r_lower * math.cos(d) + ds * math.sin(d),
                    self.r_lower * (1 - math.sin(d)) + ds * math.cos(d))
        phi = (math.pi / 2 - d) + (s - self.s_junction_upper) / self.r_upper
        phi = min(phi, math.pi)
        return (math.pi / 2 - phi, self.r_upper * math.sin(phi),
                self.z_upper_center - self.r_upper * math.cos(phi))

    def volume_below(self, s: float) -> float:
        """Volume of revolution of the meridian from the bottom apex to s."""
        d = self.cone_half_angle_rad
        phi_j = math.pi / 2 - d
        if s <= self.s_junction_lower:
            return _sphere_zone_volume(self.r_lower, 0.0, s / self.r_lower)
        va = _sphere_zone_volume(self.r_lower, 0.0, phi_j)
        ra = self.r_lower * math.cos(d)
        if s <= self.s_junction_upper:
            ds = s - self.s_junction_lower
            r = ra + ds * math.sin(d)
            return va + math.pi / 3.0 * (ds * math.cos(d)) * (ra * ra + ra * r + r * r)
        rb = self.r_upper * math.cos(d)
        cone_len = self.s_junction_upper - self.s_junction_lower
        vb = va + math.pi / 3.0 * (cone_len * math.cos(d)) * (ra * ra + ra * rb + rb * rb)
        phi = phi_j + (s - self.s_junction_upper) / self.r_upper
        return vb + _sphere_zone_volume(self.r_upper, phi_j, min(phi, math.pi))

    def area_between(self, s0: float, s1: float) -> float:
        """Film area between two arclengths (2 pi r ds, piecewise exact)."""
        return self._area_below(s1) - self._area_below(s0)

    def _area_below(self, s: float) -> float:
        d = self.cone_half_angle_rad
        phi_j = math.pi / 2 - d
        if s <= self.s_junction_lower:
            return 2 * math.pi * self.r_lower ** 2 * (1 - math.cos(s / self.r_lower))
        aa = 2 * math.pi * self.r_lower ** 2 * (1 - math.cos(phi_j))
        ra = self.r_lower * math.cos(d)
        if s <= self.s_junction_upper:
            ds = s - self.s_junction_lower
            return aa + math.pi * (2 * ra + ds * math.sin(d)) * ds
        cone_len = self.s_junction_upper - self.s_junction_lower
        ab = aa + math.pi * (2 * ra + cone_len * math.sin(d)) * cone_len
        phi = min(phi_j + (s - self.s_junction_upper) / self.r_upper, math.pi)
        return ab + 2 * math.pi * self.r_upper ** 2 * (math.cos(phi_j) - math.cos(phi))

    def side_area_between(self, s0: float, s1: float, z_offset: float = 0.0) -> float:
        """Signed profile projection integral(2 r dz) between arclengths."""
        # numerically via fine Simpson; used only in area bookkeeping
        n = max(8, int((s1 - s0) / 0.01) | 1)
        h = (s1 - s0) / n
        total = 0.0
        for k in range(n + 1):
            th, r, _ = self.at(s0 + k * h)
            wgt = 1 if k in (0, n) else (4 if k % 2 else 2)
            total += wgt * 2.0 * r * math.cos(th)
        return total * h / 3.0

    def sampled(self, n: int = 512) -> "SampledCurve":
        ss = [self.s_total * k / (n - 1) for k in range(n)]
        pts = [self.at(s) for s in ss]
        return SampledCurve(tuple(ss), tuple(p[0] for p in pts),
                            tuple(p[1] for p in pts), tuple(p[2] for p in pts))


@dataclass(frozen=True)
class SampledCurve:
    """Meridian curve given as samples of (s, theta, r, z), linearly interpolated."""

    s: tuple
    theta: tuple
    r: tuple
    z: tuple

    def __post_init__(self):
        if len(self.s) < 4:
            raise ValidationError("sampled curve needs at least 4 points")
        if any(b <= a for a, b in zip(self.s, self.s[1:])):
            raise ValidationError("arclength strictly increasing")
        if abs(self.r[0]) > 1e-9 or abs(self.r[-1]) > 1e-9:
            raise ValidationError("curve must start and end on the axis (closed apexes)")

    @property
    def s_total(self) -> float:
        return self.s[-1]

    def at(self, s: float) -> tuple:
        ss = self.s
        if s <= ss[0]:
            return (self.theta[0], self.r[0], self.z[0])
        if s >= ss[-1]:
            return (self.theta[-1], self.r[-1], self.z[-1])
        i = bisect.bisect_right(ss, s) - 1
        f = (s - ss[i]) / (ss[i + 1] - ss[i])
        return (self.theta[i] + f * (self.theta[i + 1] - self.theta[i]),
                self.r[i] + f * (self.r[i + 1] - self.r[i]),
                self.z[i] + f * (self.z[i + 1] - self.z[i]))


@dataclass(frozen=True)
class EnvelopeSpec:
    """Outer envelope, internal reservoir sphere, and film weights.

    w_zp / w_sp are areal film weights in N/m^2. The reservoir radius must not
    exceed the envelope's lower-sphere radius (the stock design makes them
    equal so the film seats flush).
    """

    geometry: InflatedGeometry
    r_sp: float                    # internal reservoir sphere radius, m
    w_zp: float                    # outer film areal weight, N/m^2
    w_sp: float                    # reservoir envelope areal weight, N/m^2

    def __post_init__(self):
        if self.w_zp <= 0 or self.w_sp <= 0:
            raise ValidationError("areal weights must be positive")
        if not (0 < self.r_sp <= self.geometry.r_lower + 1e-9):
            raise ValidationError("reservoir radius must not exceed the lower sphere")

    @property
    def v_sp(self) -> float:
        return 4.0 / 3.0 * math.pi * self.r_sp ** 3

    @property
    def a_sp(self) -> float:
        return 4.0 * math.pi * self.r_sp ** 2

    @property
    def gas_capacity(self) -> float:
        """Helium capacity of the fully inflated envelope (total minus reservoir)."""
        return self.geometry.volume - self.v_sp


def nevada_envelope() -> EnvelopeSpec:
    """The 5 m / 2.5 m sphere-cone-sphere prototype with a 2.5 m reservoir."""
    geo = InflatedGeometry(5.0, 2.5, math.pi / 3)
    # film weights: outer bilaminate and reservoir fabric masses spread over
    # their material areas (13.3 kg / 8.0 kg of the 21.3 kg balloon system)
    return EnvelopeSpec(geometry=geo, r_sp=1.25,
                        w_zp=13.3 * 9.81 / geo.area,
                        w_sp=8.0 * 9.81 / (4 * math.pi * 1.25 ** 2))
