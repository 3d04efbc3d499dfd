"""Precomputed shape lookup tables.

Equilibrium shape solves are far too slow for the inner simulation loop, so
shapes are generated ahead of time on a (rho_diff, fill fraction) grid and
interpolated bilinearly (rho_diff on a log axis, fill linear). Each cell
stores the engine-facing summary of one solve; cells below the family fold
carry the flagged geometric approximation and cells that fail outright are
marked infeasible.

The canonical on-disk artifact is shapetable.csv with columns
rho_diff,fill_frac,volume_m3,a_top_m2,a_side_m2,beta_rad,z_p0_m,tension_n,flag.
Engine-internal extras (node areas, height) are persisted alongside in a
sidecar ``<name>.ext.csv``; a table loaded from the canonical file alone
reconstructs them from beta and the envelope geometry.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .envelope import EnvelopeSpec
from .errors import ParseError, SolverError, ValidationError
from .shape import ShapeLoads, ShapeSolution, ShapeSolver

TABLE_HEADER = ("rho_diff,fill_frac,volume_m3,a_top_m2,a_side_m2,"
                "beta_rad,z_p0_m,tension_n,flag")
EXT_HEADER = "rho_diff,fill_frac,a1_m2,a2_m2,a3_m2,a4_m2,height_m"

_FIELDS = ("volume", "a_top", "a_side", "beta", "z_p0", "tension",
           "a1", "a2", "a3", "a4", "height")


@dataclass(frozen=True)
class ShapeCell:
    volume: float
    a_top: float
    a_side: float
    beta: float
    z_p0: float
    tension: float
    a1: float
    a2: float
    a3: float
    a4: float
    height: float
    flag: str


@dataclass(frozen=True)
class ShapeLookup:
    """Interpolated shape summary at one (rho_diff, fill) query point."""

    volume: float
    a_top: float
    a_side: float
    beta: float
    z_p0: float
    tension: float
    a1: float
    a2: float
    a3: float
    a4: float
    height: float
    approximate: bool


class ShapeTable:
    """Immutable bilinear lookup over a solved (rho_diff, fill) grid."""

    def __init__(self, spec: EnvelopeSpec, rho_axis, fill_axis, cells):
        if len(rho_axis) < 4 or len(fill_axis) < 4:
            raise ValidationError("table grid needs at least 4 points per axis")
        if any(b <= a for a, b in zip(rho_axis, rho_axis[1:])):
            raise ValidationError("rho_diff axis strictly increasing")
        if any(b <= a for a, b in zip(fill_axis, fill_axis[1:])):
            raise ValidationError("fill axis strictly increasing")
        self.spec = spec
        self.rho_axis = tuple(float(r) for r in rho_axis)
        self.fill_axis = tuple(float(f) for f in fill_axis)
        self.cells = cells                      # cells[i][j], i over rho, j over fill
        self._log_rho = [math.log(r) for r in self.rho_axis]

    @property
    def infeasible_cells(self):
        return [(i, j) for i in range(len(self.rho_axis))
                for j in range(len(self.fill_axis))
                if self.cells[i][j].flag == "infeasible"]

    def lookup_raw(self, rho_diff: float, fill: float) -> tuple:
        """Bilinear interpolation, clamped at the grid edges.

        Returns (volume, a_top, a_side, beta, z_p0, tension, a1, a2, a3, a4,
        height, approximate) as a plain tuple for the integrator hot path.
        """
        lr = math.log(rho_diff) if rho_diff > 1e-9 else math.log(1e-9)
        la = self._log_rho
        i = min(max(bisect.bisect_right(la, lr) - 1, 0), len(la) - 2)
        u = (lr - la[i]) / (la[i + 1] - la[i])
        u = 0.0 if u < 0.0 else (1.0 if u > 1.0 else u)
        fa = self.fill_axis
        j = min(max(bisect.bisect_right(fa, fill) - 1, 0), len(fa) - 2)
        v = (fill - fa[j]) / (fa[j + 1] - fa[j])
        v = 0.0 if v < 0.0 else (1.0 if v > 1.0 else v)
        c00, c01 = self.cells[i][j], self.cells[i][j + 1]
        c10, c11 = self.cells[i + 1][j], self.cells[i + 1][j + 1]
        if (c00.flag == "infeasible" or c01.flag == "infeasible"
                or c10.flag == "infeasible" or c11.flag == "infeasible"):
            raise SolverError(
                f"shape table infeasible near rho_diff={rho_diff:.3g}, fill={fill:.3g}")
        w00 = (1 - u) * (1 - v)
        w01 = (1 - u) * v
        w10 = u * (1 - v)
        w11 = u * v
        out = []
        for f in _FIELDS:
            out.append(w00 * getattr(c00, f) + w01 * getattr(c01, f)
                       + w10 * getattr(c10, f) + w11 * getattr(c11, f))
        out.append(c00.flag != "exact" or c01.flag != "exact"
                   or c10.flag != "exact" or c11.flag != "exact")
        return tuple(out)

    def lookup(self, rho_diff: float, fill: float) -> ShapeLookup:
        raw = self.lookup_raw(rho_diff, fill)
        return ShapeLookup(*raw[:11], approximate=raw[11])

    # -- persistence -----------------------------------------------------------

    def to_csv(self) -> str:
        lines = [TABLE_HEADER]
        for i, rho in enumerate(self.rho_axis):
            for j, fill in enumerate(self.fill_axis):
                c = self.cells[i][j]
                lines.append(f"{rho!r},{fill!r},{c.volume!r},{c.a_top!r},"
                             f"{c.a_side!r},{c.beta!r},{c.z_p0!r},{c.tension!r},"
                             f"{c.flag}")
        return "\n".join(lines) + "\n"

    def ext_to_csv(self) -> str:
        lines = [EXT_HEADER]
        for i, rho in enumerate(self.rho_axis):
            for j, fill in enumerate(self.fill_axis):
                c = self.cells[i][j]
                lines.append(f"{rho!r},{fill!r},{c.a1!r},{c.a2!r},{c.a3!r},"
                             f"{c.a4!r},{c.height!r}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        path = Path(path)
        path.write_text(self.to_csv(), encoding="utf-8")
        path.with_suffix(".ext.csv").write_text(self.ext_to_csv(), encoding="utf-8")

    @classmethod
    def load(cls, path, spec: EnvelopeSpec) -> "ShapeTable":
        path = Path(path)
        ext_path = path.with_suffix(".ext.csv")
        ext_rows = {}
        if ext_path.exists():
            for ln in ext_path.read_text(encoding="utf-8").splitlines()[1:]:
                p = ln.split(",")
                if len(p) == 7:
                    ext_rows[(p[0], p[1])] = tuple(float(v) for v in p[2:])
        return cls.from_csv(path.read_text(encoding="utf-8"), spec, ext_rows)

    @classmethod
    def from_csv(cls, text: str, spec: EnvelopeSpec, ext_rows=None) -> "ShapeTable":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].replace(" ", "") != TABLE_HEADER:
            raise ParseError(f"expected header {TABLE_HEADER!r}")
        rows = {}
        for k, ln in enumerate(lines[1:], start=2):
            p = ln.split(",")
            if len(p) != 9:
                raise ParseError(f"row {k}: expected 9 columns")
            try:
                rho_s, fill_s = p[0], p[1]
                vals = [float(v) for v in p[2:8]]
            except ValueError:
                raise ParseError(f"row {k}: bad number") from None
            ext = (ext_rows or {}).get((rho_s, fill_s))
            if ext is None:
                ext = _reconstruct_ext(spec, vals[3])
            rows[(float(rho_s), float(fill_s))] = ShapeCell(
                *vals, *ext, flag=p[8])
        rho_axis = sorted({k[0] for k in rows})
        fill_axis = sorted({k[1] for k in rows})
        cells = [[rows.get((r, f)) for f in fill_axis] for r in rho_axis]
        if any(c is None for row in cells for c in row):
            raise ParseError("table rows do not form a complete grid")
        return cls(spec, rho_axis, fill_axis, cells)


def _reconstruct_ext(spec: EnvelopeSpec, beta: float):
    """Node areas and height from beta alone (canonical-file fallback).

    The free-film split uses the fabricated 45-degree-normal point, which is
    exact for the taut apex and approximate for the free section.
    """
    geo = spec.geometry
    a1 = 2 * math.pi * spec.r_sp ** 2 * (1 - math.cos(beta))
    a2 = 4 * math.pi * spec.r_sp ** 2 - a1
    a_free = geo.area - a1
    phi_j = math.pi / 2 - geo.cone_half_angle_rad
    s45 = geo.s_junction_upper + (3 * math.pi / 4 - phi_j) * geo.r_upper
    a4 = min(geo.area_between(s45, geo.s_total), a_free)
    a3 = max(a_free - a4, 0.0)
    return (a1, a2, a3, a4, geo.height)


def build_shape_table(spec: EnvelopeSpec, loads: ShapeLoads, rho_axis=None,
                      fill_axis=None, n_rho: int = 16, n_fill: int = 32,
                      rho_range: tuple = (0.2, 1.3),
                      max_infeasible_frac: float = 0.05) -> ShapeTable:
    """Solve the shape on a (rho_diff, fill) grid.

    rho_diff points are log-spaced over the mission envelope; fill points are
    linear from just above the degenerate band to near-full inflation. Each
    rho column walks the solution family once and every grid fill is then
    refined from its bracketing family points, so neighbouring cells warm
    start each other. Raises if more than max_infeasible_frac of cells fail.
    """
    if rho_axis is None:
        rho_axis = np.geomspace(rho_range[0], rho_range[1], n_rho).tolist()
    if fill_axis is None:
        fill_axis = np.linspace(0.03, 0.995, n_fill).tolist()
    if len(rho_axis) < 4 or len(fill_axis) < 4:
        raise ValidationError("table grid needs at least 4 points per axis")
    solver = ShapeSolver(spec, loads)
    cap = spec.gas_capacity
    cells = []
    failed = []
    for i, rho in enumerate(rho_axis):
        col = []
        try:
            fam = solver.family(rho)
        except SolverError:
            fam = None
        for j, fill in enumerate(fill_axis):
            if fam is None:
                col.append(ShapeCell(*([float("nan")] * 11), flag="infeasible"))
                failed.append((i, j))
                continue
            try:
                sol = solver.solve_volume(rho, fill * cap, family=fam)
                col.append(_cell_from_solution(sol))
            except Exception:
                col.append(ShapeCell(*([float("nan")] * 11), flag="infeasible"))
                failed.append((i, j))
        cells.append(col)
    n_total = len(rho_axis) * len(fill_axis)
    if len(failed) > max_infeasible_frac * n_total:
        raise SolverError(
            f"{len(failed)}/{n_total} infeasible cells: {failed[:20]}...")
    return ShapeTable(spec, rho_axis, fill_axis, cells)


def _cell_from_solution(sol: ShapeSolution) -> ShapeCell:
    return ShapeCell(volume=float(sol.v_gas), a_top=float(sol.a_top),
                     a_side=float(sol.a_side), beta=float(sol.beta),
                     z_p0=float(sol.z_p0), tension=float(sol.f_tension_s0),
                     a1=float(sol.node_areas[0]), a2=float(sol.node_areas[1]),
                     a3=float(sol.node_areas[2]), a4=float(sol.node_areas[3]),
                     height=float(sol.height), flag=sol.flag)
