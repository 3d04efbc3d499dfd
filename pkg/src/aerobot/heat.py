"""Heat flows: external radiation, internal IR exchange, and convection.

Six thermal nodes: four envelope nodes (1 bottom contact patch, 2 reservoir
free surface, 3 outer side, 4 outer top) and the two gas volumes. The nodes
form two radiative enclosures, the reservoir interior {1, 2, SP gas} and the
outer cavity {2, 3, 4, ZP gas}; node 2 participates in both through its two
faces. Exterior nodes additionally absorb welling solar/IR fluxes and emit to
the sky, and exchange with the atmosphere by forced convection against the
relative wind. Gas-to-envelope convection uses a natural-convection sphere
correlation.
"""
from __future__ import annotations

from dataclasses import dataclass

from .constants import (STEFAN_BOLTZMANN, TRANSPORT_AIR, TRANSPORT_CO2,
                        TRANSPORT_HELIUM, TransportProperties)
from .errors import ValidationError

SIGMA = STEFAN_BOLTZMANN
FORCED_RE_SPLIT = 5.38e5
MIN_RELATIVE_WIND = 0.1         # m/s floor; the forced branch has no conduction term

# node indexing used throughout: 0..3 envelope nodes 1..4, 4 = SP gas, 5 = ZP gas
N1, N2, N3, N4, NSP, NZP = range(6)
NODE_NAMES = ("n1", "n2", "n3", "n4", "sp_gas", "zp_gas")


@dataclass(frozen=True)
class SurfaceOptics:
    alpha_solar: float
    eps_ir: float

    def __post_init__(self):
        if not (0.0 <= self.alpha_solar <= 1.0 and 0.0 <= self.eps_ir <= 1.0):
            raise ValidationError("alpha and epsilon must lie in [0, 1]")


def nusselt_natural(ra: float) -> float:
    """Sphere natural-convection correlation, conduction-limited at Ra = 0."""
    if ra < 0:
        raise ValidationError("Rayleigh number must be >= 0")
    return 2.0 + 0.6 * ra ** 0.25


def nusselt_forced(re: float) -> float:
    """Piecewise forced-convection correlation with the published branch split."""
    if re < 0:
        raise ValidationError("Reynolds number must be >= 0")
    return (0.37 if re <= FORCED_RE_SPLIT else 0.74) * re ** 0.6


def rayleigh(t_surface: float, t_gas: float, length: float, rho: float,
             props: TransportProperties) -> float:
    """Rayleigh number with film-temperature transport properties."""
    t_film = 0.5 * (t_surface + t_gas)
    mu = props.viscosity(t_film)
    k = props.conductivity(t_film)
    g = 9.81
    return (g * abs(t_surface - t_gas) * length ** 3 * rho * rho * props.c_p
            / (t_film * mu * k))


def reynolds(speed: float, length: float, rho: float, t_film: float,
             props: TransportProperties) -> float:
    return rho * speed * length / props.viscosity(t_film)


def convective_flow(nu: float, k_gas: float, length: float, area: float,
                    t_from: float, t_to: float) -> float:
    """Signed convective heat flow (W) from t_from to t_to."""
    if length <= 0 or area <= 0:
        raise ValidationError("length and area must be positive")
    return nu * k_gas / length * area * (t_from - t_to)


def ir_exchange(t_i: float, t_j: float, eps_i: float, eps_j: float,
                a_i: float, a_j: float, f_ij: float) -> float:
    """Two-gray-surface IR exchange, signed from i to j.

    Antisymmetric under swapping the endpoints whenever the view factors obey
    reciprocity. A zero emissivity is an infinite surface resistance.
    """
    if a_i <= 0 or a_j <= 0:
        raise ValidationError("areas must be positive")
    if eps_i == 0.0 or eps_j == 0.0 or f_ij == 0.0:
        return 0.0
    resistance = ((1.0 - eps_i) / (eps_i * a_i) + 1.0 / (f_ij * a_i)
                  + (1.0 - eps_j) / (eps_j * a_j))
    return SIGMA * (t_i ** 4 - t_j ** 4) / resistance


def external_flux(alpha: float, eps: float, area: float, t_node: float,
                  e_solar: float, e_ir_in: float) -> tuple:
    """(solar absorbed, IR absorbed, IR emitted) for one exterior node."""
    if area <= 0:
        raise ValidationError("area must be positive")
    return (alpha * area * e_solar, eps * area * e_ir_in,
            eps * area * SIGMA * t_node ** 4)


def enclosure_view_factors(surface_areas: dict) -> dict:
    """Area-weighted view factors for one gas-filled enclosure.

    Every surface patch sees each other patch in proportion to area, and the
    participating gas is treated as a pseudo-surface of the total enclosure
    area, so each surface sends half its radiosity to the gas. Rows sum to
    at most one and reciprocity holds exactly.
    """
    total = sum(surface_areas.values())
    f = {}
    for i, a_i in surface_areas.items():
        for j, a_j in surface_areas.items():
            if i != j:
                f[(i, j)] = a_j / (2.0 * total)
        f[(i, "gas")] = 0.5
        f[("gas", i)] = a_i / (2.0 * total)
    return f


@dataclass(frozen=True)
class RadiationNetwork:
    """IR exchange pairs over the six nodes.

    Each pair is (i, j, eps_i, eps_j, A_i, A_j, f_ij, enclosure). Node 2 has a
    face in each enclosure, so the row-sum constraint applies per emitting
    face, not per node id.
    """

    pairs: tuple
    areas: tuple                # indexable by node id, gas nodes carry enclosure area

    def __post_init__(self):
        rowsum = {}
        for (i, j, ei, ej, ai, aj, fij, enc) in self.pairs:
            if not (0.0 <= fij <= 1.0):
                raise ValidationError("view factors must lie in [0, 1]")
            rowsum[(i, enc)] = rowsum.get((i, enc), 0.0) + fij
        if any(s > 1.0 + 1e-9 for s in rowsum.values()):
            raise ValidationError("view factor rows must sum to at most 1")

    def check_reciprocity(self, tol: float = 1e-6) -> None:
        seen = {}
        for (i, j, ei, ej, ai, aj, fij, enc) in self.pairs:
            seen[(i, j, enc)] = ai * fij
        for (i, j, enc), v in seen.items():
            w = seen.get((j, i, enc))
            if w is not None and abs(v - w) > tol * max(abs(v), abs(w), 1e-12):
                raise ValidationError(f"reciprocity violated for pair {i},{j}")


def build_radiation_network(node_areas: tuple, optics: tuple,
                            eps_sp_gas: float = 1.0,
                            eps_zp_gas: float = 1.0) -> RadiationNetwork:
    """Default two-enclosure network from the current node areas.

    node_areas = (A1, A2, A3, A4); optics = four SurfaceOptics. Exchange
    pairs follow the published budget: reservoir interior couples 1-2 and
    each to the reservoir gas; the outer cavity couples 2-3, 2-4, 3-4 and
    each to the outer gas.
    """
    a1, a2, a3, a4 = node_areas
    eps = [o.eps_ir for o in optics] + [eps_sp_gas, eps_zp_gas]
    pairs = []

    def add(i, j, ai, aj, fij, fji, enc):
        pairs.append((i, j, eps[i], eps[j], ai, aj, fij, enc))
        pairs.append((j, i, eps[j], eps[i], aj, ai, fji, enc))

    f_sp = enclosure_view_factors({N1: a1, N2: a2})
    a_sp_gas = a1 + a2
    add(N1, N2, a1, a2, f_sp[(N1, N2)], f_sp[(N2, N1)], 0)
    add(N1, NSP, a1, a_sp_gas, f_sp[(N1, "gas")], f_sp[("gas", N1)], 0)
    add(N2, NSP, a2, a_sp_gas, f_sp[(N2, "gas")], f_sp[("gas", N2)], 0)

    f_zp = enclosure_view_factors({N2: a2, N3: a3, N4: a4})
    a_zp_gas = a2 + a3 + a4
    add(N2, N3, a2, a3, f_zp[(N2, N3)], f_zp[(N3, N2)], 1)
    add(N2, N4, a2, a4, f_zp[(N2, N4)], f_zp[(N4, N2)], 1)
    add(N3, N4, a3, a4, f_zp[(N3, N4)], f_zp[(N4, N3)], 1)
    add(N2, NZP, a2, a_zp_gas, f_zp[(N2, "gas")], f_zp[("gas", N2)], 1)
    add(N3, NZP, a3, a_zp_gas, f_zp[(N3, "gas")], f_zp[("gas", N3)], 1)
    add(N4, NZP, a4, a_zp_gas, f_zp[(N4, "gas")], f_zp[("gas", N4)], 1)

    areas = (a1, a2, a3, a4, a_sp_gas, a_zp_gas)
    net = RadiationNetwork(tuple(pairs), areas)
    net.check_reciprocity()
    return net


class HeatNetwork:
    """Assembled heat-flow evaluator for one shape state.

    Precomputes IR pair resistances and convection wiring for the current
    node areas so the per-evaluation cost is a handful of scalar operations.
    Rebuild whenever the shape (and hence the areas) changes materially.
    """

    def __init__(self, node_areas: tuple, optics: tuple, *, d_sp: float,
                 d_zp_bubble: float, height: float, atm_gas: str = "air",
                 eps_sp_gas: float = 1.0, eps_zp_gas: float = 1.0):
        if min(node_areas) < 0 or d_sp <= 0 or d_zp_bubble <= 0 or height <= 0:
            raise ValidationError("areas must be >= 0 and lengths positive")
        self.node_areas = node_areas
        self.optics = optics
        self.d_sp = d_sp
        self.d_zp = d_zp_bubble
        self.height = height
        self.atm_props = TRANSPORT_CO2 if atm_gas == "co2-mix" else TRANSPORT_AIR
        self.gas_props = TRANSPORT_HELIUM
        net = build_radiation_network(node_areas, optics, eps_sp_gas, eps_zp_gas)
        # one entry per unordered pair: (i, j, 1/resistance)
        self._ir = []
        seen = set()
        for (i, j, ei, ej, ai, aj, fij, enc) in net.pairs:
            if (j, i, enc) in seen or ei == 0.0 or ej == 0.0 or fij == 0.0 \
                    or ai <= 0.0 or aj <= 0.0:
                continue
            seen.add((i, j, enc))
            res = ((1 - ei) / (ei * ai) + 1.0 / (fij * ai) + (1 - ej) / (ej * aj))
            self._ir.append((i, j, 1.0 / res))
        self.network = net
        # natural-convection wiring: (gas node, surface node, area, length)
        a1, a2, a3, a4 = node_areas
        self._natural = [(NSP, N1, a1, d_sp), (NSP, N2, a2, d_sp),
                         (NZP, N2, a2, d_zp_bubble), (NZP, N3, a3, d_zp_bubble),
                         (NZP, N4, a4, d_zp_bubble)]
        self._forced = [(N1, a1), (N3, a3), (N4, a4)]

    def node_heats(self, temps: tuple, fluxes: tuple, t_atm: float,
                   rho_atm: float, rho_sp: float, rho_zp: float,
                   rel_wind: float) -> tuple:
        """Net heat flow into each of the six nodes, W.

        temps = (T1, T2, T3, T4, T_sp, T_zp); fluxes = (up/side/down solar,
        up/side/down IR); rel_wind is the atmosphere-relative speed.
        """
        q = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        t4 = [t * t * t * t for t in temps]

        # internal IR exchange
        for (i, j, g) in self._ir:
            flow = SIGMA * (t4[i] - t4[j]) * g
            q[i] -= flow
            q[j] += flow

        # internal natural convection
        for (gi, si, area, length) in self._natural:
            if area <= 0.0:
                continue
            rho = rho_sp if gi == NSP else rho_zp
            ra = rayleigh(temps[si], temps[gi], length, rho, self.gas_props)
            t_film = 0.5 * (temps[si] + temps[gi])
            h = nusselt_natural(ra) * self.gas_props.conductivity(t_film) / length
            flow = h * area * (temps[gi] - temps[si])
            q[gi] -= flow
            q[si] += flow

        # exterior: forced convection plus welling radiation
        up_s, side_s, down_s, up_i, side_i, down_i = fluxes
        solar = {N1: up_s, N3: side_s, N4: down_s}
        ir_in = {N1: up_i, N3: side_i, N4: down_i}
        speed = max(rel_wind, MIN_RELATIVE_WIND)
        for (si, area) in self._forced:
            if area <= 0.0:
                continue
            t_film = 0.5 * (temps[si] + t_atm)
            re = reynolds(speed, self.height, rho_atm, t_film, self.atm_props)
            h = nusselt_forced(re) * self.atm_props.conductivity(t_film) / self.height
            q[si] += h * area * (t_atm - temps[si])
            o = self.optics[si]
            q_sol, q_ir, q_out = external_flux(o.alpha_solar, o.eps_ir, area,
                                               temps[si], solar[si], ir_in[si])
            q[si] += q_sol + q_ir - q_out
        return tuple(q)

    def internal_exchange_sum(self, temps: tuple, rho_sp: float,
                              rho_zp: float) -> float:
        """Sum of all internal pairwise flows; zero up to roundoff."""
        q = [0.0] * 6
        t4 = [t ** 4 for t in temps]
        for (i, j, g) in self._ir:
            flow = SIGMA * (t4[i] - t4[j]) * g
            q[i] -= flow
            q[j] += flow
        for (gi, si, area, length) in self._natural:
            if area <= 0.0:
                continue
            rho = rho_sp if gi == NSP else rho_zp
            ra = rayleigh(temps[si], temps[gi], length, rho, self.gas_props)
            t_film = 0.5 * (temps[si] + temps[gi])
            h = nusselt_natural(ra) * self.gas_props.conductivity(t_film) / length
            flow = h * area * (temps[gi] - temps[si])
            q[gi] -= flow
            q[si] += flow
        return sum(q)
