"""Physical constants and gas properties.

All values SI. Helium heat capacities are the standard monatomic values and
satisfy c_p = c_v + R exactly, which the thermodynamic closure tests rely on.
"""
from __future__ import annotations

from dataclasses import dataclass

STEFAN_BOLTZMANN = 5.670374419e-8   # W/(m^2 K^4)

GRAVITY_EARTH = 9.81                # m/s^2
GRAVITY_VENUS = 8.87                # m/s^2

R_AIR = 287.05                      # J/(kg K), dry air
R_CO2_MIX = 191.4                   # J/(kg K), Venus CO2/N2 mix (M ~ 43.45 g/mol)
R_HELIUM = 2077.0                   # J/(kg K)

CV_HELIUM = 3116.0                  # J/(kg K)
CP_HELIUM = CV_HELIUM + R_HELIUM    # 5193 J/(kg K)

VENUS_RADIUS = 6.0518e6             # m
VENUS_SOLAR_DAY = 116.75 * 86400.0  # s, local noon-to-noon period


@dataclass(frozen=True)
class GasProperties:
    """Caloric properties of a lifting gas.

    k_ratio is derived, never stored, so c_p = c_v + R stays exact.
    """

    c_v: float          # J/(kg K)
    R: float            # J/(kg K)

    @property
    def c_p(self) -> float:
        return self.c_v + self.R

    @property
    def k_ratio(self) -> float:
        return self.c_p / self.c_v


HELIUM = GasProperties(c_v=CV_HELIUM, R=R_HELIUM)


@dataclass(frozen=True)
class TransportProperties:
    """Power-law temperature correlations for viscosity and conductivity.

    mu(T) = mu_ref * (T/T_ref)^mu_exp, k(T) = k_ref * (T/T_ref)^k_exp.
    Reference values at 273.15 K from standard handbook tables.
    """

    mu_ref: float       # Pa s
    mu_exp: float
    k_ref: float        # W/(m K)
    k_exp: float
    c_p: float          # J/(kg K), treated constant
    T_ref: float = 273.15

    def viscosity(self, T: float) -> float:
        return self.mu_ref * (T / self.T_ref) ** self.mu_exp

    def conductivity(self, T: float) -> float:
        return self.k_ref * (T / self.T_ref) ** self.k_exp


TRANSPORT_HELIUM = TransportProperties(mu_ref=1.87e-5, mu_exp=0.68,
                                       k_ref=0.1460, k_exp=0.70, c_p=CP_HELIUM)
TRANSPORT_AIR = TransportProperties(mu_ref=1.716e-5, mu_exp=0.666,
                                    k_ref=0.0241, k_exp=0.81, c_p=1005.0)
TRANSPORT_CO2 = TransportProperties(mu_ref=1.37e-5, mu_exp=0.79,
                                    k_ref=0.0146, k_exp=1.30, c_p=850.0)
