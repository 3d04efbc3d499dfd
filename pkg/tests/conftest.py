import pytest

from aerobot.envelope import nevada_envelope
from aerobot.shape import ShapeLoads, ShapeSolver


@pytest.fixture(scope="session")
def nevada_spec():
    return nevada_envelope()


@pytest.fixture(scope="session")
def nevada_loads():
    # BCM + gondola payload, a pressurized reservoir fill, and sea-levelish
    # helium density in the outer chamber
    return ShapeLoads(m_payload=26.5, m_sp_gas=1.3, rho_zp_gas=0.139, g=9.81)


@pytest.fixture(scope="session")
def nevada_solver(nevada_spec, nevada_loads):
    return ShapeSolver(nevada_spec, nevada_loads)


@pytest.fixture(scope="session")
def nevada_family(nevada_solver):
    return nevada_solver.family(0.87)
