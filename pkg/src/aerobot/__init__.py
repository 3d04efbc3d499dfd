"""Flight simulator for variable-altitude balloon-in-balloon aerobots."""

from .atmosphere import (AtmosphereProfile, RadiationEnvironment,
                         builtin_profile, direct_solar, load_profile, sample)
from .dynamics import AerobotConfig, Engine, Environment, SimState
from .envelope import EnvelopeSpec, InflatedGeometry, nevada_envelope
from .errors import (AerobotError, EngineFault, InfeasibleError,
                     OutOfRangeError, ParseError, SolverError, ValidationError)
from .scenario import (Scenario, load_scenario, make_engine, replay, simulate,
                       venus_preset_run)
from .shape import ShapeLoads, ShapeSolution, ShapeSolver, solve_shape
from .shapetable import ShapeTable, build_shape_table

__version__ = "0.1.0"

__all__ = [
    "AerobotConfig", "AerobotError", "AtmosphereProfile", "Engine",
    "EngineFault", "EnvelopeSpec", "Environment", "InfeasibleError",
    "InflatedGeometry", "OutOfRangeError", "ParseError",
    "RadiationEnvironment", "Scenario", "ShapeLoads", "ShapeSolution",
    "ShapeSolver", "ShapeTable", "SimState", "SolverError", "ValidationError",
    "build_shape_table", "builtin_profile", "direct_solar", "load_profile",
    "load_scenario", "make_engine", "nevada_envelope", "replay", "sample",
    "simulate", "solve_shape", "venus_preset_run",
]
