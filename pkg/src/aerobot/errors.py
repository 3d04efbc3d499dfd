"""Exception types shared across the simulator."""


class AerobotError(Exception):
    """Base class for all simulator errors."""


class OutOfRangeError(AerobotError):
    """A query fell outside the supported domain (e.g. altitude beyond the
    extrapolation band of an atmosphere profile)."""


class ParseError(AerobotError):
    """A data file could not be parsed against its documented schema."""


class ValidationError(AerobotError):
    """Parsed data or a configuration violates a documented invariant."""


class InfeasibleError(AerobotError):
    """A requested configuration has no physical solution (e.g. a gas volume
    outside the envelope's feasible range, or a slack base that cannot carry
    the payload)."""


class SolverError(AerobotError):
    """An iterative solver failed to converge; carries best-effort residuals."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class EngineFault(AerobotError):
    """A simulation step failed (solver failure or state sanity violation)."""
