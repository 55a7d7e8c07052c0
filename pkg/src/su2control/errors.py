"""Exception types raised by the library."""


class SU2ControlError(Exception):
    """Base class for all library errors."""


class InvalidInput(SU2ControlError, ValueError):
    """Arguments outside the documented domain."""


class MagnitudeMismatch(SU2ControlError, ValueError):
    """The requested (t, omega) cannot produce the target's off-diagonal magnitude."""


class BoundaryPoint(SU2ControlError, ValueError):
    """A strict-interior formula was evaluated on (or numerically at) the unit circle."""


class OutOfValidity(SU2ControlError, ValueError):
    """A closed-form expression was used outside its range of validity."""


class Infeasible(SU2ControlError, ValueError):
    """A target is not reachable at the requested time and control bound."""


class NormViolation(SU2ControlError, ValueError):
    """A control waveform exceeded its declared norm bound."""


class SolverFailure(SU2ControlError, RuntimeError):
    """A numerical procedure did not converge."""
