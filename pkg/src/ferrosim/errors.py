"""Exception types shared across the simulator.

The CLI maps these onto process exit codes: configuration problems exit 2,
numerical/physics failures exit 3, I/O failures exit 4.
"""


class FerrosimError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(FerrosimError):
    """A config map or config file is missing a key or names an unknown one."""


class ValidationError(FerrosimError):
    """A parameter violates its invariant (names the field and the bound)."""


class DomainError(FerrosimError, ValueError):
    """An operation was called outside its stated precondition."""


class NumericalError(FerrosimError):
    """A solver failed to converge; carries the last residual seen."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class ExtractionError(FerrosimError):
    """A threshold-current criterion was never crossed by the curve."""

    def __init__(self, message: str, i_min: float | None = None, i_max: float | None = None):
        super().__init__(message)
        self.i_min = i_min
        self.i_max = i_max


class ConsistencyError(FerrosimError):
    """A solution object does not match the bias point it was paired with."""


class FitError(FerrosimError):
    """The fit problem is degenerate or under-determined."""


class StabilityError(FerrosimError):
    """Requested transient time step violates the explicit-integration bound."""


class DivergenceError(FerrosimError):
    """A transient produced a non-finite node voltage; carries the timestamp."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class StagnationError(FerrosimError):
    """An oscillator failed to oscillate within the allotted time."""
