"""Exception types raised across the package."""


class KerrFPIError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(KerrFPIError, ValueError):
    """A physical or numerical parameter is outside its admissible domain."""


class SolverError(KerrFPIError, ArithmeticError):
    """A root or fixed-point solve could not meet its tolerance."""


class QuadratureError(KerrFPIError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best estimate and its error bound are kept on the exception so
    callers can decide whether the result is still usable.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class MonochromaticInputError(KerrFPIError, ValueError):
    """A spectral density was requested for a zero-linewidth drive.

    With kappa_s = 0 the input spectrum is a delta distribution, so only
    integrated quantities (photon number, output power) are defined.
    """


class ConfigurationError(KerrFPIError, ValueError):
    """The cavity configuration does not match what an operation requires."""
