"""
Errors Module
Failure taxonomy shared by the library and the command-line front end
"""


class HjmError(Exception):
    """Base class for every toolkit failure"""


class ConfigError(HjmError, ValueError):
    """Invalid run configuration (exit code 2)"""


class NonCommensurateGrid(ConfigError):
    """A step does not divide its interval"""


class StepOrderViolation(ConfigError):
    """The time step exceeds the maturity step"""


class InsufficientPaths(ConfigError):
    """Fewer than two Monte Carlo paths requested"""


class OutOfRange(HjmError, ValueError):
    """A time lies outside the maturity grid"""


class NumericalError(HjmError, ArithmeticError):
    """Numerical failure during simulation or pricing (exit code 3)"""


class StencilOutOfRange(NumericalError):
    """A quadrature or interpolation rule needs nodes beyond the extended grid"""


class MissingFictitiousNode(NumericalError):
    """Short-rate interpolation nodes were frozen before they were needed"""


class DegenerateVolatility(NumericalError):
    """Bond-option volatility is negative or not finite"""
