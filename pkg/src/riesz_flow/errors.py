"""Exception hierarchy shared by every module."""


class RieszFlowError(Exception):
    """Base class for library errors."""


class InputError(RieszFlowError, ValueError):
    """Invalid argument, domain mismatch or violated precondition."""


class EmptyDomainError(InputError):
    """The shape descriptor selected no cell."""


class QuadratureError(RieszFlowError, ArithmeticError):
    """Adaptive quadrature did not reach its tolerance within the depth cap."""


class SolverError(RieszFlowError, ArithmeticError):
    """Iterative linear solve did not converge."""


class ConfigError(RieszFlowError):
    """Malformed command line or configuration file."""
