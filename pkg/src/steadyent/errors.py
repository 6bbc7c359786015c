"""Exception hierarchy shared by all modules."""


class SteadyEntError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(SteadyEntError, ValueError):
    pass


class HermiticityError(SteadyEntError, ValueError):
    pass


class SingularSystemError(SteadyEntError, ArithmeticError):
    pass


class DegenerateSteadyStateError(SteadyEntError, ArithmeticError):
    """The Liouvillian has more than one independent stationary state."""


class NumericalPSDError(SteadyEntError, ArithmeticError):
    """A density matrix is negative beyond numerical noise."""


class NonFiniteBetaError(SteadyEntError, ValueError):
    pass


class NotXStateError(SteadyEntError, ValueError):
    pass


class UnknownBathError(SteadyEntError, KeyError):
    pass


class MissingBetaError(SteadyEntError, KeyError):
    pass


class TimestepError(SteadyEntError, ValueError):
    pass


class BoundaryWeightError(SteadyEntError, ArithmeticError):
    pass


class InconsistentEnsembleError(SteadyEntError, ValueError):
    pass


class MapUndefinedError(SteadyEntError, ValueError):
    """Raised when effective temperatures are requested at zero pump.

    The mapped rates are attached as ``.params`` so callers can still use them.
    """

    def __init__(self, message, params=None):
        super().__init__(message)
        self.params = params


class NoConvergenceError(SteadyEntError, RuntimeError):
    def __init__(self, message, values=None):
        super().__init__(message)
        self.values = values


class ColumnError(SteadyEntError, KeyError):
    pass


class ConfigError(SteadyEntError, ValueError):
    pass
