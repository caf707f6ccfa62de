"""Exception hierarchy shared by all modules."""


class PdmError(Exception):
    """Base class for all library errors; `parameter` names the offending input."""

    def __init__(self, message="", parameter=None):
        super().__init__(message)
        self.parameter = parameter


class PoleError(PdmError, ValueError):
    """Gamma-function argument sits on a pole (nonpositive integer)."""


class ConvergenceError(PdmError, RuntimeError):
    pass


class DomainError(PdmError, ValueError):
    """Point outside the physical domain (e.g. beyond the wall x = -1/gamma)."""


class WallCollisionError(PdmError, RuntimeError):
    pass


class RegimeError(PdmError, ValueError):
    """Operation requested for an orbit regime where it is not defined."""


class UnboundError(PdmError, ValueError):
    """Quantum number or deformation outside the bound-state window."""


class NonNormalizableError(PdmError, ValueError):
    pass


class MomentDivergenceError(PdmError, ArithmeticError):
    pass


class OpenRegimeError(PdmError, ValueError):
    """Coherent-state label outside the oscillatory window."""


class GridTooCoarse(PdmError, RuntimeError):
    pass


class ConfigError(PdmError, ValueError):
    pass
