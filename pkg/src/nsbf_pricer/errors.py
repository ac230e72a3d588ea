"""Exception types shared across the solver stages."""


class NSBFError(Exception):
    """Base class for solver failures."""


class ConvergenceError(NSBFError):
    """A truncated series or iteration failed to reach its tolerance."""


class PositivityError(NSBFError):
    """A quantity required to be positive (coefficient, particular solution) is not."""


class BoundaryViolation(NSBFError):
    """An assembled eigenfunction does not vanish at a barrier within tolerance."""


class VegaUndefined(NSBFError):
    """Vega via the chain rule needs sigma'(y0) != 0 (constant-volatility models have none)."""


class InstabilityError(NSBFError):
    """The finite-difference oracle produced values far outside the payoff range."""


class ConfigError(NSBFError):
    """A run configuration is missing fields or holds inconsistent values."""
