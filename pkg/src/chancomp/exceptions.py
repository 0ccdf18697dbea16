"""Exception types raised across the package."""


class ChannelError(ValueError):
    """Base class for invalid channel data or parameters."""


class DimensionError(ChannelError):
    """Operand shapes do not agree with the declared dimensions."""


class ParameterRangeError(ChannelError):
    """A family parameter lies outside its admissible range."""


class NotHermitianError(ChannelError):
    pass


class NotPSDError(ChannelError):
    pass


class OptimizationError(RuntimeError):
    """No restart of the purity search reached its convergence test."""
