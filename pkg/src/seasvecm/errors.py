"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised when a configuration file or option set is invalid."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative routine fails to reach its tolerance."""


class NumericalError(RuntimeError):
    """Raised when a computation produces values it cannot proceed with."""


class ChainError(NumericalError):
    """Raised when a sampler cannot produce the requested number of draws."""
