"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration value violates an invariant (bad kernel count, empty
    evaluation mask, inconsistent bounds, ...)."""


class PhaseDomainError(ValueError):
    """A phase angle falls outside the stride domain [0, 2*pi)."""


class GridMismatchError(ValueError):
    """Arrays that must share a sampling grid have different lengths."""


class BaselineFormatError(ValueError):
    """A baseline trajectory file is malformed (bad columns, phases outside
    [0, 1), or non-increasing phase order)."""
