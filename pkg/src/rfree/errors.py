"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """A requested table would exceed the configured memory budget."""


class ConfigError(ValueError):
    """An experiment configuration is invalid or vacuous."""


class SelfCheckError(RuntimeError):
    """An exact arithmetic identity failed during a run; indicates a bug."""
