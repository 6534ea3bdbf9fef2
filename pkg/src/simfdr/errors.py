"""Exception types shared across the package."""
from .null_model import EstimationError


class ConfigError(ValueError):
    """Invalid simulation or command-line configuration."""


__all__ = ["ConfigError", "EstimationError"]
