"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: InputError -> 2,
ConfigError -> 3, DegenerateDataError -> 4.
"""


class HmetricError(ValueError):
    """Base class for all package errors."""


class InputError(HmetricError):
    """Malformed input data (bad CSV, non-finite scores, bad labels)."""


class ConfigError(HmetricError):
    """Invalid evaluation configuration."""


class DegenerateDataError(HmetricError):
    """Data unusable for the requested metric (e.g. a single class)."""
