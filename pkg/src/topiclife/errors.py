"""Exception types shared across pipeline stages.

Exit-code mapping (see cli): ConfigurationError -> 1, PrerequisiteError -> 2,
OSError -> 3, anything else -> 4.
"""


class ConfigurationError(ValueError):
    """Invalid configuration value or combination."""


class PrerequisiteError(RuntimeError):
    """A pipeline stage was run before the stage that produces its input."""


class ContractViolation(RuntimeError):
    """An internal invariant or caller contract was broken."""
