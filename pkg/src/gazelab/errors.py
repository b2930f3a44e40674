"""Exception hierarchy shared by the whole package.

The CLI maps these onto process exit codes (usage -> 1, data -> 2,
numeric -> 3), so raising the right class matters beyond readability.
"""


class GazelabError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(GazelabError):
    """A caller violated an API precondition (bad argument, wrong shape)."""


class GazeDataError(GazelabError):
    """Input data is malformed, inconsistent or insufficient."""


class NumericError(GazelabError):
    """A numeric routine failed (singular system, NaN, non-convergence)."""


class TrainingError(NumericError):
    """Model training failed to converge or diverged."""
