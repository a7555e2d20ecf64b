"""Exception hierarchy shared across the package.

``MotrackError`` covers everything a caller can provoke with bad data or
configuration; genuine I/O failures stay ordinary ``OSError`` so the CLI can
map the two families to distinct exit codes.
"""


class MotrackError(Exception):
    """Base class for validation and data errors raised by this package."""


class ZeroVectorError(MotrackError):
    """A descriptor with (numerically) zero norm cannot be normalized."""


class DimensionMismatchError(MotrackError):
    """A vector or matrix does not have the configured dimension."""


class SingularInnovationError(MotrackError):
    """The innovation covariance is not positive definite."""


class EmptyGalleryError(MotrackError):
    """An appearance distance was requested against an empty gallery."""


class MissingDescriptorError(MotrackError):
    """A detection without an appearance descriptor reached the appearance metric."""


class ParseError(MotrackError):
    """A data file could not be parsed.

    Carries the offending path and 1-based line number (0 for whole-file
    problems such as a bad binary header).
    """

    def __init__(self, path, line, reason):
        self.path = str(path)
        self.line = line
        self.reason = reason
        super().__init__(f"{self.path}:{line}: {reason}")


class RowCountMismatchError(MotrackError):
    """Feature rows and detection lines disagree in count."""


class EmptyGroundTruthError(MotrackError):
    """Evaluation was requested against ground truth with no boxes."""


class InvalidSpecError(MotrackError):
    """A network layer specification is malformed or inapplicable."""


class ConfigError(MotrackError):
    """A configuration value or key is invalid."""
