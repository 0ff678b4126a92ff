"""Exception hierarchy shared across the package."""


class QbError(Exception):
    """Base class for all qbergman errors."""


class SizeError(QbError):
    """Enumeration bound exceeded (group order, dimension range)."""


class DimensionError(QbError):
    """Mismatched coordinate dimensions."""


class DomainError(QbError):
    """Input outside the mathematical domain of an operation."""


class RankError(QbError):
    """Singular integer matrix where a nonsingular one is required."""


class UnsupportedGroupError(QbError):
    """Operation needs data (characters, basic map) not available for this group kind."""


class DivisibilityError(QbError):
    """Polynomial is not divisible by the requested generating polynomial."""


class InvarianceError(QbError):
    """Symbol or function fails a required (relative) invariance check."""


class TruncationError(QbError):
    """Symbol exponents exceed the requested truncation order."""


class MarginError(QbError):
    """Interior-block margin too small for the requested operator product."""


class SingularPointError(QbError):
    """Evaluation requested on the branch locus of the quotient map."""


class ConfigError(QbError):
    """Invalid experiment configuration."""
