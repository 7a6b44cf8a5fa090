"""Exception taxonomy shared across the package."""


class SciImpactError(Exception):
    """Base class for all errors raised by this package."""


class CorpusFormatError(SciImpactError, ValueError):
    """Source text is unusable as a whole (e.g. empty input)."""


class InvalidRecordError(SciImpactError, ValueError):
    """A single corpus record violates a structural requirement."""


class CacheError(SciImpactError, ValueError):
    """Binary cache is missing, corrupt, or stale."""


class NotFoundError(SciImpactError, KeyError):
    """Unknown author, venue, or paper identifier."""


class NotVisibleError(SciImpactError, ValueError):
    """Paper exists but is outside the requested snapshot."""


class EmptyCorpusError(SciImpactError, ValueError):
    """No usable documents (e.g. empty vocabulary after tokenization)."""


class DimensionError(SciImpactError, ValueError):
    """Vector length mismatch."""


class DomainError(SciImpactError, ValueError):
    """Numeric input outside the mathematical domain (e.g. p <= 0 in a KL term)."""


class SetMismatchError(SciImpactError, ValueError):
    """Operation applied to a paper from the wrong prediction set."""


class DependencyError(SciImpactError, ValueError):
    """A required context artifact is missing; message names it."""


class RangeError(SciImpactError, ValueError):
    """Requested time span or sample size exceeds what the data supports."""


class SchemaError(SciImpactError, ValueError):
    """Feature names disagree with what a model or table expects."""


class DegenerateLabelsError(SciImpactError, ValueError):
    """A classifier was given a single-class target."""


class UndefinedMetricError(SciImpactError, ValueError):
    """Metric is undefined for this input (constant series, one-class labels, ...)."""
