"""Exception types shared across the recommendation engine.

Plain IO failures raise the built-in ``OSError`` family with path context;
everything domain-specific gets a named class here so callers (CLI, service)
can map failures to exit codes and degraded responses without string
matching.
"""


class LibrecError(Exception):
    """Base class for all domain errors raised by this package."""


class NotebookFormatError(LibrecError):
    """Notebook JSON is malformed or missing the cells array."""


class EmptyCorpusError(LibrecError):
    """A corpus load produced zero import records."""


class EmptyVocabularyError(LibrecError):
    """Vocabulary construction retained no packages."""


class DegenerateSamplerError(LibrecError):
    """Negative sampling is impossible over a single-package vocabulary."""


class DimensionError(LibrecError):
    """Vectors passed to a numeric operation have mismatched dimensions."""


class TrainingDivergedError(LibrecError):
    """A non-finite value appeared during SGD.

    Carries the epoch and the (target, context) pair being visited.
    """

    def __init__(self, message: str, epoch: int, pair: tuple):
        super().__init__(message)
        self.epoch = epoch
        self.pair = pair


class ZeroVectorError(LibrecError):
    """Cosine similarity is undefined for a zero-norm vector."""


class NoKnownImportsError(LibrecError):
    """None of the observed imports are in the model vocabulary."""


class NoKnownNeighborsError(LibrecError):
    """All neighbors of a projection request are out of vocabulary."""


class EmptyIndexError(LibrecError):
    """No catalog description survived tokenization."""


class SummarizerUnavailableError(LibrecError):
    """The remote summarizer failed and fallback was disabled.

    ``cause`` holds the underlying HTTP-level exception when present.
    """

    def __init__(self, message: str, cause: Exception | None = None):
        super().__init__(message)
        self.cause = cause


class NoEvaluableFilesError(LibrecError):
    """An evaluation protocol found no file meeting its preconditions."""


class LabelResolutionError(LibrecError):
    """Hard-label paths could not be resolved; lists every offender."""

    def __init__(self, message: str, offenders: list):
        super().__init__(message)
        self.offenders = offenders


class FormatError(LibrecError):
    """A persisted model file is corrupt, truncated, or wrong-version."""
