"""Exception types shared across the package."""


class PhraseSiftError(Exception):
    """Base class for all errors raised by phrasesift."""


class IngestError(PhraseSiftError):
    """Raised when a corpus cannot be ingested (empty stream, duplicate ids)."""


class CorpusError(PhraseSiftError):
    """Raised for invalid corpus operations (bad windows, missing metadata)."""


class EmptyVocabularyError(PhraseSiftError):
    """Raised when no phrase survives the document-frequency floor."""


class EmptyMatrixError(PhraseSiftError):
    """Raised when a column filter removes every column of a matrix."""


class DegenerateLabelsError(PhraseSiftError):
    """Raised when a labeling produces no positive or no negative examples."""
