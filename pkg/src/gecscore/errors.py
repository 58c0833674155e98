"""Exception taxonomy shared across the package."""


class GecScoreError(Exception):
    """Base class for all library errors."""


class CorpusError(GecScoreError):
    """Malformed corpus file or record (carries a line number where possible)."""


class GecError(GecScoreError):
    """Grammar-correction backend failure."""


class MetricError(GecScoreError):
    """Similarity metric failure (bad parameters or non-finite values)."""


class CalibrationError(GecScoreError):
    """ROC/threshold construction impossible (e.g. single-class labels)."""


class TransportError(GecScoreError):
    """Network-level failure talking to the correction/similarity service."""


class ServiceError(GecScoreError):
    """Service reached but returned a non-success status."""


class ProtocolError(GecScoreError):
    """Service response violated the wire contract (count mismatch, bad shape)."""
