"""Exception types shared across the package."""

from __future__ import annotations


class ClaimflowError(Exception):
    """Base class for all errors raised by this package."""


class CorpusLoadError(ClaimflowError):
    """Structural defect in a corpus bundle (malformed record, duplicate id,
    dangling reference).  Carries the 1-based record number when known."""

    def __init__(self, message: str, record_number: int | None = None):
        if record_number is not None:
            message = f"record {record_number}: {message}"
        super().__init__(message)
        self.record_number = record_number


class MissingEmbeddingError(ClaimflowError):
    """A claim id has no vector in the embedding table."""


class KeyMismatchError(ClaimflowError):
    """Prediction keys do not cover the gold instance keys exactly."""

    def __init__(self, message: str, missing=(), extra=()):
        super().__init__(message)
        self.missing = tuple(missing)
        self.extra = tuple(extra)
