"""Exception hierarchy shared across the engine."""

from __future__ import annotations


class DxsimError(Exception):
    """Base class for all engine errors."""


# --- corpus ---------------------------------------------------------------


class CorpusError(DxsimError):
    pass


class MalformedRecord(CorpusError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class DuplicateId(CorpusError):
    def __init__(self, doc_id: str, line_no: int):
        super().__init__(f"duplicate id {doc_id!r} at line {line_no}")
        self.doc_id = doc_id
        self.line_no = line_no


class EmptyCorpus(CorpusError):
    def __init__(self) -> None:
        super().__init__("corpus contains no records")


class UnknownId(DxsimError):
    def __init__(self, doc_id: str):
        super().__init__(f"unknown document id {doc_id!r}")
        self.doc_id = doc_id


# --- preprocessing --------------------------------------------------------


class EmptyAfterPreprocessing(DxsimError):
    def __init__(self, doc_id: str):
        super().__init__(f"document {doc_id!r} has no tokens left after preprocessing")
        self.doc_id = doc_id


# --- embedding ------------------------------------------------------------


class EmbeddingError(DxsimError):
    pass


class EmptyText(EmbeddingError):
    pass


class ZeroVector(EmbeddingError):
    pass


class DegenerateVector(EmbeddingError):
    pass


class BackendUnavailable(EmbeddingError):
    pass


class ProtocolError(EmbeddingError):
    pass


class DimensionMismatch(DxsimError):
    """Vector or response dimension differs from what the caller expects."""


# --- similarity -----------------------------------------------------------


class EmptyCandidatePool(DxsimError):
    """Every candidate was eliminated by the active filters."""


# --- analysis -------------------------------------------------------------


class CorpusTooSmall(DxsimError):
    pass


# --- report ---------------------------------------------------------------


class MisalignedOverlaps(DxsimError):
    pass
