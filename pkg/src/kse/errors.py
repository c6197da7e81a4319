"""Exception types shared across the pipeline."""


class KseError(Exception):
    """Base class for all pipeline errors."""


class MalformedLine(KseError):
    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        super().__init__(f"malformed line {line_no}" + (f": {reason}" if reason else ""))


class DuplicateId(KseError):
    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"duplicate id: {doc_id!r}")


class EmptyCorpus(KseError):
    pass


class NoSentences(KseError):
    pass


class MissingEvidence(KseError):
    pass


class PreconditionViolation(KseError):
    pass


class BackendUnavailable(KseError):
    pass


class DimensionMismatch(KseError):
    pass


class LengthMismatch(KseError):
    pass


class NegativeEntropy(KseError):
    pass


class NonFinite(KseError):
    pass


class EmptyKse(KseError):
    pass


class InvalidLabel(KseError):
    pass


class ConfigInvalid(KseError):
    def __init__(self, field: str, reason: str = ""):
        self.field = field
        super().__init__(f"invalid config field {field!r}" + (f": {reason}" if reason else ""))


class EvalAborted(KseError):
    """Raised when too large a fraction of per-sample evaluations fail."""

    def __init__(self, failures: list[tuple[str, str]]):
        self.failures = failures
        ids = ", ".join(sid for sid, _ in failures[:5])
        super().__init__(f"{len(failures)} sample(s) failed (first: {ids})")
