"""
Shared error types for the commutation toolkit
Every module raises one of these so the CLI can map them to exit codes
"""


class CommutationError(ValueError):
    """Base class for every error the toolkit raises on bad input."""

    error_code = "commutation_error"

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail if detail is not None else message

    def to_json(self):
        return {"error": self.error_code, "detail": str(self.detail)}


class MatrixError(CommutationError):
    """Invalid commutator matrix or mismatched dimensions."""

    error_code = "invalid_matrix"


class ParseError(CommutationError):
    """Word, bracketing or Pauli-string text that does not parse."""

    error_code = "parse_error"


class ContextMismatchError(CommutationError):
    """Elements or operators that belong to different groups were combined."""

    error_code = "context_mismatch"


class CapExceededError(CommutationError):
    """Enumeration or dense construction would exceed the configured cap."""

    error_code = "cap_exceeded"


class ConsistencyError(CommutationError):
    """An empirical model is empty somewhere or not locally consistent."""

    error_code = "inconsistent_model"


class NotDarbouxError(CommutationError):
    """The decision procedure needs a matrix in Darboux form."""

    error_code = "not_darboux"


class CertificateError(CommutationError):
    """A certificate built by the toolkit failed its own verification."""

    error_code = "certificate_failed"
