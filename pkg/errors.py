"""
Matchmaker exception hierarchy

Every error carries a stable code so the CLI can turn it into a Diagnostic.
"""

from typing import Optional


class MatchmakerError(Exception):
    """Base error for the matchmaking engine"""

    code = "MATCHMAKER_ERROR"

    def __init__(self,
                 message: str,
                 details: Optional[dict] = None,
                 line: Optional[int] = None,
                 column: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}
        self.line = line
        self.column = column

    def at(self, line: int, column: int = 1) -> "MatchmakerError":
        """Attach a source position when none is recorded yet"""
        if self.line is None:
            self.line = line
            self.column = column
        return self

    def to_diagnostic(self, severity: str = "error"):
        # Lazy import to avoid circular imports
        from schemas import Diagnostic

        return Diagnostic(
            severity=severity,
            line=self.line or 0,
            column=self.column or 0,
            message=self.message,
            code=self.code,
        )

    def __str__(self) -> str:
        if self.line is not None:
            return f"{self.code} at {self.line}:{self.column}: {self.message}"
        return f"{self.code}: {self.message}"


class UnknownSymbol(MatchmakerError):
    code = "UNKNOWN_SYMBOL"


class NominalUnsupported(MatchmakerError):
    code = "NOMINAL_UNSUPPORTED"


class PreconditionViolated(MatchmakerError):
    code = "PRECONDITION_VIOLATED"


class NonComponentConjunct(MatchmakerError):
    code = "NON_COMPONENT_CONJUNCT"


class DuplicateComponent(MatchmakerError):
    code = "DUPLICATE_COMPONENT"


class ComponentRangeViolated(MatchmakerError):
    code = "COMPONENT_RANGE_VIOLATED"


class DuplicateOfferName(MatchmakerError):
    code = "DUPLICATE_OFFER_NAME"


class UnknownParty(MatchmakerError):
    code = "UNKNOWN_PARTY"


class InvalidWeight(MatchmakerError):
    code = "INVALID_WEIGHT"


class ParseError(MatchmakerError):
    code = "SYNTAX_ERROR"


class ReconstructionFailed(MatchmakerError):
    """Raised when E ⊓ D ≡ C does not hold after a semantic difference"""

    code = "RECONSTRUCTION_FAILED"
