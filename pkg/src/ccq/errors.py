from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class CcqError(Exception):
    """Base class for every domain error; ``code`` is the stable error name."""

    code = "Error"

    def __init__(self, message: str, span: SourceSpan | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self) -> str:
        if self.span is not None:
            return f"{self.span}: {self.code}: {self.message}"
        return f"{self.code}: {self.message}"

    def to_json(self) -> dict:
        out = {"error": self.code, "message": self.message}
        if self.span is not None:
            out["span"] = {"file": self.span.file, "line": self.span.line, "column": self.span.column}
        return out


class ValidationError(CcqError):
    code = "ValidationError"


class UnsafeHead(ValidationError):
    code = "UnsafeHead"


class CopyVarReuse(ValidationError):
    code = "CopyVarReuse"


class MNotNondistinguished(ValidationError):
    code = "MNotNondistinguished"


class MissingCopyVarInM(ValidationError):
    code = "MissingCopyVarInM"


class EmptyCondition(ValidationError):
    code = "EmptyCondition"


class CcqSyntaxError(CcqError):
    code = "SyntaxError"

    def __init__(self, message: str, span: SourceSpan | None = None, expected: str | None = None):
        super().__init__(message, span)
        self.expected = expected


class NonPositiveCopyNumber(CcqError):
    code = "NonPositiveCopyNumber"


class ArityMismatch(CcqError):
    code = "ArityMismatch"


class NonDistinctHead(CcqError):
    code = "NonDistinctHead"


class ScaleMismatch(CcqError):
    code = "ScaleMismatch"


class ClassMismatch(CcqError):
    code = "ClassMismatch"


class BudgetExceeded(CcqError):
    code = "BudgetExceeded"


class SearchBudgetExceeded(BudgetExceeded):
    code = "SearchBudgetExceeded"


class ExplicitWaveBudgetExceeded(BudgetExceeded):
    code = "ExplicitWaveBudgetExceeded"


class EnumerationBudgetExceeded(BudgetExceeded):
    code = "EnumerationBudgetExceeded"
