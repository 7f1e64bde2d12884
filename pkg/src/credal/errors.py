"""Exception hierarchy shared by all credal modules.

Two branches matter to callers: `InputFormatError` covers malformed or
inconsistent input documents (network and scenario files), `QueryError`
covers well-formed inputs combined into an invalid or unanswerable query.
The CLI maps them to exit codes 1 and 2 respectively.
"""


class CredalError(Exception):
    """Base class for every error raised by this package."""


class SpaceMismatchError(CredalError):
    """Two values built over different outcome spaces were combined."""


class EmptyEventError(CredalError):
    """An operation required a non-empty event."""


class InputFormatError(CredalError):
    """An input document is malformed or internally inconsistent."""


class NetworkSyntaxError(InputFormatError):
    """The network document is not valid JSON; carries line/column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class NetworkSemanticError(InputFormatError):
    """The network document parses but violates a structural rule."""


class ScenarioFormatError(InputFormatError):
    """The scenario document parses but violates a structural rule."""


class QueryError(CredalError):
    """A query referenced unknown names or violated a query precondition."""


class UnknownLabelError(QueryError):
    """A label is not a member of the relevant space or network."""


class EvidenceError(QueryError):
    """Evidence mentions the class variable, unknown names, or bad states."""


class ZeroConditioningEvent(QueryError):
    """Conditioning on an event of probability zero."""


class PositivityViolation(QueryError):
    """A completion or table entry required to be positive is zero."""


class InternalScopeError(CredalError):
    """A dynamic-programming factor retained an out-of-plan variable."""
