from __future__ import annotations


class BorrowvizError(Exception):
    """Base class for all errors raised by this package."""


# --- ingestion ---

class MalformedRecord(BorrowvizError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"malformed diagnostic record at line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class ToolchainMissing(BorrowvizError):
    pass


class WorkspaceNotFound(BorrowvizError):
    pass


# --- interpretation ---

class UnsupportedCode(BorrowvizError):
    def __init__(self, code: str | None):
        super().__init__(f"no visualization rule for error code {code!r}")
        self.code = code


class PatternMismatch(BorrowvizError):
    """The diagnostic does not match the shape the rule expects.

    Usually a sign of compiler-version drift; the raw message is kept so
    the mismatch can be reported.
    """

    def __init__(self, code: str, reason: str, raw_message: str):
        super().__init__(f"{code}: {reason} (message was: {raw_message!r})")
        self.code = code
        self.reason = reason
        self.raw_message = raw_message


# --- layout ---

class RangeOutOfBounds(BorrowvizError):
    pass


class MissingExtent(BorrowvizError):
    pass


# --- telemetry ---

class NegativeInterval(BorrowvizError):
    pass


class UnorderedInput(BorrowvizError):
    pass


class EmptySession(BorrowvizError):
    pass


class LedgerWriteFailure(BorrowvizError):
    pass
