"""Exception hierarchy.

Every error carries a short ``code`` used as the machine-readable prefix of
CLI failure messages.
"""

from __future__ import annotations


class OntorecError(Exception):
    code = "E_ONTOREC"

    def __init__(self, message: str, *, source: str | None = None, lineno: int | None = None):
        self.message = message
        self.source = source
        self.lineno = lineno
        super().__init__(self._render())

    def _render(self) -> str:
        where = ""
        if self.source is not None:
            where = f"{self.source}:"
            if self.lineno is not None:
                where += f"{self.lineno}:"
            where += " "
        elif self.lineno is not None:
            where = f"line {self.lineno}: "
        return where + self.message

    def with_context(self, source: str | None = None, lineno: int | None = None) -> "OntorecError":
        """Return a copy of this error annotated with file/line context."""
        err = type(self)(
            self.message,
            source=source if source is not None else self.source,
            lineno=lineno if lineno is not None else self.lineno,
        )
        return err


class ConfigError(OntorecError, ValueError):
    code = "E_CONFIG"


# -- log preprocessing ------------------------------------------------------

class LogParseError(OntorecError, ValueError):
    code = "E_LOG_PARSE"


class MalformedLine(LogParseError):
    code = "E_MALFORMED_LINE"


class BadTimestamp(LogParseError):
    code = "E_BAD_TIMESTAMP"


class BadStatus(LogParseError):
    code = "E_BAD_STATUS"


# -- artifact files and ontology ---------------------------------------------

class FileSyntaxError(OntorecError, ValueError):
    """A line in one of the line-oriented artifact files could not be parsed."""

    code = "E_SYNTAX"


class CycleError(OntorecError, ValueError):
    code = "E_CYCLE"


class DanglingReference(OntorecError, ValueError):
    code = "E_DANGLING_REFERENCE"


class UnknownConcept(OntorecError, KeyError):
    code = "E_UNKNOWN_CONCEPT"

    def __str__(self) -> str:  # KeyError would repr() the message
        return self._render()


# -- mining and rules -------------------------------------------------------

class EmptyDatabase(OntorecError, ValueError):
    code = "E_EMPTY_DATABASE"


class MissingPrefixSupport(OntorecError, ValueError):
    code = "E_MISSING_PREFIX_SUPPORT"


class EmptyHistory(OntorecError, ValueError):
    code = "E_EMPTY_HISTORY"


class FormatVersionMismatch(OntorecError, ValueError):
    code = "E_FORMAT_VERSION"


# -- evaluation -------------------------------------------------------------

class TooFewSequences(OntorecError, ValueError):
    code = "E_TOO_FEW_SEQUENCES"


class NoScorableTransactions(OntorecError, ValueError):
    code = "E_NO_SCORABLE_TRANSACTIONS"
