"""
Exception hierarchy for the defeasible DL toolkit.

Services raise these; the reasoning controller maps them to exit codes.
"""

from typing import Optional


class DdlError(Exception):
    """Base class for every error raised by the toolkit."""


class KbSyntaxError(DdlError, ValueError):
    """Source text does not conform to the KB grammar."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class UndeclaredNameError(DdlError, ValueError):
    """A name is used without a matching signature declaration."""

    def __init__(self, name: str, kind: str, line: Optional[int] = None, column: Optional[int] = None):
        self.name = name
        self.kind = kind
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{where}undeclared {kind} '{name}'")


class MalformedDefeasibleAxiomError(DdlError, ValueError):
    """A defeasible axiom side is not an atom, a negated atom, TOP or BOT."""


class UnsupportedConstructError(DdlError):
    """Input leaves the ALCO fragment and no external oracle is configured."""


class TableauBudgetExceededError(DdlError):
    """The tableau exceeded its configured step budget."""


class OracleError(DdlError):
    """Failure while talking to an external entailment oracle."""


class OracleSpawnError(OracleError):
    """The external oracle process could not be started."""


class OracleProtocolError(OracleError):
    """The external oracle answered something other than `yes` or `no`."""


class OracleTimeoutError(OracleError):
    """The external oracle did not answer within the timeout."""


class CompilationError(DdlError):
    """A ranked KB cannot be compiled into a dl-program."""


class EmptyUniverseError(DdlError):
    """A program with variables has no constants to ground them with."""


class DlAtomPresentError(DdlError):
    """The plain Gelfond-Lifschitz reduct was asked for a program with dl-atoms."""


class NoAnswerSetError(DdlError):
    """A consequence was requested from a program with no strong answer sets."""


class NotAnAnswerSetError(DdlError):
    """An interpretation passed as answer set is not one."""


class MissingLambdaPairingError(DdlError):
    """A program literal has no update pairing in the program's lambda."""


class UnknownLiteralError(DdlError, ValueError):
    """A consequence query names a literal outside the program's Herbrand base."""
