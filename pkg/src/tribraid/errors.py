"""Exception hierarchy shared across the package.

Everything raised on purpose derives from :class:`TribraidError`, so callers
(including the CLI) can catch one type.  Errors carry enough context to name
the offending letter, site, or geometric obstruction.
"""

from __future__ import annotations


class TribraidError(Exception):
    """Base class for all errors raised by this package."""


class WordParseError(TribraidError):
    """A word file or word string failed to parse.

    Attributes
    ----------
    line:
        1-based line number of the offending input line, or ``None`` when the
        problem is not tied to a single line (e.g. truncated input).
    token:
        The offending token text, when applicable.
    """

    def __init__(self, message: str, *, line: int | None = None, token: str | None = None):
        self.line = line
        self.token = token
        where = []
        if line is not None:
            where.append(f"line {line}")
        if token is not None:
            where.append(f"token {token!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class InvalidWordError(TribraidError):
    """An operation that requires a valid word was given an invalid one."""


class CompositionError(TribraidError):
    """Two words were stacked whose boundary strand counts do not match."""


class SiteError(TribraidError):
    """A rewrite site does not (or no longer does) match the word."""


class MoveError(TribraidError):
    """A stabilization/conjugation/L-move was requested at an illegal spot."""


class PathReplayError(TribraidError):
    """A move path failed to replay, or replayed to the wrong endpoint."""


class DiagramError(TribraidError):
    """A diagram violates the planar spatial-graph data contract."""


class SiteObstructionError(DiagramError):
    """A diagram distortion site is blocked by other diagram material.

    The message names the obstructing arc/node so callers can pick a
    different site.
    """


class BraidingError(TribraidError):
    """The braiding pipeline hit a diagram it cannot process."""
