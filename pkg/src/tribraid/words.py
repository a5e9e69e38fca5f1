"""Validated words over the trivalent braid alphabet.

A *trivalent braid* on ``m`` strands is a tangle diagram, read top to
bottom, whose elementary slices are ordinary braid crossings together with
two kinds of trivalent vertices: a *zip*, where two adjacent strands merge
into one, and an *unzip*, where one strand splits into two.  A word is a
finite sequence of such slices plus its top strand count; the strand count
after each slice is forced by the letters (crossings preserve it, zips drop
it by one, unzips raise it by one), giving the word's *strand profile*.

Letters use 1-based strand indices.  With ``m`` strands live at a slice:

* ``Crossing(i, +1)`` -- strands ``i`` and ``i+1`` cross, the strand
  entering at position ``i`` passing *over*; requires ``1 <= i <= m - 1``.
* ``Crossing(i, -1)`` -- the same crossing with the other strand on top.
* ``Zip(i)``          -- strands ``i`` and ``i+1`` merge; ``1 <= i <= m-1``.
* ``Unzip(i)``        -- strand ``i`` splits in two; ``1 <= i <= m``.

A word is *closable* when its bottom strand count equals its top count,
i.e. when zips and unzips balance; only closable words have a closure.

Words serialize to a two-line text format tagged ``TBW1``::

    TBW1 3
    s1 S2 y1 l2

Line one carries the format tag and the top strand count; line two lists
the letters (``s``/``S`` = positive/negative crossing, ``y`` = zip, ``l`` =
unzip) and may be empty for an identity word.  Lines starting with ``#``
are comments and are skipped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Iterator

from .errors import CompositionError, InvalidWordError, WordParseError


class LetterKind(IntEnum):
    """Kind of an elementary slice.  The numeric order (crossing < zip <
    unzip) is also the order used by canonical forms."""

    CROSSING = 0
    ZIP = 1
    UNZIP = 2


@dataclass(frozen=True)
class Letter:
    """One elementary slice: a crossing, a zip, or an unzip.

    ``sign`` is +1/-1 for crossings and fixed at 0 for zips and unzips.
    Construction enforces only shape-level sanity (index positivity, sign
    range); whether the index fits the live strand count at the letter's
    position in a word is checked by :func:`validate`.
    """

    kind: LetterKind
    index: int
    sign: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.index, int) or isinstance(self.index, bool) or self.index < 1:
            raise ValueError(f"letter index must be a positive integer, got {self.index!r}")
        if self.kind is LetterKind.CROSSING:
            if self.sign not in (1, -1):
                raise ValueError(f"crossing sign must be +1 or -1, got {self.sign!r}")
        else:
            if self.sign != 0:
                raise ValueError(f"{self.kind.name.lower()} letters take no sign")

    # -- factory helpers ---------------------------------------------------

    @classmethod
    def crossing(cls, index: int, sign: int = 1) -> "Letter":
        return cls(LetterKind.CROSSING, index, sign)

    @classmethod
    def zip(cls, index: int) -> "Letter":
        return cls(LetterKind.ZIP, index)

    @classmethod
    def unzip(cls, index: int) -> "Letter":
        return cls(LetterKind.UNZIP, index)

    # -- structure ---------------------------------------------------------

    @property
    def count_delta(self) -> int:
        """Change in strand count across this slice (-1 zip, +1 unzip)."""
        if self.kind is LetterKind.ZIP:
            return -1
        if self.kind is LetterKind.UNZIP:
            return 1
        return 0

    def min_strands(self) -> int:
        """Smallest live strand count under which this letter is legal."""
        if self.kind is LetterKind.UNZIP:
            return self.index
        return self.index + 1

    def inverse(self) -> "Letter":
        """Inverse slice, defined for crossings only."""
        if self.kind is not LetterKind.CROSSING:
            raise ValueError(f"{self.kind.name.lower()} letters are not invertible")
        return Letter(LetterKind.CROSSING, self.index, -self.sign)

    def shifted(self, offset: int) -> "Letter":
        """The same letter acting ``offset`` strand positions to the right."""
        return Letter(self.kind, self.index + offset, self.sign)

    def sort_key(self) -> tuple[int, int, int]:
        """Total order on letters: kind, then index, then +1 before -1."""
        return (int(self.kind), self.index, 0 if self.sign >= 0 else 1)

    def __str__(self) -> str:
        if self.kind is LetterKind.CROSSING:
            return f"{'s' if self.sign > 0 else 'S'}{self.index}"
        return f"{'y' if self.kind is LetterKind.ZIP else 'l'}{self.index}"


@dataclass(frozen=True)
class BraidWord:
    """A word in the trivalent braid alphabet with a fixed top strand count.

    Instances are immutable and hashable.  Construction performs only
    shape-level checks; use :func:`validate` for index-vs-strand-count
    validity.
    """

    top_count: int
    letters: tuple[Letter, ...] = field(default=())

    def __post_init__(self) -> None:
        if not isinstance(self.top_count, int) or isinstance(self.top_count, bool) or self.top_count < 1:
            raise ValueError(f"strand count must be a positive integer, got {self.top_count!r}")
        if not isinstance(self.letters, tuple):
            object.__setattr__(self, "letters", tuple(self.letters))
        for pos, letter in enumerate(self.letters, start=1):
            if not isinstance(letter, Letter):
                raise TypeError(f"letter {pos} is not a Letter: {letter!r}")

    @property
    def bottom_count(self) -> int:
        return self.top_count + sum(l.count_delta for l in self.letters)

    @property
    def is_closable(self) -> bool:
        return self.bottom_count == self.top_count

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def replace_letters(self, letters: Iterable[Letter]) -> "BraidWord":
        return BraidWord(self.top_count, tuple(letters))

    def __str__(self) -> str:
        body = " ".join(str(l) for l in self.letters) or "(empty)"
        return f"[{body}] on {self.top_count}"


# Strand profiles: counts[t] is the number of live strands after the first
# ``t`` letters, so counts[0] is the top count and counts[-1] the bottom.
StrandProfile = tuple[int, ...]


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate`.

    ``first_bad_letter`` is the 1-based position of the first offending
    letter (``None`` when the word is valid), ``reason`` a human-readable
    description, and ``profile`` the strand profile of the longest valid
    prefix (always including the top count).
    """

    ok: bool
    first_bad_letter: int | None
    reason: str | None
    profile: StrandProfile

    def __bool__(self) -> bool:
        return self.ok


def strand_profile(word: BraidWord) -> StrandProfile:
    """Strand counts before/after each letter, without validity checking."""
    counts = [word.top_count]
    for letter in word.letters:
        counts.append(counts[-1] + letter.count_delta)
    return tuple(counts)


def validate(word: BraidWord) -> ValidationReport:
    """Check every letter index against the running strand count.

    Never raises: problems are reported through the returned
    :class:`ValidationReport`.
    """
    counts = [word.top_count]
    for pos, letter in enumerate(word.letters, start=1):
        live = counts[-1]
        need = letter.min_strands()
        if live < need:
            if letter.kind is LetterKind.UNZIP:
                reason = (
                    f"unzip index {letter.index} exceeds strand count {live}"
                    f" (needs index <= {live})"
                )
            else:
                reason = (
                    f"{letter.kind.name.lower()} index {letter.index} needs strands"
                    f" {letter.index} and {letter.index + 1} but only {live} are live"
                )
            return ValidationReport(False, pos, reason, tuple(counts))
        counts.append(live + letter.count_delta)
    return ValidationReport(True, None, None, tuple(counts))


def require_valid(word: BraidWord) -> StrandProfile:
    """Validate ``word`` and return its profile; raise on failure."""
    report = validate(word)
    if not report.ok:
        raise InvalidWordError(f"invalid word at letter {report.first_bad_letter}: {report.reason}")
    return report.profile


def identity(n: int) -> BraidWord:
    """The empty word on ``n`` strands."""
    return BraidWord(n, ())


def compose(upper: BraidWord, lower: BraidWord) -> BraidWord:
    """Stack ``lower`` below ``upper``.

    The bottom strand count of ``upper`` must equal the top strand count of
    ``lower``; otherwise :class:`CompositionError` is raised.
    """
    if upper.bottom_count != lower.top_count:
        raise CompositionError(
            f"cannot stack: upper word ends on {upper.bottom_count} strands,"
            f" lower word starts on {lower.top_count}"
        )
    return BraidWord(upper.top_count, upper.letters + lower.letters)


def embed_right(word: BraidWord, k: int) -> BraidWord:
    """The same word inside a braid with ``k`` extra strands on the right.

    Letter indices are unchanged (the new strands are passive); only the
    strand counts grow.
    """
    if k < 0:
        raise ValueError(f"cannot embed a negative number of strands: {k}")
    return BraidWord(word.top_count + k, word.letters)


# -- text format ----------------------------------------------------------

_TOKEN_RE = re.compile(r"([sSyl])([0-9]+)$")

_KIND_FOR_TAG = {
    "s": (LetterKind.CROSSING, 1),
    "S": (LetterKind.CROSSING, -1),
    "y": (LetterKind.ZIP, 0),
    "l": (LetterKind.UNZIP, 0),
}


def parse_letter(token: str, *, line: int | None = None) -> Letter:
    """Parse one letter token (``s3``, ``S1``, ``y2``, ``l4``)."""
    m = _TOKEN_RE.match(token)
    if not m:
        raise WordParseError("unrecognized letter token", line=line, token=token)
    kind, sign = _KIND_FOR_TAG[m.group(1)]
    index = int(m.group(2))
    if index < 1:
        raise WordParseError("letter index must be at least 1", line=line, token=token)
    return Letter(kind, index, sign)


def parse_word(text: str) -> BraidWord:
    """Parse the two-line ``TBW1`` format (see module docstring).

    Comment lines (first non-blank character ``#``) are skipped anywhere.
    A missing or empty letters line yields an identity word.
    """
    header: tuple[int, str] | None = None
    body: tuple[int, str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            continue
        if header is None:
            if not stripped:
                continue  # leading blank lines are harmless
            header = (lineno, stripped)
        elif body is None:
            body = (lineno, stripped)
        elif stripped:
            raise WordParseError("unexpected extra content after the letters line", line=lineno, token=stripped.split()[0])
    if header is None:
        raise WordParseError("empty input: expected a 'TBW1 <strands>' header line")
    lineno, text_line = header
    parts = text_line.split()
    if parts[0] != "TBW1":
        raise WordParseError("expected format tag 'TBW1'", line=lineno, token=parts[0])
    if len(parts) != 2:
        raise WordParseError("header must be exactly 'TBW1 <strands>'", line=lineno, token=text_line)
    try:
        top = int(parts[1])
    except ValueError:
        raise WordParseError("strand count is not an integer", line=lineno, token=parts[1]) from None
    if top < 1:
        raise WordParseError("strand count must be at least 1", line=lineno, token=parts[1])
    letters: list[Letter] = []
    if body is not None:
        lineno, text_line = body
        for token in text_line.split():
            letters.append(parse_letter(token, line=lineno))
    return BraidWord(top, tuple(letters))


def serialize_word(word: BraidWord) -> str:
    """Serialize to the ``TBW1`` format; inverse of :func:`parse_word`.

    The identity word serializes as the bare header line."""
    head = f"TBW1 {word.top_count}\n"
    if not word.letters:
        return head
    return head + " ".join(str(l) for l in word.letters) + "\n"
