"""Replayable move paths: isotopy rules plus the Markov-level moves.

A :class:`MovePath` witnesses an equivalence: a start word, an end word,
and a sequence of steps each of which applies one concrete move.  Replaying
the steps from the start must reproduce the end word exactly, with every
intermediate word valid; :func:`replay` enforces this.

Paths serialize to a line-per-step text format.  Isotopy steps read::

    R5Zip+ @3 R2L i=2
    FarCommute @1 L2R i=1 j=3

(rule token with sign variant, 1-based letter index, direction, strand
parameters).  The Markov-level steps use their own tokens::

    Lmove k=2 i=1 o + right      unLmove k=2 i=1 o + right
    conj i=1 +                   cycle head
    stab k=0 +                   destab @3

The start/end words are not part of the text; a path file is replayed
against an explicitly supplied start word.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol, Union, runtime_checkable

from .errors import PathReplayError, WordParseError
from .rules import Direction, RuleFamily, RuleId, RuleStep, Site
from .words import BraidWord, validate


@runtime_checkable
class MoveStep(Protocol):
    def apply_to(self, word: BraidWord) -> BraidWord: ...
    def inverted(self) -> "MoveStep": ...
    def token(self) -> str: ...


@dataclass(frozen=True)
class LMoveStep:
    """Perform an L-move (:func:`tribraid.markov.l_move`)."""

    cut_index: int
    i: int
    flavor: str  # "o" | "u"
    sign: int
    shape: str  # "basic" | "left" | "right"

    def apply_to(self, word: BraidWord) -> BraidWord:
        from . import markov

        return markov.l_move(word, self.to_spec())

    def to_spec(self):
        from . import markov

        return markov.LMoveSpec(
            self.cut_index, self.i,
            markov.Flavor.OVER if self.flavor == "o" else markov.Flavor.UNDER,
            self.sign,
            {"basic": markov.Shape.BASIC, "left": markov.Shape.LEFT,
             "right": markov.Shape.RIGHT}[self.shape])

    def inverted(self) -> "UnLMoveStep":
        return UnLMoveStep(self.cut_index, self.i, self.flavor, self.sign, self.shape)

    def token(self) -> str:
        return (f"Lmove k={self.cut_index} i={self.i} {self.flavor} "
                f"{'+' if self.sign > 0 else '-'} {self.shape}")


@dataclass(frozen=True)
class UnLMoveStep:
    """Undo an L-move whose gadget sits at the recorded cut."""

    cut_index: int
    i: int
    flavor: str
    sign: int
    shape: str

    def apply_to(self, word: BraidWord) -> BraidWord:
        from . import markov

        return markov.undo_l_move(word, LMoveStep(
            self.cut_index, self.i, self.flavor, self.sign, self.shape).to_spec())

    def inverted(self) -> LMoveStep:
        return LMoveStep(self.cut_index, self.i, self.flavor, self.sign, self.shape)

    def token(self) -> str:
        return (f"unLmove k={self.cut_index} i={self.i} {self.flavor} "
                f"{'+' if self.sign > 0 else '-'} {self.shape}")


@dataclass(frozen=True)
class ConjStep:
    i: int
    sign: int

    def apply_to(self, word: BraidWord) -> BraidWord:
        from . import markov

        return markov.conjugate(word, self.i, self.sign)

    def inverted(self) -> "ConjStep":
        return ConjStep(self.i, -self.sign)

    def token(self) -> str:
        return f"conj i={self.i} {'+' if self.sign > 0 else '-'}"


@dataclass(frozen=True)
class CycleStep:
    end: str  # "head" | "tail"

    def apply_to(self, word: BraidWord) -> BraidWord:
        from . import markov

        return markov.cycle_sigma(word, self.end)

    def inverted(self) -> "CycleStep":
        return CycleStep("tail" if self.end == "head" else "head")

    def token(self) -> str:
        return f"cycle {self.end}"


@dataclass(frozen=True)
class StabStep:
    k: int
    sign: int

    def apply_to(self, word: BraidWord) -> BraidWord:
        from . import markov

        return markov.stabilize(word, self.k, self.sign)

    def inverted(self) -> "DestabStep":
        # after stabilization, the new crossing sits at letter k+1
        return DestabStep(self.k + 1)

    def token(self) -> str:
        return f"stab k={self.k} {'+' if self.sign > 0 else '-'}"


@dataclass(frozen=True)
class DestabStep:
    letter_index: int  # 1-based position of the stabilizing crossing

    def apply_to(self, word: BraidWord) -> BraidWord:
        from . import markov

        return markov.destabilize_at(word, self.letter_index)

    def inverted(self) -> StabStep:
        raise PathReplayError(
            "cannot invert a destab step without the removed crossing's sign")

    def invert_on(self, word: BraidWord) -> StabStep:
        """Inverse step, read off the concrete word it was applied to."""
        letter = word.letters[self.letter_index - 1]
        return StabStep(self.letter_index - 1, letter.sign)

    def token(self) -> str:
        return f"destab @{self.letter_index}"


StepT = Union[RuleStep, LMoveStep, UnLMoveStep, ConjStep, CycleStep, StabStep, DestabStep]


@dataclass(frozen=True)
class MovePath:
    """A replayable witness that ``end`` is reachable from ``start``."""

    start: BraidWord
    steps: tuple[StepT, ...]
    end: BraidWord

    def __post_init__(self) -> None:
        if not isinstance(self.steps, tuple):
            object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def __bool__(self) -> bool:
        # an empty path is still a path; don't let __len__ decide truth
        return True


def identity_path(word: BraidWord) -> MovePath:
    return MovePath(word, (), word)


def concat_paths(first: MovePath, second: MovePath) -> MovePath:
    if first.end != second.start:
        raise PathReplayError("paths do not join: first ends where second does not start")
    return MovePath(first.start, first.steps + second.steps, second.end)


def replay_steps(word: BraidWord, steps: Iterable[StepT]) -> BraidWord:
    """Apply ``steps`` in order, validating every intermediate word."""
    cur = word
    for idx, step in enumerate(steps, start=1):
        try:
            cur = step.apply_to(cur)
        except Exception as exc:
            raise PathReplayError(f"step {idx} ({step.token()}) failed: {exc}") from exc
        report = validate(cur)
        if not report.ok:
            raise PathReplayError(
                f"step {idx} ({step.token()}) produced an invalid word: {report.reason}")
    return cur


def replay(path: MovePath) -> BraidWord:
    """Replay ``path`` from its start; verify it ends at ``path.end``."""
    final = replay_steps(path.start, path.steps)
    if final != path.end:
        raise PathReplayError(
            f"path replay ended at {final}, expected {path.end}")
    return final


def invert_step(step: StepT, word_before: BraidWord) -> list[StepT]:
    """Exact inverse of one step, as a step sequence.

    Replaying the returned steps on ``step.apply_to(word_before)`` yields
    ``word_before`` letter-for-letter.  Most steps invert to a single step;
    conjugation needs two extra free reductions (conjugating back leaves
    cancelling pairs at both ends), and destabilization needs the concrete
    word to recover the removed crossing's sign.
    """
    if isinstance(step, ConjStep):
        length = len(word_before.letters)
        back = ConjStep(step.i, -step.sign)
        cancel = RuleId(RuleFamily.FREE_REDUCE, -step.sign)
        return [
            back,
            RuleStep(cancel, Site(1, Direction.LEFT_TO_RIGHT, step.i,
                                  sign_variant=-step.sign)),
            RuleStep(cancel, Site(length + 1, Direction.LEFT_TO_RIGHT, step.i,
                                  sign_variant=-step.sign)),
        ]
    if isinstance(step, DestabStep):
        return [step.invert_on(word_before)]
    return [step.inverted()]


def invert_steps(word_before: BraidWord, steps: Iterable[StepT]) -> list[StepT]:
    """Exact inverse of a step chain applied from ``word_before``.

    Replaying the result on the chain's final word returns to
    ``word_before`` exactly.
    """
    steps = list(steps)
    intermediates = [word_before]
    for st in steps:
        intermediates.append(st.apply_to(intermediates[-1]))
    out: list[StepT] = []
    for st, before in zip(reversed(steps), reversed(intermediates[:-1])):
        out.extend(invert_step(st, before))
    return out


# -- text form -------------------------------------------------------------

_RULE_TOKENS: dict[str, RuleId] = {}
for _fam in RuleFamily:
    if _fam is RuleFamily.FAR_COMMUTE:
        _RULE_TOKENS[_fam.value] = RuleId(_fam)
    else:
        _RULE_TOKENS[_fam.value + "+"] = RuleId(_fam, 1)
        _RULE_TOKENS[_fam.value + "-"] = RuleId(_fam, -1)


def _parse_sign(tok: str, line: int) -> int:
    if tok == "+":
        return 1
    if tok == "-":
        return -1
    raise WordParseError("expected '+' or '-'", line=line, token=tok)


def _parse_kv(tok: str, key: str, line: int) -> int:
    if not tok.startswith(key + "="):
        raise WordParseError(f"expected '{key}=<int>'", line=line, token=tok)
    try:
        return int(tok[len(key) + 1:])
    except ValueError:
        raise WordParseError(f"bad integer in '{key}='", line=line, token=tok) from None


def parse_step(text: str, line: int = 1) -> StepT:
    parts = text.split()
    if not parts:
        raise WordParseError("empty step line", line=line)
    head = parts[0]
    if head in _RULE_TOKENS:
        rule = _RULE_TOKENS[head]
        if len(parts) < 4 or not parts[1].startswith("@"):
            raise WordParseError("rule step needs '@<index> <dir> i=<i>'", line=line, token=text)
        try:
            letter_index = int(parts[1][1:])
        except ValueError:
            raise WordParseError("bad letter index", line=line, token=parts[1]) from None
        try:
            direction = Direction(parts[2])
        except ValueError:
            raise WordParseError("direction must be L2R or R2L", line=line, token=parts[2]) from None
        i = _parse_kv(parts[3], "i", line)
        j = _parse_kv(parts[4], "j", line) if len(parts) > 4 else None
        return RuleStep(rule, Site(letter_index, direction, i, j, rule.sign_variant))
    if head in ("Lmove", "unLmove"):
        if len(parts) != 6:
            raise WordParseError(f"{head} needs 'k=<k> i=<i> <o|u> <+|-> <shape>'", line=line, token=text)
        k = _parse_kv(parts[1], "k", line)
        i = _parse_kv(parts[2], "i", line)
        if parts[3] not in ("o", "u"):
            raise WordParseError("flavor must be 'o' or 'u'", line=line, token=parts[3])
        sign = _parse_sign(parts[4], line)
        if parts[5] not in ("basic", "left", "right"):
            raise WordParseError("shape must be basic, left or right", line=line, token=parts[5])
        cls = LMoveStep if head == "Lmove" else UnLMoveStep
        return cls(k, i, parts[3], sign, parts[5])
    if head == "conj":
        if len(parts) != 3:
            raise WordParseError("conj needs 'i=<i> <+|->'", line=line, token=text)
        return ConjStep(_parse_kv(parts[1], "i", line), _parse_sign(parts[2], line))
    if head == "cycle":
        if len(parts) != 2 or parts[1] not in ("head", "tail"):
            raise WordParseError("cycle needs 'head' or 'tail'", line=line, token=text)
        return CycleStep(parts[1])
    if head == "stab":
        if len(parts) != 3:
            raise WordParseError("stab needs 'k=<k> <+|->'", line=line, token=text)
        return StabStep(_parse_kv(parts[1], "k", line), _parse_sign(parts[2], line))
    if head == "destab":
        if len(parts) != 2 or not parts[1].startswith("@"):
            raise WordParseError("destab needs '@<index>'", line=line, token=text)
        try:
            return DestabStep(int(parts[1][1:]))
        except ValueError:
            raise WordParseError("bad letter index", line=line, token=parts[1]) from None
    raise WordParseError("unknown move token", line=line, token=head)


def serialize_steps(steps: Iterable[StepT]) -> str:
    return "".join(step.token() + "\n" for step in steps)


def parse_steps(text: str) -> tuple[StepT, ...]:
    steps: list[StepT] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        steps.append(parse_step(stripped, lineno))
    return tuple(steps)
