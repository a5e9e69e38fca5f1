"""Budgeted bidirectional search over words modulo the rewrite rules.

Equivalence of trivalent-braid words under the isotopy rules (and, in
:mod:`.markov`, under the larger move sets) is only semi-decided here: the
search explores words breadth-first from both endpoints, deduplicating
states by their commutation normal form, and stops when the frontiers meet
or a budget runs out.  Budget exhaustion is an ordinary verdict, never an
error.

Every edge the search takes is recorded as replayable steps (the move
itself plus the normalization trace down to the canonical representative),
so an ``Equivalent`` verdict always carries a :class:`~.moves.MovePath`
that replays from one input word to the other exactly.  Paths are replayed
once before the verdict is returned.

Because several rule families lengthen words (R5 and R4 right-to-left) and
the mixed-sign triangle moves are derived rather than primitive, the
neighbor set also includes insertions of cancelling crossing pairs at
every boundary, bounded by the budget's maximum word length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .moves import MovePath, StepT, invert_steps, replay
from .rules import (Direction, RuleFamily, RuleId, RuleStep, Site, apply,
                    comm_normal_form_with_trace, find_sites, word_order_key)
from .words import BraidWord, Letter, LetterKind, strand_profile

#: CLI-facing defaults; see the ``--depth/--max-len/--max-states`` options.
DEFAULT_BUDGET_DEPTH = 6
DEFAULT_BUDGET_WORD_LEN = 24
DEFAULT_BUDGET_STATES = 200_000


@dataclass(frozen=True)
class SearchBudget:
    """Hard limits for one equivalence search.

    ``max_depth`` bounds the number of moves taken from *either* endpoint,
    ``max_word_len`` prunes any expansion whose raw word grows longer, and
    ``max_states`` caps the number of distinct canonical words stored.
    """

    max_depth: int = DEFAULT_BUDGET_DEPTH
    max_word_len: int = DEFAULT_BUDGET_WORD_LEN
    max_states: int = DEFAULT_BUDGET_STATES

    def __post_init__(self) -> None:
        for name in ("max_depth", "max_word_len", "max_states"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class Verdict:
    """Outcome of a budgeted equivalence search."""

    equivalent: bool
    path: MovePath | None
    states_visited: int
    reason: str = ""

    @classmethod
    def found(cls, path: MovePath, states: int) -> "Verdict":
        return cls(True, path, states)

    @classmethod
    def exhausted(cls, states: int, reason: str = "budget exhausted") -> "Verdict":
        return cls(False, None, states, reason)

    def __bool__(self) -> bool:
        return self.equivalent


#: an edge is one or more steps applied in sequence
Edge = tuple[StepT, ...]
NeighborFn = Callable[[BraidWord], Iterator[tuple[Edge, BraidWord]]]


def isotopy_neighbor_steps(word: BraidWord, max_word_len: int) -> Iterator[tuple[Edge, BraidWord]]:
    """All rule-move successors of ``word``, in deterministic order.

    Single-rule applications come first.  Because search states are
    deduplicated modulo free reduction, inserting a bare cancelling pair
    would collapse straight back to ``word``; the derived moves that need a
    temporary pair (mixed-sign triangle moves and friends) are therefore
    generated as two-step composite edges: insert the pair, then apply one
    rule whose window overlaps it.  Composites whose result still
    normalizes back to ``word`` are cheap duplicate hits and are left to
    the engine's dedup.
    """
    for family in RuleFamily:
        rule = RuleId(family)
        for site in find_sites(word, rule):
            concrete = RuleId(family, site.sign_variant)
            yield (RuleStep(concrete, site),), apply(word, concrete, site)
    if len(word.letters) + 2 > max_word_len:
        return
    profile = strand_profile(word)
    for k in range(1, len(word.letters) + 2):
        live = profile[k - 1]
        for i in range(1, live):
            for s in (1, -1):
                rule = RuleId(RuleFamily.FREE_REDUCE, s)
                insert_site = Site(k, Direction.RIGHT_TO_LEFT, i, sign_variant=s)
                insert_step = RuleStep(rule, insert_site)
                pair = (Letter(LetterKind.CROSSING, i, s),
                        Letter(LetterKind.CROSSING, i, -s))
                letters = word.letters
                grown = word.replace_letters(letters[:k - 1] + pair + letters[k - 1:])
                # rules whose window overlaps the inserted pair (0-based
                # positions k-1 and k; windows are at most 3 letters long)
                window = (k - 3, k + 1)
                for family in RuleFamily:
                    rule2 = RuleId(family)
                    for site in find_sites(grown, rule2, start_range=window,
                                           _checked=False):
                        if family is RuleFamily.FREE_REDUCE and site.letter_index == k:
                            continue  # would just cancel the pair again
                        concrete = RuleId(family, site.sign_variant)
                        yield ((insert_step, RuleStep(concrete, site)),
                               apply(grown, concrete, site))


@dataclass
class _Node:
    depth: int
    parent: BraidWord | None
    # forward side: steps replaying parent -> this canonical word
    # backward side: steps replaying this canonical word -> parent
    steps: tuple[StepT, ...]


def _chain_to_root(table: dict[BraidWord, _Node], key: BraidWord) -> list[tuple[BraidWord, _Node]]:
    chain = []
    while True:
        node = table[key]
        chain.append((key, node))
        if node.parent is None:
            return chain
        key = node.parent


def bidirectional_search(w1: BraidWord, w2: BraidWord, neighbors: NeighborFn,
                         budget: SearchBudget) -> Verdict:
    """Meet-in-the-middle search from ``w1`` and ``w2`` over ``neighbors``.

    The caller's neighbor function must yield ``(step, raw_word)`` pairs in
    a deterministic order; every yielded step must be invertible through
    :func:`~.moves.invert_steps` so backward edges replay exactly.
    """
    k1, t1 = comm_normal_form_with_trace(w1)
    k2, t2 = comm_normal_form_with_trace(w2)

    fwd: dict[BraidWord, _Node] = {k1: _Node(0, None, ())}
    bwd: dict[BraidWord, _Node] = {k2: _Node(0, None, ())}
    states = 2 if k1 != k2 else 1

    def assemble(meet: BraidWord) -> Verdict:
        steps: list[StepT] = list(t1)
        for key, node in reversed(_chain_to_root(fwd, meet)):
            steps.extend(node.steps)
        for key, node in _chain_to_root(bwd, meet):
            steps.extend(node.steps)
        steps.extend(invert_steps(w2, t2))
        path = MovePath(w1, tuple(steps), w2)
        replay(path)  # verify before reporting
        return Verdict.found(path, states)

    if k1 == k2:
        return assemble(k1)

    frontiers = {True: [k1], False: [k2]}  # True = forward side
    depths = {True: 0, False: 0}

    while frontiers[True] or frontiers[False]:
        # expand the smaller live frontier; forward on ties
        candidates = [side for side in (True, False)
                      if frontiers[side] and depths[side] < budget.max_depth]
        if not candidates:
            break
        side = min(candidates, key=lambda s: (len(frontiers[s]), not s))
        here, there = (fwd, bwd) if side else (bwd, fwd)
        next_frontier: list[BraidWord] = []
        for state in sorted(frontiers[side], key=word_order_key):
            for steps, raw in neighbors(state):
                if len(raw.letters) > budget.max_word_len:
                    continue
                canon, trace = comm_normal_form_with_trace(raw)
                if canon in here:
                    continue
                if side:
                    edge = tuple([*steps, *trace])
                else:
                    edge = tuple(invert_steps(state, [*steps, *trace]))
                here[canon] = _Node(depths[side] + 1, state, edge)
                states += 1
                if canon in there:
                    return assemble(canon)
                if states >= budget.max_states:
                    return Verdict.exhausted(states, "state budget exhausted")
                next_frontier.append(canon)
        frontiers[side] = next_frontier
        depths[side] += 1

    return Verdict.exhausted(states, "depth budget exhausted")


def isotopic_bounded(w1: BraidWord, w2: BraidWord, budget: SearchBudget | None = None) -> Verdict:
    """Budgeted check that two words differ by isotopy rules alone.

    Words with different boundary strand counts are never isotopic, so
    those exhaust immediately with a reason rather than searching.
    """
    budget = budget or SearchBudget()
    if w1.top_count != w2.top_count or w1.bottom_count != w2.bottom_count:
        return Verdict.exhausted(
            0, f"boundary mismatch: ({w1.top_count},{w1.bottom_count}) vs"
            f" ({w2.top_count},{w2.bottom_count})")

    def neighbors(word: BraidWord) -> Iterator[tuple[StepT, BraidWord]]:
        return isotopy_neighbor_steps(word, budget.max_word_len)

    return bidirectional_search(w1, w2, neighbors, budget)
