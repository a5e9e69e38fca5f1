"""Closure-preserving moves on closable words and their budgeted searches.

Two closable words have isotopic closures exactly when they are related by
braid isotopy together with *L-moves*; an L-move cuts one strand at a
chosen level, pulls the severed ends out to the right edge, and adds a new
vertical strand there.  In word form (the vertical strand slid fully to
the right) the move replaces ``u · v`` by ``u⁺ · A · c · B · v⁺`` where

* ``u, v`` split the word at the cut level (``⁺`` embeds one extra strand
  on the right),
* ``A = c(m,δin) c(m-1,δin) … c(i+1,δin)`` routes the new strand from the
  right edge to position ``i+1``,
* ``c = c(i, sign)`` is the move's own crossing with the cut strand, and
* ``B = c(i+1,δout) … c(m,δout)`` routes the severed upper end out to the
  edge.

The routing signs ``(δin, δout)`` are fixed by the flavor: an *over* move
routes both traveling strands over everything they pass, an *under* move
under; with our crossing convention (positive crossing: the strand
entering on the left passes over) that gives Over ⇒ (−1, +1) and Under ⇒
(+1, −1).  The *shape* picks the handedness of ``c``: ``Right`` uses the
requested sign, ``Left`` is its mirror (sign negated), and ``Basic`` uses
the flavor's default (the new strand passes over for an over move, under
for an under move).

The same closure classes are generated by the algebraic Markov moves:
elementary conjugation by a crossing, cycling a leading/trailing crossing
around the closure, and right stabilization ``u · v ↔ u⁺ · c(n,±1) · v⁺``
at a full-width level.  Both move sets are exposed as budgeted
bidirectional searches returning replayable paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import MoveError
from .moves import (ConjStep, CycleStep, DestabStep, LMoveStep, MovePath,
                    StabStep, StepT, UnLMoveStep, concat_paths, replay)
from .search import (SearchBudget, Verdict, bidirectional_search,
                     isotopy_neighbor_steps, isotopic_bounded)
from .words import (BraidWord, Letter, LetterKind, require_valid,
                    strand_profile)

_C = LetterKind.CROSSING


class Flavor(Enum):
    OVER = "o"
    UNDER = "u"


class Shape(Enum):
    BASIC = "basic"
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class GadgetSigns:
    """Routing-crossing signs for one L-move flavor."""

    delta_in: int
    delta_out: int


def gadget_signs(flavor: Flavor) -> GadgetSigns:
    if flavor is Flavor.OVER:
        return GadgetSigns(-1, +1)
    return GadgetSigns(+1, -1)


@dataclass(frozen=True)
class LMoveSpec:
    """Where and how to perform one L-move.

    ``cut_index`` is a letter boundary (0..#letters); the cut happens on
    the strand at position ``i`` of that level.  Boundaries between letters
    never sit on a vertex, so the cut always lands on a strand.
    """

    cut_index: int
    i: int
    flavor: Flavor
    sign: int
    shape: Shape = Shape.RIGHT

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError(f"L-move sign must be +1 or -1, got {self.sign!r}")

    def crossing_sign(self) -> int:
        """The sign of the move's own crossing ``c`` under the shape rules."""
        if self.shape is Shape.RIGHT:
            return self.sign
        if self.shape is Shape.LEFT:
            return -self.sign
        return -1 if self.flavor is Flavor.OVER else +1

    def as_step(self) -> LMoveStep:
        return LMoveStep(self.cut_index, self.i, self.flavor.value, self.sign,
                         self.shape.value)

    def as_undo_step(self) -> UnLMoveStep:
        return UnLMoveStep(self.cut_index, self.i, self.flavor.value, self.sign,
                           self.shape.value)


def _gadget_letters(m: int, spec: LMoveSpec) -> tuple[Letter, ...]:
    """The inserted letters ``A · c · B`` at a level with ``m`` strands."""
    signs = gadget_signs(spec.flavor)
    route_in = [Letter(_C, p, signs.delta_in) for p in range(m, spec.i, -1)]
    route_out = [Letter(_C, p, signs.delta_out) for p in range(spec.i + 1, m + 1)]
    return tuple(route_in) + (Letter(_C, spec.i, spec.crossing_sign()),) + tuple(route_out)


def _require_closable(word: BraidWord, what: str) -> None:
    if not word.is_closable:
        raise MoveError(
            f"{what} requires a closable word; this one runs"
            f" {word.top_count} -> {word.bottom_count} strands")


def l_move(word: BraidWord, spec: LMoveSpec) -> BraidWord:
    """Perform the L-move ``spec`` on a closable word.

    The result lives on one more strand and has an isotopic closure.
    """
    profile = require_valid(word)
    _require_closable(word, "an L-move")
    if not 0 <= spec.cut_index <= len(word.letters):
        raise MoveError(
            f"cut index {spec.cut_index} outside 0..{len(word.letters)}")
    m = profile[spec.cut_index]
    if not 1 <= spec.i <= m:
        raise MoveError(
            f"cut strand {spec.i} outside 1..{m} at level {spec.cut_index}")
    u = word.letters[: spec.cut_index]
    v = word.letters[spec.cut_index:]
    return BraidWord(word.top_count + 1, u + _gadget_letters(m, spec) + v)


@dataclass(frozen=True)
class LReduction:
    """A syntactic occurrence of an L-move gadget, ready to undo."""

    cut_index: int
    i: int
    flavor: Flavor
    sign: int
    shape: Shape
    length: int  # letters occupied by the gadget
    reduced: BraidWord

    def as_undo_step(self) -> UnLMoveStep:
        return UnLMoveStep(self.cut_index, self.i, self.flavor.value, self.sign,
                           self.shape.value)


def detect_l_reductions(word: BraidWord) -> list[LReduction]:
    """All cuts where the word is literally ``u⁺ · A · c · B · v⁺``.

    Matches are reported shape-``Right`` (the left/basic shapes produce the
    same letters under other sign parameters, so one canonical reading
    suffices); when the routing is empty both flavors match and ``Over`` is
    reported.
    """
    profile = require_valid(word)
    letters = word.letters
    found: list[LReduction] = []
    for k in range(0, len(letters) + 1):
        m = profile[k] - 1
        if m < 1:
            continue
        for i in range(1, m + 1):
            glen = 2 * (m - i) + 1
            if k + glen > len(letters):
                continue
            window = letters[k: k + glen]
            mid = window[m - i]
            if mid.kind is not _C or mid.index != i:
                continue
            for flavor in (Flavor.OVER, Flavor.UNDER):
                spec = LMoveSpec(k, i, flavor, mid.sign, Shape.RIGHT)
                if window != _gadget_letters(m, spec):
                    continue
                reduced = BraidWord(word.top_count - 1,
                                    letters[:k] + letters[k + glen:])
                from .words import validate

                if not validate(reduced).ok:
                    break  # the rest of the word uses the removed strand
                found.append(LReduction(k, i, flavor, mid.sign, Shape.RIGHT,
                                        glen, reduced))
                break  # with empty routing both flavors match; report one
    return found


def undo_l_move(word: BraidWord, descriptor: "LMoveSpec | LReduction") -> BraidWord:
    """Remove the L-move gadget described by ``descriptor``.

    Exact inverse of :func:`l_move` with the same spec.  Raises
    :class:`MoveError` when the gadget letters are not literally present or
    the remainder still uses the removed strand.
    """
    profile = require_valid(word)
    k, i = descriptor.cut_index, descriptor.i
    if not 0 <= k <= len(word.letters):
        raise MoveError(f"cut index {k} outside 0..{len(word.letters)}")
    m = profile[k] - 1
    if not 1 <= i <= m:
        raise MoveError(f"cut strand {i} outside 1..{m} at level {k}")
    spec = LMoveSpec(k, i, descriptor.flavor, descriptor.sign,
                     getattr(descriptor, "shape", Shape.RIGHT))
    glen = 2 * (m - i) + 1
    window = word.letters[k: k + glen]
    if window != _gadget_letters(m, spec):
        raise MoveError(
            f"no {spec.flavor.value}/{spec.shape.value} L-gadget at cut {k}, strand {i}")
    reduced = BraidWord(word.top_count - 1,
                        word.letters[:k] + word.letters[k + glen:])
    from .words import validate

    report = validate(reduced)
    if not report.ok:
        raise MoveError(
            f"cannot undo: remainder uses the removed strand ({report.reason})")
    return reduced


# -- algebraic Markov moves ------------------------------------------------


def conjugate(word: BraidWord, i: int, sign: int) -> BraidWord:
    """``c(i,sign) · word · c(i,-sign)``, an elementary conjugation."""
    require_valid(word)
    _require_closable(word, "conjugation")
    n = word.top_count
    if not 1 <= i <= n - 1:
        raise MoveError(f"conjugation strand {i} outside 1..{n - 1}")
    if sign not in (1, -1):
        raise MoveError(f"conjugation sign must be +1 or -1, got {sign!r}")
    return BraidWord(n, (Letter(_C, i, sign),) + word.letters + (Letter(_C, i, -sign),))


def cycle_sigma(word: BraidWord, end: str = "head") -> BraidWord:
    """Move a leading crossing to the tail (``head``) or back (``tail``).

    Realizes the closure identity "a crossing slides around the braid
    closure".  The moved letter must be a crossing, which (the word being
    closable) automatically sits at a full-width level.
    """
    require_valid(word)
    _require_closable(word, "cycling")
    if not word.letters:
        raise MoveError("cannot cycle an empty word")
    if end == "head":
        first = word.letters[0]
        if first.kind is not _C:
            raise MoveError(f"leading letter {first} is not a crossing")
        return word.replace_letters(word.letters[1:] + (first,))
    if end == "tail":
        last = word.letters[-1]
        if last.kind is not _C:
            raise MoveError(f"trailing letter {last} is not a crossing")
        return word.replace_letters((last,) + word.letters[:-1])
    raise MoveError(f"cycle end must be 'head' or 'tail', got {end!r}")


def stabilize(word: BraidWord, k: int, sign: int) -> BraidWord:
    """Insert ``c(n, sign)`` at letter boundary ``k``, on one more strand.

    The boundary must sit at a full-width level (all ``n`` strands live),
    so that the word splits as two closable sub-braids.
    """
    profile = require_valid(word)
    _require_closable(word, "stabilization")
    if sign not in (1, -1):
        raise MoveError(f"stabilization sign must be +1 or -1, got {sign!r}")
    n = word.top_count
    if not 0 <= k <= len(word.letters):
        raise MoveError(f"split index {k} outside 0..{len(word.letters)}")
    if profile[k] != n:
        raise MoveError(
            f"cannot stabilize at split {k}: level is {profile[k]}, not {n}")
    return BraidWord(n + 1, word.letters[:k] + (Letter(_C, n, sign),) + word.letters[k:])


def _destab_positions(word: BraidWord) -> list[int]:
    """1-based positions of letters removable as right stabilizations."""
    profile = strand_profile(word)
    n = word.top_count
    out = []
    for t, letter in enumerate(word.letters):
        if (letter.kind is _C and letter.index == n - 1 and profile[t] == n):
            from .words import validate

            reduced = BraidWord(n - 1, word.letters[:t] + word.letters[t + 1:])
            if validate(reduced).ok:
                out.append(t + 1)
    return out


def destabilize_at(word: BraidWord, letter_index: int) -> BraidWord:
    """Remove the stabilizing crossing at ``letter_index`` (1-based)."""
    require_valid(word)
    _require_closable(word, "destabilization")
    if letter_index not in _destab_positions(word):
        raise MoveError(
            f"letter {letter_index} is not a right stabilization of this word")
    return BraidWord(word.top_count - 1,
                     word.letters[: letter_index - 1] + word.letters[letter_index:])


def destabilize(word: BraidWord) -> list[BraidWord]:
    """All words obtainable by removing one right-stabilization crossing."""
    require_valid(word)
    _require_closable(word, "destabilization")
    return [destabilize_at(word, t) for t in _destab_positions(word)]


# -- budgeted equivalences -------------------------------------------------


def _tl_neighbors(budget: SearchBudget):
    def neighbors(word: BraidWord):
        yield from isotopy_neighbor_steps(word, budget.max_word_len)
        profile = strand_profile(word)
        for k in range(len(word.letters) + 1):
            m = profile[k]
            for i in range(1, m + 1):
                if len(word.letters) + 2 * (m - i) + 1 > budget.max_word_len:
                    continue
                for flavor in (Flavor.OVER, Flavor.UNDER):
                    for sign in (1, -1):
                        spec = LMoveSpec(k, i, flavor, sign, Shape.RIGHT)
                        yield (spec.as_step(),), l_move(word, spec)
        for red in detect_l_reductions(word):
            yield (red.as_undo_step(),), red.reduced

    return neighbors


def tl_equivalent_bounded(w1: BraidWord, w2: BraidWord,
                          budget: SearchBudget | None = None) -> Verdict:
    """Budgeted search for an isotopy + right-L-move path between words.

    L-moves change the strand count, so words on different strand numbers
    are legitimate candidates and nothing short-circuits.
    """
    budget = budget or SearchBudget()
    for w in (w1, w2):
        require_valid(w)
        _require_closable(w, "TL-equivalence")
    return bidirectional_search(w1, w2, _tl_neighbors(budget), budget)


def _markov_neighbors(budget: SearchBudget):
    def neighbors(word: BraidWord):
        yield from isotopy_neighbor_steps(word, budget.max_word_len)
        n = word.top_count
        if len(word.letters) + 2 <= budget.max_word_len:
            for i in range(1, n):
                for sign in (1, -1):
                    yield (ConjStep(i, sign),), conjugate(word, i, sign)
        if word.letters:
            if word.letters[0].kind is _C:
                yield (CycleStep("head"),), cycle_sigma(word, "head")
            if word.letters[-1].kind is _C:
                yield (CycleStep("tail"),), cycle_sigma(word, "tail")
        if len(word.letters) + 1 <= budget.max_word_len:
            profile = strand_profile(word)
            for k in range(len(word.letters) + 1):
                if profile[k] == n:
                    for sign in (1, -1):
                        yield (StabStep(k, sign),), stabilize(word, k, sign)
        for t in _destab_positions(word):
            yield (DestabStep(t),), destabilize_at(word, t)

    return neighbors


def markov_equivalent_bounded(w1: BraidWord, w2: BraidWord,
                              budget: SearchBudget | None = None) -> Verdict:
    """Budgeted search over isotopy + conjugation/cycling + (de)stabilization."""
    budget = budget or SearchBudget()
    for w in (w1, w2):
        require_valid(w)
        _require_closable(w, "Markov equivalence")
    return bidirectional_search(w1, w2, _markov_neighbors(budget), budget)


# -- the conjugation-from-L-moves derivation -------------------------------


def _bridge_fingerprint(word: BraidWord) -> tuple:
    """Invariants every braid-isotopy bridge must preserve.

    The vertex kind sequence (zips and unzips in order, crossings erased)
    is untouched by all nine rule families, which only create, destroy, or
    renumber crossings around the vertices.  A word with no vertices stays
    vertex-free under every rule, so there the induced strand permutation
    and the crossing exponent sum are additionally invariant.
    """
    kinds = tuple(l.kind for l in word.letters if l.kind is not _C)
    if kinds:
        return (kinds,)
    perm = list(range(1, word.top_count + 1))
    for letter in word.letters:
        for k, p in enumerate(perm):
            if p == letter.index:
                perm[k] = letter.index + 1
            elif p == letter.index + 1:
                perm[k] = letter.index
    return (kinds, tuple(perm), sum(l.sign for l in word.letters))


def derive_conjugation_via_lmoves(word: BraidWord, i: int, sign: int,
                                  budget: SearchBudget | None = None) -> MovePath:
    """Slide a boundary crossing around the closure using one L-move pair.

    For ``word = c(i,sign) · b`` the returned path ends at ``b · c(i,sign)``
    (and symmetrically for a trailing crossing, which is moved to the
    front).  The path has the three-phase form: one L-move, a braid-isotopy
    stretch, and one inverse (left-shape) L-move; replay is verified before
    returning.

    This is the single-enlargement derivation: it covers two-strand words
    and words whose vertices absorb the routing crossings, but a crossing
    conjugation on three or more vertex-free strands genuinely needs a
    longer chain of L-moves (the one-enlargement strand permutations never
    match), and then this raises :class:`MoveError`.
    """
    require_valid(word)
    _require_closable(word, "the conjugation derivation")
    budget = budget or SearchBudget()
    n = word.top_count
    if not 1 <= i <= n - 1:
        raise MoveError(f"conjugation strand {i} outside 1..{n - 1}")
    head = Letter(_C, i, sign)
    if word.letters and word.letters[0] == head:
        body = word.letters[1:]
        target = BraidWord(n, body + (head,))
    elif word.letters and word.letters[-1] == head:
        body = word.letters[:-1]
        target = BraidWord(n, (head,) + body)
    else:
        raise MoveError(
            f"word must start or end with the crossing c({i},{sign:+d})")

    # The geometric derivation cuts next to the moved crossing, slides the
    # new strand around, and undoes a mirror-shape move next to its landing
    # spot.  Enumerate the small family of cuts and strand indices near the
    # moved crossing on both sides, keep only pairs whose enlargements agree
    # on cheap isotopy invariants, and bridge those by plain isotopy with
    # iteratively deepened budgets so the cheap passes run over the whole
    # candidate list before any expensive search starts.
    cuts_src = dict.fromkeys([0, 1, len(word.letters)])
    cuts_dst = dict.fromkeys([len(target.letters),
                              max(len(target.letters) - 1, 0), 0])
    strands = [j for j in (i, i + 1, n) if j <= n]

    def enlarge(base, cuts, shape):
        out = []
        for k in cuts:
            for j in strands:
                for s in (sign, -sign):
                    spec = LMoveSpec(k, j, Flavor.OVER, s, shape)
                    try:
                        out.append((spec, l_move(base, spec)))
                    except MoveError:
                        pass
        return out

    enlarged_src = enlarge(word, cuts_src, Shape.RIGHT)
    enlarged_dst = enlarge(target, cuts_dst, Shape.LEFT)
    candidates = []
    for spec1, big1 in enlarged_src:
        fp1 = _bridge_fingerprint(big1)
        for spec2, big2 in enlarged_dst:
            if fp1 == _bridge_fingerprint(big2):
                candidates.append((spec1, big1, spec2, big2))

    ladder = [(1, 400), (2, 2000), (3, 8000),
              (budget.max_depth, budget.max_states)]
    for depth, states in ladder:
        if depth > budget.max_depth:
            break
        sub = SearchBudget(depth, budget.max_word_len,
                           min(states, budget.max_states))
        for spec1, big1, spec2, big2 in candidates:
            bridge = isotopic_bounded(big1, big2, sub)
            if not bridge:
                continue
            first = MovePath(word, (spec1.as_step(),), big1)
            last = MovePath(big2, (spec2.as_undo_step(),), target)
            path = concat_paths(concat_paths(first, bridge.path), last)
            replay(path)
            return path
    raise MoveError(
        "no single L-move pair bridges this conjugation within budget; the"
        " general case needs a longer L-move sequence")
