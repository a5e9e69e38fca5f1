"""The trivalent-braid isotopy relations as a bidirectional rewrite system.

Nine rule families act on words (see :mod:`.words`), writing ``c`` for a
crossing, ``y`` for a zip and ``l`` for an unzip, with ``s`` a crossing
sign:

==============  =============================  =====================
family          left pattern                   right pattern
==============  =============================  =====================
FreeReduce      ``c(i,s) c(i,-s)``             (empty)
R3              ``c(i,s) c(i+1,s) c(i,s)``     ``c(i+1,s) c(i,s) c(i+1,s)``
R5Zip           ``c(i,s) y(i)``                ``y(i)``
R5Unzip         ``l(i) c(i,s)``                ``l(i)``
R4ZipA          ``c(i,s) c(i+1,s) y(i)``       ``y(i+1) c(i,s)``
R4ZipB          ``c(i+1,s) c(i,s) y(i+1)``     ``y(i) c(i,s)``
R4UnzipA        ``l(i) c(i+1,s) c(i,s)``       ``c(i,s) l(i+1)``
R4UnzipB        ``l(i+1) c(i,s) c(i+1,s)``     ``c(i,s) l(i)``
FarCommute      ``a(i) b(j)``                  ``b(j') a(i')``
==============  =============================  =====================

FarCommute covers any two adjacent letters whose strand supports are
disjoint; it is implemented generically from support disjointness, with
indices renumbered through the zip/unzip strand maps (so, e.g., a zip at 1
followed by a crossing at 2 commutes to the crossing at 3 followed by the
zip).  Every rule is bidirectional: ``LeftToRight`` rewrites an occurrence
of the left pattern into the right one, ``RightToLeft`` the reverse.

Mixed-sign triangle moves such as ``c(i,s) c(i+1,s) c(i,-s) =
c(i+1,-s) c(i,s) c(i+1,s)`` are deliberately *not* primitive: they are
reachable in at most three primitive moves (insert a cancelling pair,
apply R3, cancel), and the bounded search in :mod:`.search` finds them.

Beyond matching and applying single rules, this module provides
``free_reduce`` (cancel all adjacent inverse crossing pairs) and
``comm_normal_form``, a cheap canonical form used to deduplicate search
states: free-reduce, then repeatedly pull the smallest front-movable
letter to the front through far-commutations, iterating both until stable.
The result is a deterministic representative of the word's
free-reduction/commutation class.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import SiteError
from .words import BraidWord, Letter, LetterKind, require_valid

_C = LetterKind.CROSSING
_Z = LetterKind.ZIP
_U = LetterKind.UNZIP


class RuleFamily(Enum):
    FREE_REDUCE = "FreeReduce"
    R3 = "R3"
    R5_ZIP = "R5Zip"
    R5_UNZIP = "R5Unzip"
    R4_ZIP_A = "R4ZipA"
    R4_ZIP_B = "R4ZipB"
    R4_UNZIP_A = "R4UnzipA"
    R4_UNZIP_B = "R4UnzipB"
    FAR_COMMUTE = "FarCommute"


#: families whose patterns carry a crossing-sign parameter
_SIGNED_FAMILIES = frozenset(
    {
        RuleFamily.FREE_REDUCE,
        RuleFamily.R3,
        RuleFamily.R5_ZIP,
        RuleFamily.R5_UNZIP,
        RuleFamily.R4_ZIP_A,
        RuleFamily.R4_ZIP_B,
        RuleFamily.R4_UNZIP_A,
        RuleFamily.R4_UNZIP_B,
    }
)


class Direction(Enum):
    LEFT_TO_RIGHT = "L2R"
    RIGHT_TO_LEFT = "R2L"

    def flipped(self) -> "Direction":
        if self is Direction.LEFT_TO_RIGHT:
            return Direction.RIGHT_TO_LEFT
        return Direction.LEFT_TO_RIGHT


@dataclass(frozen=True)
class RuleId:
    """One rule family, optionally pinned to a crossing-sign variant.

    ``sign_variant`` is +1 or -1 for the eight sign-carrying families and
    ``None`` for FarCommute (or to mean "either variant" when enumerating
    sites).
    """

    family: RuleFamily
    sign_variant: int | None = None

    def __post_init__(self) -> None:
        if self.sign_variant not in (None, 1, -1):
            raise ValueError(f"sign_variant must be +1, -1 or None, got {self.sign_variant!r}")
        if self.family is RuleFamily.FAR_COMMUTE and self.sign_variant is not None:
            raise ValueError("FarCommute has no sign variants")

    @property
    def token(self) -> str:
        if self.sign_variant is None:
            return self.family.value
        return self.family.value + ("+" if self.sign_variant > 0 else "-")


@dataclass(frozen=True)
class Site:
    """A concrete place where a rule applies.

    ``letter_index`` is the 1-based position of the first letter of the
    matched window (for the zero-length FreeReduce insertion window it is
    the position the new pair is inserted *before*, up to ``len+1``).
    ``i`` (and ``j`` for FarCommute) are the instantiated strand indices in
    the frame at the window start; ``sign_variant`` pins the crossing sign
    where the matched window alone does not (expansion directions).

    Applying a rule at a site and then the same rule at the same
    ``letter_index`` with flipped direction restores the original word.
    """

    letter_index: int
    direction: Direction
    i: int
    j: int | None = None
    sign_variant: int | None = None

    def flipped(self) -> "Site":
        return Site(self.letter_index, self.direction.flipped(), self.i, self.j, self.sign_variant)


@dataclass(frozen=True)
class RuleScheme:
    """Catalog entry: one family with its parameterized patterns."""

    rule: RuleId
    left: str
    right: str
    sign_variants: tuple[int, ...]
    note: str = ""


def rule_catalog() -> list[RuleScheme]:
    """All nine rule families with their left/right pattern schemas.

    Sign-carrying families list both crossing-sign variants; patterns are
    parameterized over the strand index ``i`` (and ``j`` for FarCommute).
    """
    both = (1, -1)
    return [
        RuleScheme(RuleId(RuleFamily.FREE_REDUCE), "c(i,s) c(i,-s)", "", both,
                   "adjacent inverse crossings cancel"),
        RuleScheme(RuleId(RuleFamily.R3), "c(i,s) c(i+1,s) c(i,s)", "c(i+1,s) c(i,s) c(i+1,s)", both,
                   "uniform-sign triangle move; mixed signs are derived moves"),
        RuleScheme(RuleId(RuleFamily.R5_ZIP), "c(i,s) y(i)", "y(i)", both,
                   "a crossing absorbs into the zip just below it"),
        RuleScheme(RuleId(RuleFamily.R5_UNZIP), "l(i) c(i,s)", "l(i)", both,
                   "a crossing absorbs into the unzip just above it"),
        RuleScheme(RuleId(RuleFamily.R4_ZIP_A), "c(i,s) c(i+1,s) y(i)", "y(i+1) c(i,s)", both,
                   "a zipped pair slides left over a strand"),
        RuleScheme(RuleId(RuleFamily.R4_ZIP_B), "c(i+1,s) c(i,s) y(i+1)", "y(i) c(i,s)", both,
                   "a zipped pair slides right over a strand"),
        RuleScheme(RuleId(RuleFamily.R4_UNZIP_A), "l(i) c(i+1,s) c(i,s)", "c(i,s) l(i+1)", both,
                   "an unzipped pair slides right under a strand"),
        RuleScheme(RuleId(RuleFamily.R4_UNZIP_B), "l(i+1) c(i,s) c(i+1,s)", "c(i,s) l(i)", both,
                   "an unzipped pair slides left under a strand"),
        RuleScheme(RuleId(RuleFamily.FAR_COMMUTE), "a(i) b(j)", "b(j') a(i')", (),
                   "any two letters with disjoint strand support commute;"
                   " indices shift through the zip/unzip renumbering"),
    ]


# -- strand-support bookkeeping -------------------------------------------


def letter_support(letter: Letter) -> tuple[int, ...]:
    """Strand positions the letter touches, in its entry frame."""
    if letter.kind is _U:
        return (letter.index,)
    return (letter.index, letter.index + 1)


def _pull_position(a: Letter, p: int) -> int | None:
    """Entry-frame position of ``a`` feeding its exit-frame position ``p``.

    ``None`` when position ``p`` is produced/absorbed by ``a`` itself.
    """
    i = a.index
    if a.kind is _C:
        if p == i:
            return i + 1
        if p == i + 1:
            return i
        return p
    if a.kind is _Z:
        if p < i:
            return p
        if p == i:
            return None
        return p + 1
    # unzip
    if p < i:
        return p
    if p in (i, i + 1):
        return None
    return p - 1


def _push_position(b: Letter, p: int) -> int:
    """Exit-frame position of ``b`` fed by its entry-frame position ``p``.

    Only valid when ``p`` avoids the support of ``b``.
    """
    q = b.index
    if b.kind is _C:
        return p
    if b.kind is _Z:
        return p if p < q else p - 1
    return p if p < q else p + 1


def _lift_past(a: Letter, b: Letter) -> Letter | None:
    """Express ``b`` (written after ``a``) in the frame before ``a``.

    Returns ``None`` when the supports meet, i.e. the letters do not
    far-commute.
    """
    supp_a = set(letter_support(a))
    pulled = []
    for p in letter_support(b):
        q = _pull_position(a, p)
        if q is None or q in supp_a:
            return None
        pulled.append(q)
    return Letter(b.kind, min(pulled), b.sign)


def _far_swap(a: Letter, b: Letter) -> tuple[tuple[Letter, Letter], int, int] | None:
    """Swap an adjacent far-commuting pair ``a b`` into ``b' a'``.

    Returns the swapped pair plus the site parameters ``(i, j)``: the two
    letters' strand indices in the shared entry frame, smaller first.
    ``None`` when the pair does not far-commute.
    """
    b_up = _lift_past(a, b)
    if b_up is None:
        return None
    a_down = Letter(a.kind, _push_position(b_up, a.index), a.sign)
    lo, hi = sorted((a.index, b_up.index))
    return (b_up, a_down), lo, hi


# -- matching and application ---------------------------------------------


def _match_window(letters: tuple[Letter, ...], k: int, family: RuleFamily,
                  direction: Direction, sign: int | None):
    """Try to match the (family, direction) pattern at 0-based offset ``k``.

    On success returns ``(window_len, i, j, matched_sign, replacement)``;
    otherwise ``None``.  ``sign`` restricts the crossing-sign variant
    (``None`` matches either, except for expansion windows that do not
    determine it, where ``None`` is rejected so callers must pin one).
    """
    n = len(letters)
    l2r = direction is Direction.LEFT_TO_RIGHT

    def cro(t: int):
        if t < n and letters[t].kind is _C:
            return letters[t]
        return None

    def ofkind(t: int, kind: LetterKind):
        if t < n and letters[t].kind is kind:
            return letters[t]
        return None

    if family is RuleFamily.FREE_REDUCE:
        if l2r:
            a, b = cro(k), cro(k + 1)
            if a and b and a.index == b.index and a.sign == -b.sign:
                if sign in (None, a.sign):
                    return (2, a.index, None, a.sign, ())
            return None
        # expansion: zero-length window, sign must be pinned by the caller
        if sign is None:
            return None
        return (0, None, None, sign, None)  # i filled in by caller context

    if family is RuleFamily.R3:
        a, b, c = cro(k), cro(k + 1), cro(k + 2)
        if not (a and b and c):
            return None
        if not (a.sign == b.sign == c.sign and (sign in (None, a.sign))):
            return None
        s = a.sign
        if l2r and a.index == c.index and b.index == a.index + 1:
            i = a.index
            return (3, i, None, s,
                    (Letter(_C, i + 1, s), Letter(_C, i, s), Letter(_C, i + 1, s)))
        if not l2r and a.index == c.index and a.index == b.index + 1:
            i = b.index
            return (3, i, None, s,
                    (Letter(_C, i, s), Letter(_C, i + 1, s), Letter(_C, i, s)))
        return None

    if family is RuleFamily.R5_ZIP:
        if l2r:
            a, z = cro(k), ofkind(k + 1, _Z)
            if a and z and a.index == z.index and sign in (None, a.sign):
                return (2, a.index, None, a.sign, (z,))
            return None
        z = ofkind(k, _Z)
        if z and sign is not None:
            return (1, z.index, None, sign, (Letter(_C, z.index, sign), z))
        return None

    if family is RuleFamily.R5_UNZIP:
        if l2r:
            u, a = ofkind(k, _U), cro(k + 1)
            if u and a and a.index == u.index and sign in (None, a.sign):
                return (2, u.index, None, a.sign, (u,))
            return None
        u = ofkind(k, _U)
        if u and sign is not None:
            return (1, u.index, None, sign, (u, Letter(_C, u.index, sign)))
        return None

    if family is RuleFamily.R4_ZIP_A:
        if l2r:
            a, b, z = cro(k), cro(k + 1), ofkind(k + 2, _Z)
            if (a and b and z and a.sign == b.sign and sign in (None, a.sign)
                    and b.index == a.index + 1 and z.index == a.index):
                i, s = a.index, a.sign
                return (3, i, None, s, (Letter(_Z, i + 1), Letter(_C, i, s)))
            return None
        z, a = ofkind(k, _Z), cro(k + 1)
        if (z and a and sign in (None, a.sign) and z.index == a.index + 1):
            i, s = a.index, a.sign
            return (2, i, None, s,
                    (Letter(_C, i, s), Letter(_C, i + 1, s), Letter(_Z, i)))
        return None

    if family is RuleFamily.R4_ZIP_B:
        if l2r:
            b, a, z = cro(k), cro(k + 1), ofkind(k + 2, _Z)
            if (b and a and z and a.sign == b.sign and sign in (None, a.sign)
                    and b.index == a.index + 1 and z.index == a.index + 1):
                i, s = a.index, a.sign
                return (3, i, None, s, (Letter(_Z, i), Letter(_C, i, s)))
            return None
        z, a = ofkind(k, _Z), cro(k + 1)
        if (z and a and sign in (None, a.sign) and z.index == a.index):
            i, s = a.index, a.sign
            return (2, i, None, s,
                    (Letter(_C, i + 1, s), Letter(_C, i, s), Letter(_Z, i + 1)))
        return None

    if family is RuleFamily.R4_UNZIP_A:
        if l2r:
            u, b, a = ofkind(k, _U), cro(k + 1), cro(k + 2)
            if (u and b and a and a.sign == b.sign and sign in (None, a.sign)
                    and b.index == a.index + 1 and u.index == a.index):
                i, s = a.index, a.sign
                return (3, i, None, s, (Letter(_C, i, s), Letter(_U, i + 1)))
            return None
        a, u = cro(k), ofkind(k + 1, _U)
        if (a and u and sign in (None, a.sign) and u.index == a.index + 1):
            i, s = a.index, a.sign
            return (2, i, None, s,
                    (Letter(_U, i), Letter(_C, i + 1, s), Letter(_C, i, s)))
        return None

    if family is RuleFamily.R4_UNZIP_B:
        if l2r:
            u, a, b = ofkind(k, _U), cro(k + 1), cro(k + 2)
            if (u and a and b and a.sign == b.sign and sign in (None, a.sign)
                    and b.index == a.index + 1 and u.index == a.index + 1):
                i, s = a.index, a.sign
                return (3, i, None, s, (Letter(_C, i, s), Letter(_U, i)))
            return None
        a, u = cro(k), ofkind(k + 1, _U)
        if (a and u and sign in (None, a.sign) and u.index == a.index):
            i, s = a.index, a.sign
            return (2, i, None, s,
                    (Letter(_U, i + 1), Letter(_C, i, s), Letter(_C, i + 1, s)))
        return None

    if family is RuleFamily.FAR_COMMUTE:
        if k + 1 >= n:
            return None
        swap = _far_swap(letters[k], letters[k + 1])
        if swap is None:
            return None
        (b_up, a_down), lo, hi = swap
        return (2, lo, hi, None, (b_up, a_down))

    raise AssertionError(f"unhandled family {family!r}")


def find_sites(word: BraidWord, rule: RuleId | RuleFamily, *,
               start_range: tuple[int, int] | None = None,
               _checked: bool = True) -> list[Site]:
    """All sites where ``rule`` applies, in (letter_index, direction,
    variant) order.

    Passing a family (or a RuleId with ``sign_variant=None``) enumerates
    both sign variants.  Pure-insertion windows (FreeReduce right-to-left)
    are never returned, so an identity word has no sites; the search layer
    constructs those sites directly.

    ``start_range`` restricts matching to windows whose 0-based start lies
    in ``[lo, hi)`` — a performance filter for callers that only care about
    a local region.
    """
    if isinstance(rule, RuleFamily):
        rule = RuleId(rule, None)
    if _checked:
        require_valid(word)
    letters = word.letters
    if rule.sign_variant is not None:
        signs: tuple[int, ...] = (rule.sign_variant,)
    elif rule.family in _SIGNED_FAMILIES:
        signs = (1, -1)
    else:
        signs = (0,)  # placeholder single pass for FarCommute
    sites: list[Site] = []
    lo, hi = (0, len(letters)) if start_range is None else start_range
    for k in range(max(0, lo), min(len(letters), hi)):
        for direction in (Direction.LEFT_TO_RIGHT, Direction.RIGHT_TO_LEFT):
            if rule.family is RuleFamily.FAR_COMMUTE and direction is Direction.RIGHT_TO_LEFT:
                continue  # the swap is symmetric; list each window once
            seen: set[tuple] = set()
            for s in signs:
                m = _match_window(letters, k, rule.family,
                                  direction, None if s == 0 else s)
                if m is None:
                    continue
                wlen, i, j, msign, _repl = m
                if wlen == 0:
                    continue  # insertion windows are not enumerated
                key = (i, j, msign)
                if key in seen:
                    continue  # sign=None matched the same concrete window twice
                seen.add(key)
                sites.append(Site(k + 1, direction, i, j,
                                  msign if rule.family in _SIGNED_FAMILIES else None))
    sites.sort(key=lambda s: (s.letter_index, s.direction.value, s.i,
                              s.j if s.j is not None else -1,
                              0 if (s.sign_variant or 1) > 0 else 1))
    return sites


def apply(word: BraidWord, rule: RuleId | RuleFamily, site: Site) -> BraidWord:
    """Apply ``rule`` at ``site``; raises :class:`SiteError` when stale.

    The site's direction is respected: ``LeftToRight`` rewrites the left
    pattern into the right, ``RightToLeft`` the reverse.  The FreeReduce
    expansion (inserting a cancelling pair at an arbitrary boundary) is
    accepted here although ``find_sites`` never enumerates it.
    """
    if isinstance(rule, RuleFamily):
        rule = RuleId(rule, site.sign_variant)
    require_valid(word)
    letters = word.letters
    k = site.letter_index - 1
    sign = site.sign_variant if site.sign_variant is not None else rule.sign_variant

    if rule.family is RuleFamily.FREE_REDUCE and site.direction is Direction.RIGHT_TO_LEFT:
        # zero-length window: insert c(i,s) c(i,-s) before position k+1
        if not 0 <= k <= len(letters):
            raise SiteError(f"insertion point {site.letter_index} outside word of length {len(letters)}")
        if sign is None:
            raise SiteError("FreeReduce insertion requires a pinned sign variant")
        live = word.top_count + sum(l.count_delta for l in letters[:k])
        if site.i + 1 > live:
            raise SiteError(
                f"cannot insert crossing at {site.i}: only {live} strands live at letter {site.letter_index}")
        pair = (Letter(_C, site.i, sign), Letter(_C, site.i, -sign))
        return word.replace_letters(letters[:k] + pair + letters[k:])

    if not 0 <= k < len(letters):
        raise SiteError(f"site index {site.letter_index} outside word of length {len(letters)}")
    m = _match_window(letters, k, rule.family, site.direction, sign)
    if m is None:
        raise SiteError(
            f"stale site: {rule.token} {site.direction.value} does not match at letter {site.letter_index}")
    wlen, i, j, _msign, repl = m
    if i != site.i or (rule.family is RuleFamily.FAR_COMMUTE and j != site.j):
        raise SiteError(
            f"stale site: pattern at letter {site.letter_index} has parameters"
            f" i={i}, j={j}, site expected i={site.i}, j={site.j}")
    return word.replace_letters(letters[:k] + tuple(repl) + letters[k + wlen:])


# -- replayable single steps ----------------------------------------------


@dataclass(frozen=True)
class RuleStep:
    """One isotopy-rule application, replayable on a concrete word."""

    rule: RuleId
    site: Site

    def apply_to(self, word: BraidWord) -> BraidWord:
        return apply(word, self.rule, self.site)

    def inverted(self) -> "RuleStep":
        return RuleStep(self.rule, self.site.flipped())

    def token(self) -> str:
        parts = [self.rule.token, f"@{self.site.letter_index}", self.site.direction.value,
                 f"i={self.site.i}"]
        if self.site.j is not None:
            parts.append(f"j={self.site.j}")
        return " ".join(parts)


# -- free reduction and the commutation normal form ------------------------


def free_reduce_with_trace(word: BraidWord) -> tuple[BraidWord, list[RuleStep]]:
    """Cancel all adjacent inverse crossing pairs, recording each step."""
    stack: list[Letter] = []
    steps: list[RuleStep] = []
    for letter in word.letters:
        top = stack[-1] if stack else None
        if (top is not None and letter.kind is _C and top.kind is _C
                and top.index == letter.index and top.sign == -letter.sign):
            steps.append(RuleStep(
                RuleId(RuleFamily.FREE_REDUCE, top.sign),
                Site(len(stack), Direction.LEFT_TO_RIGHT, letter.index,
                     sign_variant=top.sign)))
            stack.pop()
        else:
            stack.append(letter)
    return word.replace_letters(stack), steps


def free_reduce(word: BraidWord) -> BraidWord:
    """Shortest free reduction of ``word``: no cancelling pair remains."""
    require_valid(word)
    return free_reduce_with_trace(word)[0]


def _extract_with_trace(word: BraidWord) -> tuple[BraidWord, list[RuleStep]]:
    """Greedy front extraction through far-commutations.

    Repeatedly find the letter with the smallest front form (its shape once
    commuted all the way to the front of the unfinalized suffix), move it
    there, and finalize it.  Deterministic; yields a canonical
    representative of the commutation class.
    """
    letters = list(word.letters)
    steps: list[RuleStep] = []
    frozen = 0
    while frozen < len(letters):
        best_key = None
        best_t = frozen
        for t in range(frozen, len(letters)):
            form = letters[t]
            ok = True
            for u in range(t - 1, frozen - 1, -1):
                lifted = _lift_past(letters[u], form)
                if lifted is None:
                    ok = False
                    break
                form = lifted
            if ok:
                key = form.sort_key()
                if best_key is None or key < best_key:
                    best_key, best_t = key, t
        for pos in range(best_t, frozen, -1):
            swap = _far_swap(letters[pos - 1], letters[pos])
            assert swap is not None, "front-movable letter failed to swap"
            (b_up, a_down), lo, hi = swap
            letters[pos - 1], letters[pos] = b_up, a_down
            steps.append(RuleStep(
                RuleId(RuleFamily.FAR_COMMUTE),
                Site(pos, Direction.LEFT_TO_RIGHT, lo, hi)))
        frozen += 1
    return word.replace_letters(letters), steps


def comm_normal_form_with_trace(word: BraidWord) -> tuple[BraidWord, list[RuleStep]]:
    """As :func:`comm_normal_form`, also returning the replayable trace."""
    steps: list[RuleStep] = []
    cur = word
    while True:
        reduced, st = free_reduce_with_trace(cur)
        steps.extend(st)
        extracted, st = _extract_with_trace(reduced)
        steps.extend(st)
        if extracted == cur:
            return cur, steps
        cur = extracted


def comm_normal_form(word: BraidWord) -> BraidWord:
    """Deterministic canonical form of the free-reduction/commutation class.

    Free-reduces, then pulls the smallest front-movable letter to the front
    through far-commutations (repeating both phases until stable, since
    commuting can surface new cancelling pairs).  Idempotent; two words in
    the same class normalize identically, which is what the search layer
    uses for state deduplication.
    """
    require_valid(word)
    return comm_normal_form_with_trace(word)[0]


def word_order_key(word: BraidWord):
    """The total order used by canonicalization: length, then letter keys."""
    return (len(word.letters), tuple(l.sort_key() for l in word.letters))
