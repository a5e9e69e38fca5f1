"""Seeded random braid words and diagrams.

Everything here is a deterministic function of its seed: candidate
lists are built in a fixed order before the generator draws from them,
so equal seeds give byte-equal outputs across runs and platforms.

Random words are uniform over the admissible letters at each position;
for closable words the draw is filtered so the walk can still return
to its starting strand count in the letters that remain.  Random
diagrams close a random word and then disturb it with a short script of
distortion operations whose sites are discovered by rejection sampling
(an operation that cannot find a clear site just gives way to an affine
map, which always applies).
"""

from __future__ import annotations

import random
from fractions import Fraction

from .diagram import Diagram, closure
from .distort import (ArcFold, Curl, PythagoreanRotation, Scale, Shear, Swing,
                      Switch, Translate, Twirl, distort)
from .errors import DiagramError, SiteError, SiteObstructionError
from .words import BraidWord, Letter

__all__ = ["random_word", "random_diagram", "random_distortions"]


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_word(seed, *, letters: int = 8, top_count: int | None = None,
                max_strands: int = 5, closable: bool = True) -> BraidWord:
    """A uniformly random valid word of exactly ``letters`` letters.

    The strand count stays within [1, max_strands] throughout.  With
    ``closable`` the word ends on ``top_count`` strands again, which
    requires the admissible-letter filter below: a letter is only
    eligible while the remaining length can still absorb the distance
    back to the start.
    """
    rng = _rng(seed)
    if max_strands < 1:
        raise ValueError("max_strands must be positive")

    # feasible[r][mm]: some length-r suffix leads from mm strands back
    # to the chosen boundary within [1, max_strands].  A one-step
    # lookahead is not enough -- at one strand only unzips exist, so
    # parity can strand the walk -- but the full table filter is exact.
    def table(top: int):
        feas = [[False] * (max_strands + 2) for _ in range(letters + 1)]
        feas[0][top] = True
        for r in range(1, letters + 1):
            for mm in range(1, max_strands + 1):
                ok = mm >= 2 and (feas[r - 1][mm] or feas[r - 1][mm - 1])
                feas[r][mm] = ok or (mm < max_strands and feas[r - 1][mm + 1])
        return feas if feas[letters][top] else None

    if top_count is None:
        tops = list(range(1, min(3, max_strands) + 1))
        if closable:
            tops = [t for t in tops if table(t) is not None]
        if not tops:
            raise ValueError(
                f"no closable word with {letters} letters under "
                f"max_strands={max_strands}")
        top_count = tops[rng.randrange(len(tops))]
    if not 1 <= top_count <= max_strands:
        raise ValueError("top_count must lie in [1, max_strands]")
    feasible = None
    if closable:
        feasible = table(top_count)
        if feasible is None:
            raise ValueError(
                f"no closable word with {letters} letters from {top_count} "
                f"strand(s) under max_strands={max_strands}")

    m = top_count
    out: list[Letter] = []
    for k in range(letters):
        remaining = letters - k
        pool: list[Letter] = []
        for i in range(1, m):
            pool.append(Letter.crossing(i, 1))
            pool.append(Letter.crossing(i, -1))
        for i in range(1, m):
            pool.append(Letter.zip(i))
        if m < max_strands:
            for i in range(1, m + 1):
                pool.append(Letter.unzip(i))
        if closable:
            pool = [l for l in pool
                    if feasible[remaining - 1][m + l.count_delta]]
        if not pool:
            raise ValueError("no admissible letter; widen max_strands")
        letter = pool[rng.randrange(len(pool))]
        out.append(letter)
        m += letter.count_delta
    return BraidWord(top_count, tuple(out))


_TRIPLES = ((3, 4, 5), (4, 3, 5), (-3, 4, 5), (5, 12, 13), (8, 15, 17))


def _affine_op(rng: random.Random):
    kind = rng.randrange(3)
    if kind == 0:
        k = Fraction(rng.randrange(1, 5), rng.choice((7, 9, 11, 13)))
        if rng.randrange(2):
            k = -k
        return Shear(k, axis=rng.choice("xy"))
    if kind == 1:
        return PythagoreanRotation(_TRIPLES[rng.randrange(len(_TRIPLES))])
    return Translate(Fraction(rng.randrange(-3, 4)), Fraction(rng.randrange(-3, 4)))


def _try_sites(rng: random.Random, d: Diagram, builders, tries: int = 8):
    """Apply the first of ``tries`` randomly drawn candidate operations
    that is not obstructed; None when every attempt was."""
    for _ in range(tries):
        op = builders(rng)
        if op is None:
            return None
        try:
            return op, distort(d, [op])
        except (SiteError, SiteObstructionError, DiagramError, ValueError):
            continue
    return None


def _descending_segments(d: Diagram):
    out = []
    for a in d.arcs:
        for i, (p, q) in a.segments():
            if q[1] < p[1]:
                out.append((a.arc_id, i, p, q))
    return out


def random_distortions(seed, d: Diagram, count: int = 3):
    """A deterministic distortion script of ``count`` operations, each
    verified applicable in sequence; returns (ops, distorted diagram)."""
    rng = _rng(seed)
    ops = []
    cur = d
    for _ in range(count):
        menu = rng.randrange(6)
        picked = None
        if menu == 0:
            descending = _descending_segments(cur)

            def fold(rng, descending=descending):
                if not descending:
                    return None
                aid, i, p, q = descending[rng.randrange(len(descending))]
                return ArcFold(aid, i,
                               t0=Fraction(rng.randrange(2, 5), 12),
                               t1=Fraction(rng.randrange(7, 10), 12),
                               depth=Fraction(1, rng.choice((3, 4, 5))),
                               offset=Fraction(rng.choice((-1, 1)),
                                               rng.choice((3, 4, 5))))

            picked = _try_sites(rng, cur, fold)
        elif menu == 1:
            segs = [(a.arc_id, i) for a in cur.arcs
                    for i, _ in a.segments()]

            def curl(rng, segs=segs):
                aid, i = segs[rng.randrange(len(segs))]
                return Curl(aid, i, t=Fraction(rng.randrange(2, 5), 6),
                            width=Fraction(1, rng.choice((8, 10, 12))),
                            side=rng.choice((1, -1)), sign=rng.choice((1, -1)))

            picked = _try_sites(rng, cur, curl)
        elif menu == 2:
            bends = [(a.arc_id, k) for a in cur.arcs
                     for k in range(1, len(a.points) - 1)]

            def swing(rng, bends=bends):
                if not bends:
                    return None
                aid, k = bends[rng.randrange(len(bends))]
                old = cur.arc(aid).points[k]
                dx = Fraction(rng.randrange(-2, 3), rng.choice((5, 7, 9)))
                dy = Fraction(rng.randrange(-2, 3), rng.choice((5, 7, 9)))
                if dx == 0 and dy == 0:
                    return None
                return Swing(aid, k, (old[0] + dx, old[1] + dy))

            picked = _try_sites(rng, cur, swing)
        elif menu == 3 and cur.vertices:
            vids = sorted(v.node_id for v in cur.vertices)

            def twirl(rng, vids=vids):
                return Twirl(vids[rng.randrange(len(vids))],
                             sign=rng.choice((1, -1)))

            picked = _try_sites(rng, cur, twirl)
        elif menu == 4 and cur.crossings:
            xids = sorted(c.node_id for c in cur.crossings)

            def switch(rng, xids=xids):
                return Switch(xids[rng.randrange(len(xids))])

            picked = _try_sites(rng, cur, switch, tries=4)
        if picked is None:
            op = _affine_op(rng)
            picked = op, distort(cur, [op])
        op, cur = picked
        ops.append(op)
    return ops, cur


def random_diagram(seed, *, letters: int = 4, max_strands: int = 4,
                   distortions: int = 3) -> Diagram:
    """Close a random word and disturb it with a random script."""
    rng = _rng(seed)
    w = random_word(rng, letters=letters, max_strands=max_strands,
                    closable=True)
    _, d = random_distortions(rng, closure(w), distortions)
    return d
