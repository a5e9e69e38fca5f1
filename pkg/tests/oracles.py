"""Independent reference implementations used to cross-check the library.

Everything in this module is deliberately written from scratch against the
rewriting rules themselves, without importing any of the library's site or
path machinery, so that agreement between the two is meaningful.  Words are
plain ``(top_count, letters)`` pairs where each letter is a tuple
``('c', i, s)``, ``('z', i)`` or ``('u', i)``.
"""

from __future__ import annotations

from collections import deque


# ---------------------------------------------------------------------------
# basic word bookkeeping


def naive_profile(top, letters):
    """Strand counts between letters, or None if some letter is illegal."""
    counts = [top]
    m = top
    for letter in letters:
        kind, i = letter[0], letter[1]
        if kind == 'c':
            if not 1 <= i <= m - 1:
                return None
            # strand count unchanged
        elif kind == 'z':
            if not 1 <= i <= m - 1:
                return None
            m -= 1
        elif kind == 'u':
            if not 1 <= i <= m:
                return None
            m += 1
        else:
            raise ValueError(f"bad letter kind {kind!r}")
        counts.append(m)
    return counts


def naive_perm(top, letters):
    """Bottom position of each top strand, for crossing-only words."""
    perm = list(range(1, top + 1))
    for letter in letters:
        assert letter[0] == 'c'
        i = letter[1]
        for k, p in enumerate(perm):
            if p == i:
                perm[k] = i + 1
            elif p == i + 1:
                perm[k] = i
    return perm


def closure_circles_pure(top, letters):
    """Number of circles in the closure of a crossing-only word."""
    perm = naive_perm(top, letters)
    seen = [False] * (top + 1)
    circles = 0
    for start in range(1, top + 1):
        if seen[start]:
            continue
        circles += 1
        p = start
        while not seen[p]:
            seen[p] = True
            p = perm[p - 1]
    return circles


def exponent_sum(letters):
    return sum(l[2] for l in letters if l[0] == 'c')


# ---------------------------------------------------------------------------
# one-step rewriting, all nine rule families, both directions

def _support(letter, where):
    """Strand indices a letter touches in its upper or lower frame."""
    kind, i = letter[0], letter[1]
    if kind == 'c':
        return (i, i + 1)
    if kind == 'z':
        return (i, i + 1) if where == 'upper' else (i,)
    return (i,) if where == 'upper' else (i, i + 1)


def _delta(letter):
    return {'c': 0, 'z': -1, 'u': 1}[letter[0]]


def _shift(letter, by):
    return (letter[0], letter[1] + by) + letter[2:]


def naive_neighbors(top, letters, max_len):
    """Yield every word one rewrite away (both directions of all rules)."""
    ls = list(letters)
    n = len(ls)

    def emit(k, remove, insert):
        out = ls[:k] + list(insert) + ls[k + remove:]
        if len(out) <= max_len:
            yield top, tuple(out)

    profile = naive_profile(top, letters)
    assert profile is not None

    # cancelling crossing pairs: removal and insertion
    for k in range(n - 1):
        a, b = ls[k], ls[k + 1]
        if a[0] == 'c' and b[0] == 'c' and a[1] == b[1] and a[2] == -b[2]:
            yield from emit(k, 2, [])
    for k in range(n + 1):
        m = profile[k]
        for i in range(1, m):
            for s in (1, -1):
                yield from emit(k, 0, [('c', i, s), ('c', i, -s)])

    # third Reidemeister move, uniform sign
    for k in range(n - 2):
        a, b, c = ls[k], ls[k + 1], ls[k + 2]
        if not (a[0] == b[0] == c[0] == 'c'):
            continue
        if a[2] == b[2] == c[2]:
            s = a[2]
            if a[1] == c[1] and b[1] == a[1] + 1:
                i = a[1]
                yield from emit(k, 3, [('c', i + 1, s), ('c', i, s), ('c', i + 1, s)])
            if a[1] == c[1] and b[1] == a[1] - 1:
                i = b[1]
                yield from emit(k, 3, [('c', i, s), ('c', i + 1, s), ('c', i, s)])

    # crossing absorbed by an adjacent vertex, and its inverse
    for k in range(n - 1):
        a, b = ls[k], ls[k + 1]
        if a[0] == 'c' and b[0] == 'z' and a[1] == b[1]:
            yield from emit(k, 2, [b])
        if a[0] == 'u' and b[0] == 'c' and a[1] == b[1]:
            yield from emit(k, 2, [a])
    for k in range(n):
        a = ls[k]
        if a[0] == 'z':
            for s in (1, -1):
                yield from emit(k, 1, [('c', a[1], s), a])
        if a[0] == 'u':
            for s in (1, -1):
                yield from emit(k, 1, [a, ('c', a[1], s)])

    # crossing slid through a vertex (four shapes, both directions)
    for k in range(n - 2):
        a, b, c = ls[k], ls[k + 1], ls[k + 2]
        if a[0] == 'c' and b[0] == 'c' and c[0] == 'z' and a[2] == b[2]:
            i, s = a[1], a[2]
            if b[1] == i + 1 and c[1] == i:
                yield from emit(k, 3, [('z', i + 1), ('c', i, s)])
            if a[1] == b[1] + 1 and c[1] == a[1]:
                i = b[1]
                yield from emit(k, 3, [('z', i), ('c', i, s)])
        if a[0] == 'u' and b[0] == 'c' and c[0] == 'c' and b[2] == c[2]:
            s = b[2]
            if b[1] == a[1] + 1 and c[1] == a[1]:
                i = a[1]
                yield from emit(k, 3, [('c', i, s), ('u', i + 1)])
            if c[1] == a[1] and b[1] == a[1] - 1:
                i = b[1]
                yield from emit(k, 3, [('c', i, s), ('u', i)])
    for k in range(n - 1):
        a, b = ls[k], ls[k + 1]
        if a[0] == 'z' and b[0] == 'c':
            i, s = b[1], b[2]
            if a[1] == i + 1:
                yield from emit(k, 2, [('c', i, s), ('c', i + 1, s), ('z', i)])
            if a[1] == i:
                yield from emit(k, 2, [('c', i + 1, s), ('c', i, s), ('z', i + 1)])
        if a[0] == 'c' and b[0] == 'u':
            i, s = a[1], a[2]
            if b[1] == i + 1:
                yield from emit(k, 2, [('u', i), ('c', i + 1, s), ('c', i, s)])
            if b[1] == i:
                yield from emit(k, 2, [('u', i + 1), ('c', i, s), ('c', i + 1, s)])

    # distant letters commute, with renumbering across zips and unzips
    for k in range(n - 1):
        x, y = ls[k], ls[k + 1]
        sx = _support(x, 'lower')
        sy = _support(y, 'upper')
        if max(sx) < min(sy):
            yield from emit(k, 2, [_shift(y, -_delta(x)), x])
        elif max(sy) < min(sx):
            yield from emit(k, 2, [y, _shift(x, _delta(y))])


def naive_isotopic(w1, w2, max_len, max_states=20000):
    """Breadth-first search over raw rewrites; True, False, or None."""
    if w1 == w2:
        return True
    if w1[0] != w2[0]:
        return False
    if naive_profile(*w1)[-1] != naive_profile(*w2)[-1]:
        return False
    seen = {w1}
    frontier = deque([w1])
    while frontier and len(seen) < max_states:
        state = frontier.popleft()
        for nxt in naive_neighbors(*state, max_len):
            if nxt in seen:
                continue
            if nxt == w2:
                return True
            seen.add(nxt)
            frontier.append(nxt)
    if not frontier:
        return False
    return None


# ---------------------------------------------------------------------------
# closure graph combinatorics


def closure_graph_oracle(top, letters):
    """Abstract graph of a closable word's closure, with no geometry at all.

    Wires (curve pieces in progress) are traced level by level down the
    word: a crossing passes both curves through and is not a graph
    vertex, a zip ends two wires and starts one, an unzip ends one wire
    and starts two.  The closure then continues bottom position j into
    top position j.  Chasing continuation links turns wires into either
    edges (vertex to vertex) or circles (closed curves meeting no
    vertex).

    Returns ``(kinds, edges, circles, components, betti)`` where kinds
    maps vertex index -> 'z'/'u' and edges are directed index pairs.
    """
    profile = naive_profile(top, letters)
    assert profile is not None and profile[-1] == top, "word must be closable"

    start_at = {}   # wire -> vertex it leaves
    end_at = {}     # wire -> vertex it enters
    succ = {}       # wire -> wire it continues into (closure joins)
    kinds = []
    nwires = 0

    def new_wire(from_vertex=None):
        nonlocal nwires
        wid = nwires
        nwires += 1
        if from_vertex is not None:
            start_at[wid] = from_vertex
        return wid

    cur = [new_wire() for _ in range(top)]
    top_wires = list(cur)
    for letter in letters:
        kind, i = letter[0], letter[1]
        if kind == 'c':
            cur[i - 1], cur[i] = cur[i], cur[i - 1]
        elif kind == 'z':
            v = len(kinds)
            kinds.append('z')
            end_at[cur[i - 1]] = v
            end_at[cur[i]] = v
            cur[i - 1:i + 1] = [new_wire(v)]
        else:
            v = len(kinds)
            kinds.append('u')
            end_at[cur[i - 1]] = v
            cur[i - 1:i] = [new_wire(v), new_wire(v)]
    for j in range(top):
        succ[cur[j]] = top_wires[j]

    edges = []
    used = set()
    for w in range(nwires):
        if w not in start_at:
            continue
        x = w
        used.add(x)
        while x not in end_at:
            x = succ[x]
            used.add(x)
        edges.append((start_at[w], end_at[x]))
    circles = 0
    for w in range(nwires):
        if w in used:
            continue
        x = w
        while x not in used:
            used.add(x)
            x = succ[x]
        circles += 1

    nv = len(kinds)
    parent = list(range(nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    components = len({find(v) for v in range(nv)}) + circles
    betti = len(edges) - nv + components
    return kinds, edges, circles, components, betti


def graph_census(kinds, edges, circles):
    """Labeling-independent summary used to compare two graphs."""
    kind_pair = sorted((kinds[a], kinds[b]) for a, b in edges)
    loops = sum(1 for a, b in edges if a == b)
    return (sorted(kinds), kind_pair, loops, circles)


def library_census(g):
    """The same census computed from a library UnderlyingGraph value."""
    kind_of = {vid: kind[0] for vid, kind in g.vertex_kinds}
    order = sorted(kind_of)
    index = {vid: i for i, vid in enumerate(order)}
    return graph_census([kind_of[v] for v in order],
                        [(index[a], index[b]) for a, b in g.edges],
                        g.circles)


# ---------------------------------------------------------------------------
# bridging to library objects


def to_tuples(word):
    out = []
    for letter in word.letters:
        k = letter.kind.name
        if k == 'CROSSING':
            out.append(('c', letter.index, letter.sign))
        elif k == 'ZIP':
            out.append(('z', letter.index))
        else:
            out.append(('u', letter.index))
    return word.top_count, tuple(out)


def from_tuples(top, letters):
    from tribraid import BraidWord, Letter
    built = []
    for t in letters:
        if t[0] == 'c':
            built.append(Letter.crossing(t[1], t[2]))
        elif t[0] == 'z':
            built.append(Letter.zip(t[1]))
        else:
            built.append(Letter.unzip(t[1]))
    return BraidWord(top, tuple(built))
