"""General position analysis: subdivision, up-arcs and sliding triangles.

The braiding algorithm consumes diagrams in *general position* with
respect to a chosen subdivision of their arcs.  A subdivision designates
interior points on arcs; the pieces between consecutive designated
points must be strictly monotone in y, so every piece is an *up-arc* or
a *down-arc*.  Up-arcs chain through crossings (a strand that enters a
crossing climbing keeps climbing) into *units*, the elementary objects
the braider eliminates one by one.

General position bundles three exact conditions:

1. no arc segment is horizontal;
2. no two features (crossing points, vertex points, subdivision
   points) share an x or a y coordinate;
3. the sliding triangle condition: each unit's right triangle (chord
   from bottom to top endpoint, right angle below) may overlap the
   triangle of a non-adjacent unit only if the two units carry opposite
   over/under labels.  Units sharing a subdivision point are adjacent
   and exempt; units sharing a crossing get opposite labels for free.

Labels: a unit through a crossing is labeled by its role there (over or
under); a free unit takes the caller's default.  Caller-supplied labels
may override free units only -- contradicting a crossing-determined
label is reported as a violation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .diagram import Crossing, Diagram, DiagramReport, Vertex, Violation
from .errors import DiagramError
from .geometry import Point, on_segment, triangles_overlap

OVER = "over"
UNDER = "under"

Subdivision = Mapping[str, Sequence[Point]]
UnitKey = tuple[str, int]  # (arc id, piece index) of the unit's lowest piece


@dataclass(frozen=True)
class Piece:
    """A monotone portion of one arc between consecutive cut points."""

    arc_id: str
    index: int
    points: tuple[Point, ...]
    direction: int  # +1 climbing, -1 descending, 0 not monotone

    @property
    def low(self) -> Point:
        return self.points[0] if self.direction < 0 else self.points[-1] \
            if self.direction > 0 else min(self.points, key=lambda p: p[1])

    @property
    def bottom(self) -> Point:
        return self.points[0] if self.direction > 0 else self.points[-1]

    @property
    def top(self) -> Point:
        return self.points[-1] if self.direction > 0 else self.points[0]


@dataclass(frozen=True)
class UpArcUnit:
    """A maximal chain of climbing pieces linked through crossings.

    ``points`` runs from the bottom endpoint B to the top endpoint T.
    ``crossings`` records (crossing id, slot the chain enters at) for
    each interior crossing; with a single entry the unit's over/under
    label is determined by whether that slot lies on the over-strand.
    """

    pieces: tuple[tuple[str, int], ...]
    points: tuple[Point, ...]
    crossings: tuple[tuple[str, int], ...]

    @property
    def key(self) -> UnitKey:
        return self.pieces[0]

    @property
    def bottom(self) -> Point:
        return self.points[0]

    @property
    def top(self) -> Point:
        return self.points[-1]

    @property
    def triangle(self) -> tuple[Point, Point, Point]:
        """Right triangle below the chord: hypotenuse B -> T, right
        angle at (T.x, B.y)."""
        b, t = self.points[0], self.points[-1]
        return (b, t, (t[0], b[1]))


def _locate(arc_points: tuple[Point, ...], p: Point) -> tuple[int, Fraction] | None:
    """Position of p on a polyline as (segment index, parameter)."""
    for i in range(len(arc_points) - 1):
        a, b = arc_points[i], arc_points[i + 1]
        if on_segment(p, (a, b)):
            if b[0] != a[0]:
                t = (p[0] - a[0]) / (b[0] - a[0])
            elif b[1] != a[1]:
                t = (p[1] - a[1]) / (b[1] - a[1])
            else:
                t = Fraction(0)
            return i, t
    return None


def split_arc_points(points: tuple[Point, ...],
                     cuts: Sequence[Point]) -> list[tuple[Point, ...]]:
    """Split a polyline at interior cut points, returned in arc order.

    Raises :class:`DiagramError` if a cut is not on the polyline or
    coincides with an endpoint or another cut.
    """
    located = []
    for p in cuts:
        loc = _locate(points, p)
        if loc is None:
            raise DiagramError(f"subdivision point ({p[0]}, {p[1]}) is not on its arc")
        if p == points[0] or p == points[-1]:
            raise DiagramError(f"subdivision point ({p[0]}, {p[1]}) is an arc endpoint")
        located.append((loc[0], loc[1], p))
    located.sort(key=lambda e: (e[0], e[1]))
    for a, b in zip(located, located[1:]):
        if a[2] == b[2]:
            raise DiagramError(f"duplicate subdivision point ({a[2][0]}, {a[2][1]})")

    out: list[tuple[Point, ...]] = []
    cur: list[Point] = [points[0]]
    k = 0
    for i in range(len(points) - 1):
        while k < len(located) and located[k][0] == i:
            p = located[k][2]
            if p != cur[-1]:
                cur.append(p)
            out.append(tuple(cur))
            cur = [p]
            k += 1
        nxt = points[i + 1]
        if nxt != cur[-1]:
            cur.append(nxt)
    out.append(tuple(cur))
    return [piece for piece in out if len(piece) >= 2]


def _monotone_direction(points: tuple[Point, ...]) -> int:
    dirs = set()
    for a, b in zip(points, points[1:]):
        if b[1] > a[1]:
            dirs.add(1)
        elif b[1] < a[1]:
            dirs.add(-1)
        else:
            dirs.add(0)
    if dirs == {1}:
        return 1
    if dirs == {-1}:
        return -1
    return 0


def pieces_of(d: Diagram, subdivision: Subdivision) -> dict[str, list[Piece]]:
    """Cut every arc at its designated points into monotone candidates."""
    out: dict[str, list[Piece]] = {}
    for a in d.arcs:
        cuts = tuple(subdivision.get(a.arc_id, ()))
        cut_points = [(Fraction(x), Fraction(y)) for x, y in cuts]
        parts = split_arc_points(a.points, cut_points)
        out[a.arc_id] = [Piece(a.arc_id, i, part, _monotone_direction(part))
                         for i, part in enumerate(parts)]
    return out


def units_of(d: Diagram, subdivision: Subdivision) -> tuple[UpArcUnit, ...]:
    """Chain climbing pieces through crossings into up-arc units.

    Pieces must all be monotone (every extremum designated); a
    non-monotone piece raises :class:`DiagramError`.  The result is
    sorted by (top endpoint y descending, then x ascending), which is
    also the order the braider processes units in.
    """
    pieces = pieces_of(d, subdivision)
    for plist in pieces.values():
        for p in plist:
            if p.direction == 0:
                raise DiagramError(
                    f"arc {p.arc_id!r} piece {p.index} is not monotone; "
                    "designate its extrema as subdivision points")

    owner = d.port_owner()
    nodes = {n.node_id: n for n in d.crossings + d.vertices}
    arc_from: dict[str, str] = {}  # port -> arc id starting there
    for a in d.arcs:
        if a.from_port is not None:
            arc_from[a.from_port] = a.arc_id
    arcs = {a.arc_id: a for a in d.arcs}

    def crossing_after(arc_id: str) -> tuple[str, int, str] | None:
        """(crossing id, entry slot, next arc id) if the arc ends at a
        crossing, else None."""
        port = arcs[arc_id].to_port
        if port is None:
            return None
        nid, slot = owner[port]
        node = nodes[nid]
        if not isinstance(node, Crossing):
            return None
        nxt_port = node.ports[(slot + 2) % 4]
        nxt = arc_from.get(nxt_port)
        if nxt is None:
            return None
        return nid, slot, nxt

    # A unit starts at an up-piece that is not the continuation of a
    # previous up-piece through a crossing.
    continued: set[tuple[str, int]] = set()
    for aid, plist in pieces.items():
        if not plist or plist[-1].direction != 1:
            continue
        hop = crossing_after(aid)
        if hop is None:
            continue
        _, _, nxt = hop
        nxt_pieces = pieces[nxt]
        if nxt_pieces and nxt_pieces[0].direction == 1:
            continued.add((nxt, 0))

    units: list[UpArcUnit] = []
    for aid in sorted(pieces):
        for piece in pieces[aid]:
            if piece.direction != 1 or (piece.arc_id, piece.index) in continued:
                continue
            chain = [piece]
            hops: list[tuple[str, int]] = []
            while True:
                last = chain[-1]
                if last.index != len(pieces[last.arc_id]) - 1:
                    break  # chain stops at a subdivision point
                hop = crossing_after(last.arc_id)
                if hop is None:
                    break
                nid, slot, nxt = hop
                nxt_first = pieces[nxt][0] if pieces[nxt] else None
                if nxt_first is None or nxt_first.direction != 1:
                    break
                hops.append((nid, slot))
                chain.append(nxt_first)
            pts: list[Point] = list(chain[0].points)
            for nxt_piece in chain[1:]:
                for q in nxt_piece.points:
                    if q != pts[-1]:
                        pts.append(q)
            units.append(UpArcUnit(tuple((p.arc_id, p.index) for p in chain),
                                   tuple(pts), tuple(hops)))

    units.sort(key=lambda u: (-u.top[1], u.top[0]))
    return tuple(units)


def determined_label(d: Diagram, unit: UpArcUnit) -> str | None:
    """The label forced by the unit's crossings, or None for free units.

    With several crossings the labels must agree (checked), which the
    preparation stage guarantees by splitting multi-crossing units.
    """
    nodes = {c.node_id: c for c in d.crossings}
    labels = set()
    for nid, slot in unit.crossings:
        c = nodes[nid]
        labels.add(OVER if slot in c.over_strand else UNDER)
    if not labels:
        return None
    if len(labels) > 1:
        raise DiagramError(
            f"unit through {', '.join(n for n, _ in unit.crossings)} is over at one "
            "crossing and under at another; subdivide it between them")
    return labels.pop()


def effective_labels(d: Diagram, units: Sequence[UpArcUnit],
                     labels: Mapping[UnitKey, str] | None,
                     default: str = OVER) -> dict[UnitKey, str]:
    out: dict[UnitKey, str] = {}
    for u in units:
        forced = determined_label(d, u)
        given = labels.get(u.key) if labels else None
        if given is not None and given not in (OVER, UNDER):
            raise DiagramError(f"label for unit {u.key!r} must be {OVER!r} or {UNDER!r}")
        if forced is not None:
            out[u.key] = forced
        else:
            out[u.key] = given if given is not None else default
    return out


def sliding_triangles(d: Diagram, subdivision: Subdivision
                      ) -> list[tuple[UpArcUnit, tuple[Point, Point, Point]]]:
    """Each unit with its sliding right triangle."""
    return [(u, u.triangle) for u in units_of(d, subdivision)]


def feature_points(d: Diagram, subdivision: Subdivision) -> list[tuple[str, Point]]:
    """(description, point) for every crossing, vertex and subdivision
    point, in deterministic order."""
    out: list[tuple[str, Point]] = []
    npos = d.node_positions()
    for n in d.crossings + d.vertices:
        out.append((f"node {n.node_id}", npos[n.node_id]))
    for aid in sorted(subdivision):
        for p in subdivision[aid]:
            out.append((f"subdivision point on {aid}",
                        (Fraction(p[0]), Fraction(p[1]))))
    return out


def is_general_position(d: Diagram, subdivision: Subdivision,
                        labels: Mapping[UnitKey, str] | None = None,
                        default_label: str = OVER) -> DiagramReport:
    """Check the three general-position conditions exactly.

    The report's violations carry the exact coordinates that witness
    each failure.  Label conflicts (a caller label fighting a
    crossing-determined one) are reported as violations rather than
    raised, so a single pass surfaces everything.
    """
    out: list[Violation] = []

    for a in d.arcs:
        for _, (p, q) in a.segments():
            if p[1] == q[1]:
                out.append(Violation("horizontal-segment",
                                     f"arc {a.arc_id!r} has a horizontal segment", p))

    feats = feature_points(d, subdivision)
    by_x: dict[Fraction, str] = {}
    by_y: dict[Fraction, str] = {}
    for desc, (x, y) in feats:
        if x in by_x:
            out.append(Violation("aligned-features",
                                 f"{by_x[x]} and {desc} share x = {x}", (x, y)))
        else:
            by_x[x] = desc
        if y in by_y:
            out.append(Violation("aligned-features",
                                 f"{by_y[y]} and {desc} share y = {y}", (x, y)))
        else:
            by_y[y] = desc

    try:
        units = units_of(d, subdivision)
    except DiagramError as e:
        out.append(Violation("bad-subdivision", str(e)))
        return DiagramReport(False, tuple(out))

    try:
        eff = effective_labels(d, units, labels, default_label)
    except DiagramError as e:
        out.append(Violation("label-conflict", str(e)))
        return DiagramReport(False, tuple(out))
    if labels:
        for u in units:
            forced = determined_label(d, u)
            given = labels.get(u.key)
            if forced is not None and given is not None and forced != given:
                out.append(Violation("label-conflict",
                                     f"unit {u.key!r} is {forced} at its crossing but "
                                     f"labeled {given}", u.bottom))

    for i in range(len(units)):
        for j in range(i + 1, len(units)):
            u, v = units[i], units[j]
            if eff[u.key] != eff[v.key]:
                continue
            endpoints_u = {u.bottom, u.top}
            endpoints_v = {v.bottom, v.top}
            if endpoints_u & endpoints_v:
                continue  # adjacent units may overlap freely
            if triangles_overlap(u.triangle, v.triangle):
                out.append(Violation(
                    "triangle-overlap",
                    f"sliding triangles of units {u.key!r} and {v.key!r} overlap "
                    f"with equal label {eff[u.key]}", u.bottom))

    return DiagramReport(not out, tuple(out))
