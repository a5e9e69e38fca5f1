"""Isotopy-preserving diagram distortions for test generation.

Every operation here either moves the diagram by an ambient PL isotopy
of the plane (affine maps, arc folds, swings) or performs one of the
extended Reidemeester-style local insertions (curl, poke, twirl) or the
vertex-adjacent switch.  In all cases the isotopy class of the spatial
graph is preserved *by construction*, so distorted diagrams make honest
inputs for round-trip tests: whatever the braider reads off afterwards
must stay equivalent to the original.

Sites are caller-supplied and explicit.  An operation that would drag
an arc across other material raises :class:`SiteObstructionError`
naming the first blocking feature; there is no automatic search for
usable sites.

Local insertions create genuinely new crossings, which forces the two
delicate bits of bookkeeping this module centralises:

* **Port assignment.**  A new crossing's four half-edges are sorted
  counterclockwise by exact direction (:func:`~.geometry.direction_key`)
  and assigned slots 0..3 in that order.  Transversality of the two
  passages guarantees the slots alternate between them, so the strand
  pairing (0,2)/(1,3) of :class:`~.diagram.Crossing` is automatic.

* **Choice of over-strand.**  When a caller requests a crossing of a
  given sign, the over passage is picked via the orientation rule
  sign = sgn(under_direction x over_direction), evaluated on the exact
  travel directions of the two passages at the crossing point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .diagram import (
    Arc,
    Crossing,
    Diagram,
    ZIP,
    port_name,
    require_valid_diagram,
)
from .errors import DiagramError, SiteObstructionError
from .geometry import (
    Affine,
    CROSS,
    DISJOINT,
    Point,
    cross2,
    direction_key,
    point_in_triangle,
    segment_hits_triangle,
    segment_meet,
)

__all__ = [
    "Translate",
    "Scale",
    "Shear",
    "PythagoreanRotation",
    "ArcFold",
    "Curl",
    "Poke",
    "Twirl",
    "Swing",
    "Switch",
    "distort",
]


def _fr(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _pt(p) -> Point:
    return (_fr(p[0]), _fr(p[1]))


def _lerp(a: Point, b: Point, t: Fraction) -> Point:
    return (a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)


def _is_open(d: Diagram) -> bool:
    return any((a.from_port is None or a.to_port is None) and not a.is_circle
               for a in d.arcs)


def _check(d: Diagram, was_open: bool) -> Diagram:
    require_valid_diagram(d, allow_open=was_open)
    return d


def _fresh_node_id(d: Diagram, extra: set[str]) -> str:
    taken = {n.node_id for n in d.crossings} | {n.node_id for n in d.vertices} | extra
    k = len(d.crossings)
    while f"x{k}" in taken:
        k += 1
    return f"x{k}"


def _fresh_arc_id(d: Diagram, base: str, extra: set[str]) -> str:
    taken = {a.arc_id for a in d.arcs} | extra
    k = 1
    while f"{base}.{k}" in taken:
        k += 1
    return f"{base}.{k}"


def _seg_param(a: Point, b: Point, p: Point) -> Fraction:
    if b[0] != a[0]:
        return (p[0] - a[0]) / (b[0] - a[0])
    if b[1] != a[1]:
        return (p[1] - a[1]) / (b[1] - a[1])
    raise DiagramError("zero-length segment")


def _split_located(points: tuple[Point, ...],
                   splits: Sequence[tuple[int, Point]]) -> list[tuple[Point, ...]]:
    """Split a polyline at explicitly located interior points.

    Unlike the subdivision splitter, locations are given as
    (segment index, point) pairs, so the same geometric point may cut
    two different segments (a self-crossing visits its point twice).
    """
    located = sorted(
        ((i, _seg_param(points[i], points[i + 1], p), p) for i, p in splits),
        key=lambda e: (e[0], e[1]))
    for (i1, t1, p1), (i2, t2, p2) in zip(located, located[1:]):
        if i1 == i2 and t1 == t2:
            raise DiagramError("coincident split locations on one segment")
    out: list[tuple[Point, ...]] = []
    cur: list[Point] = [points[0]]
    k = 0
    for i in range(len(points) - 1):
        while k < len(located) and located[k][0] == i:
            p = located[k][2]
            if p != cur[-1]:
                cur.append(p)
            if len(cur) < 2:
                raise DiagramError("split point coincides with a polyline point")
            out.append(tuple(cur))
            cur = [p]
            k += 1
        nxt = points[i + 1]
        if nxt != cur[-1]:
            cur.append(nxt)
    if len(cur) < 2:
        raise DiagramError("split point coincides with a polyline point")
    out.append(tuple(cur))
    return out


def _assign_slots(halfedges: Sequence[tuple[str, Point]]) -> dict[str, int]:
    """Slot numbers for four half-edges around a new crossing.

    ``halfedges`` maps tags to outward direction vectors at the crossing
    point; tags ``in1``/``out1`` belong to one passage, ``in2``/``out2``
    to the other.  Directions are sorted counterclockwise and slots
    handed out in sorted order.  Transversal passages always interleave;
    if they do not, the two passages fail to cross and the site is
    degenerate.
    """
    order = sorted(halfedges, key=lambda e: direction_key(e[1]))
    tags = [t for t, _ in order]
    strand = ["1" if t.endswith("1") else "2" for t in tags]
    if strand[0] == strand[1] or strand[1] == strand[2]:
        raise DiagramError("half-edges of a new crossing do not interleave")
    return {t: i for i, t in enumerate(tags)}


def _segments(d: Diagram) -> list[tuple[str, int, Point, Point]]:
    out = []
    for a in d.arcs:
        for i, (p, q) in a.segments():
            out.append((a.arc_id, i, p, q))
    return out


def _region_clear(d: Diagram,
                  triangles: Sequence[tuple[Point, Point, Point]],
                  exclude: set[tuple[str, int]],
                  what: str,
                  allow_segments: set[tuple[str, int]] = frozenset()) -> None:
    """Raise :class:`SiteObstructionError` if foreign material meets the
    swept region of an isotopy.

    ``exclude`` lists segments being replaced (they may sit inside the
    region); ``allow_segments`` lists segments the operation crosses on
    purpose.  Everything else -- other segments and node points -- must
    stay out of the open region.
    """
    for tri in triangles:
        for aid, i, p, q in _segments(d):
            if (aid, i) in exclude or (aid, i) in allow_segments:
                continue
            if segment_hits_triangle((p, q), tri):
                raise SiteObstructionError(
                    f"{what} is blocked by arc {aid!r} (segment {i})")
        for nid, pos in d.node_positions().items():
            if point_in_triangle(pos, tri, strict=True):
                raise SiteObstructionError(
                    f"{what} is blocked by node {nid!r}")


def _get_arc(d: Diagram, arc_id: str) -> Arc:
    for a in d.arcs:
        if a.arc_id == arc_id:
            return a
    raise DiagramError(f"no arc with id {arc_id!r}")


def _segment_of(arc: Arc, seg_index: int) -> tuple[Point, Point]:
    n = len(arc.points) - 1
    if not 0 <= seg_index < n:
        raise DiagramError(
            f"arc {arc.arc_id!r} has {n} segments, no segment {seg_index}")
    return arc.points[seg_index], arc.points[seg_index + 1]


def _replace_arc(d: Diagram, arc_id: str, new_arcs: Sequence[Arc],
                 new_crossings: Sequence[Crossing] = ()) -> Diagram:
    arcs = []
    for a in d.arcs:
        if a.arc_id == arc_id:
            arcs.extend(new_arcs)
        else:
            arcs.append(a)
    return Diagram(arcs=tuple(arcs),
                   crossings=d.crossings + tuple(new_crossings),
                   vertices=d.vertices)


# --------------------------------------------------------------------------
# affine operations


@dataclass(frozen=True)
class Translate:
    dx: Fraction
    dy: Fraction

    def _map(self) -> Affine:
        return Affine.translation(_fr(self.dx), _fr(self.dy))


@dataclass(frozen=True)
class Scale:
    factor: Fraction
    center: Point = (Fraction(0), Fraction(0))

    def _map(self) -> Affine:
        return Affine.scaling(_fr(self.factor), center=_pt(self.center))


@dataclass(frozen=True)
class Shear:
    k: Fraction
    axis: str = "x"  # "x": x += k*y ; "y": y += k*x

    def _map(self) -> Affine:
        if self.axis == "x":
            return Affine.shear_x(_fr(self.k))
        if self.axis == "y":
            return Affine.shear_y(_fr(self.k))
        raise ValueError(f"axis must be 'x' or 'y', not {self.axis!r}")


@dataclass(frozen=True)
class PythagoreanRotation:
    """Exact rotation by the angle of a Pythagorean triple (a, b, c).

    The matrix [[a/c, -b/c], [b/c, a/c]] is rational and orthogonal, so
    the rotated diagram keeps exact coordinates.
    """

    triple: tuple[int, int, int] = (3, 4, 5)
    center: Point = (Fraction(0), Fraction(0))

    def _map(self) -> Affine:
        return Affine.pythagorean_rotation(self.triple, center=_pt(self.center))


def _apply_affine(d: Diagram, f: Affine) -> Diagram:
    arcs = tuple(
        Arc(a.arc_id, tuple(f(p) for p in a.points), a.from_port, a.to_port)
        for a in d.arcs)
    return Diagram(arcs=arcs, crossings=d.crossings, vertices=d.vertices)


# --------------------------------------------------------------------------
# arc fold


@dataclass(frozen=True)
class ArcFold:
    """Push a descending run sideways-and-down, creating an extremum
    pair and with it one up-arc where there was none.

    The portion of segment ``seg_index`` between parameters ``t0`` and
    ``t1`` is redrawn as the parallelogram detour
    p0 -> p0+push -> p1+push -> p1 with ``push = (offset, -depth)``.
    All three detour segments are crossing-free for any descending host
    (the outgoing and returning edges are parallel), the far corner
    p1+push is a local minimum, and the return point p1 becomes a local
    maximum: exactly one climbing piece is born.
    """

    arc_id: str
    seg_index: int
    t0: Fraction = Fraction(1, 3)
    t1: Fraction = Fraction(2, 3)
    depth: Fraction = Fraction(1, 2)
    offset: Fraction = Fraction(1, 2)

    def _apply(self, d: Diagram) -> Diagram:
        t0, t1 = _fr(self.t0), _fr(self.t1)
        depth, offset = _fr(self.depth), _fr(self.offset)
        if not (0 < t0 < t1 < 1):
            raise ValueError("fold needs 0 < t0 < t1 < 1")
        if depth <= 0:
            raise ValueError("fold depth must be positive")
        arc = _get_arc(d, self.arc_id)
        p, q = _segment_of(arc, self.seg_index)
        if q[1] >= p[1]:
            raise ValueError("fold requires a descending segment")
        push = (offset, -depth)
        if cross2(push, (q[0] - p[0], q[1] - p[1])) == 0:
            raise ValueError("fold push must not be parallel to the segment")
        p0, p1 = _lerp(p, q, t0), _lerp(p, q, t1)
        f0 = (p0[0] + push[0], p0[1] + push[1])
        f1 = (p1[0] + push[0], p1[1] + push[1])
        tris = ((p0, f0, f1), (p0, f1, p1))
        _region_clear(d, tris, {(self.arc_id, self.seg_index)}, "arc fold")
        k = self.seg_index
        pts = arc.points[:k + 1] + (p0, f0, f1, p1) + arc.points[k + 1:]
        out = _replace_arc(d, self.arc_id,
                           [Arc(arc.arc_id, pts, arc.from_port, arc.to_port)])
        return _check(out, _is_open(d))


# --------------------------------------------------------------------------
# local insertions


def _sign_pick(requested: int, d_first: Point, d_second: Point) -> bool:
    """True when the *first* passage must go over to get ``requested``.

    ``d_first``/``d_second`` are exact travel directions of the two
    passages at the crossing point; a crossing's sign is
    sgn(under x over).
    """
    s_first_over = 1 if cross2(d_second, d_first) > 0 else -1
    return s_first_over == requested


@dataclass(frozen=True)
class Curl:
    """First Reidemeister move: insert a small kink with one
    self-crossing of the requested ``sign``.

    The loop replaces the sub-segment between parameters ``t - width``
    and ``t + width``; ``side`` (+1 left of travel, -1 right) picks
    which side of the arc the loop bulges to.
    """

    arc_id: str
    seg_index: int
    t: Fraction = Fraction(1, 2)
    width: Fraction = Fraction(1, 6)
    side: int = 1
    sign: int = 1

    def _apply(self, d: Diagram) -> Diagram:
        t, width = _fr(self.t), _fr(self.width)
        if self.side not in (1, -1) or self.sign not in (1, -1):
            raise ValueError("side and sign must be +1 or -1")
        if not (0 < t - width and t + width < 1):
            raise ValueError("curl window [t-width, t+width] must be interior")
        arc = _get_arc(d, self.arc_id)
        p, q = _segment_of(arc, self.seg_index)
        u = ((q[0] - p[0]) * width, (q[1] - p[1]) * width)
        w = (-u[1] * self.side, u[0] * self.side)
        c = _lerp(p, q, t)
        a = (c[0] - u[0], c[1] - u[1])
        b = (c[0] + u[0], c[1] + u[1])
        a1 = (a[0] + u[0] * Fraction(14, 5) + w[0] * Fraction(7, 10),
              a[1] + u[1] * Fraction(14, 5) + w[1] * Fraction(7, 10))
        a2 = (a[0] + u[0] * Fraction(6, 5) + w[0] * Fraction(11, 10),
              a[1] + u[1] * Fraction(6, 5) + w[1] * Fraction(11, 10))
        kind, x = segment_meet((a, a1), (a2, b))
        if kind != CROSS or x is None:
            raise DiagramError("curl template failed to self-cross")
        tris = ((a, a1, a2), (a, a2, b))
        _region_clear(d, tris, {(self.arc_id, self.seg_index)}, "curl")

        k = self.seg_index
        pts = arc.points[:k + 1] + (a, a1, a2, b) + arc.points[k + 1:]
        xid = _fresh_node_id(d, set())
        first_over = _sign_pick(self.sign,
                                (a1[0] - a[0], a1[1] - a[1]),
                                (b[0] - a2[0], b[1] - a2[1]))
        slots = _assign_slots([
            ("in1", (a[0] - x[0], a[1] - x[1])),
            ("out1", (a1[0] - x[0], a1[1] - x[1])),
            ("in2", (a2[0] - x[0], a2[1] - x[1])),
            ("out2", (b[0] - x[0], b[1] - x[1])),
        ])
        over_slot = slots["in1"] if first_over else slots["in2"]
        splits = [(k + 1, x), (k + 3, x)]
        port_pairs = [(port_name(xid, slots["in1"]), port_name(xid, slots["out1"])),
                      (port_name(xid, slots["in2"]), port_name(xid, slots["out2"]))]
        ext = Arc(arc.arc_id, pts, arc.from_port, arc.to_port)
        new_arcs = _wire_split(d, ext, splits, port_pairs)
        xing = Crossing(xid, tuple(port_name(xid, s) for s in range(4)), over_slot)
        out = _replace_arc(d, self.arc_id, new_arcs, [xing])
        return _check(out, _is_open(d))


def _wire_split(d: Diagram, arc: Arc, splits: Sequence[tuple[int, Point]],
                port_pairs: Sequence[tuple[str, str]]) -> list[Arc]:
    """Split ``arc`` at located points and wire the cut ends to ports.

    ``port_pairs[i]`` = (port the piece *before* split i ends at, port
    the piece *after* it starts at).  Circles are re-joined across their
    seam so a circle split at k points yields k arcs.
    """
    pieces = _split_located(arc.points, splits)
    used: set[str] = set()
    if arc.is_circle:
        wrap = pieces[-1][:-1] + pieces[0] if len(pieces) > 1 else pieces[0]
        arcs = [Arc(arc.arc_id, wrap, port_pairs[-1][1], port_pairs[0][0])]
        for j, mid in enumerate(pieces[1:-1]):
            aid = _fresh_arc_id(d, arc.arc_id, used)
            used.add(aid)
            arcs.append(Arc(aid, mid, port_pairs[j][1], port_pairs[j + 1][0]))
        return arcs
    arcs = []
    for j, piece in enumerate(pieces):
        aid = arc.arc_id if j == 0 else _fresh_arc_id(d, arc.arc_id, used)
        used.add(aid)
        f = arc.from_port if j == 0 else port_pairs[j - 1][1]
        to = arc.to_port if j == len(pieces) - 1 else port_pairs[j][0]
        arcs.append(Arc(aid, piece, f, to))
    return arcs


@dataclass(frozen=True)
class Poke:
    """Second Reidemeister move: push a finger of one arc across a
    single segment of another, creating a cancelling crossing pair.

    The finger leaves the host segment between parameters ``t0`` and
    ``t1``, translates by ``push`` and returns.  It must cross exactly
    one segment of exactly one other arc, once on the way out and once
    on the way back; ``flavor`` says whether the poking arc passes over
    or under at both new crossings.
    """

    arc_id: str
    seg_index: int
    t0: Fraction
    t1: Fraction
    push: tuple[Fraction, Fraction]
    flavor: str = "over"

    def _apply(self, d: Diagram) -> Diagram:
        t0, t1 = _fr(self.t0), _fr(self.t1)
        push = _pt(self.push)
        if not (0 < t0 < t1 < 1):
            raise ValueError("poke needs 0 < t0 < t1 < 1")
        if self.flavor not in ("over", "under"):
            raise ValueError("flavor must be 'over' or 'under'")
        arc = _get_arc(d, self.arc_id)
        p, q = _segment_of(arc, self.seg_index)
        if cross2(push, (q[0] - p[0], q[1] - p[1])) == 0:
            raise ValueError("poke push must not be parallel to the host segment")
        p0, p1 = _lerp(p, q, t0), _lerp(p, q, t1)
        f0 = (p0[0] + push[0], p0[1] + push[1])
        f1 = (p1[0] + push[0], p1[1] + push[1])

        finger = [("out", p0, f0), ("tip", f0, f1), ("back", f1, p1)]
        hits: list[tuple[str, str, int, Point]] = []
        for tag, s, e in finger:
            for aid, i, sp, sq in _segments(d):
                if aid == self.arc_id and i == self.seg_index:
                    continue
                kind, x = segment_meet((s, e), (sp, sq))
                if kind != DISJOINT:
                    if kind != CROSS or x is None:
                        raise SiteObstructionError(
                            f"poke touches arc {aid!r} (segment {i}) improperly")
                    hits.append((tag, aid, i, x))
        out_hits = [h for h in hits if h[0] == "out"]
        back_hits = [h for h in hits if h[0] == "back"]
        if [h[0] for h in hits].count("tip"):
            bad = next(h for h in hits if h[0] == "tip")
            raise SiteObstructionError(
                f"poke tip crosses arc {bad[1]!r} (segment {bad[2]})")
        if len(out_hits) != 1 or len(back_hits) != 1:
            raise SiteObstructionError(
                "poke must cross exactly one segment on the way out and back; "
                f"saw {len(out_hits)} out, {len(back_hits)} back")
        (_, aid0, i0, x0), (_, aid1, i1, x1) = out_hits[0], back_hits[0]
        if (aid0, i0) != (aid1, i1):
            raise SiteObstructionError(
                f"poke crosses two different segments (arc {aid0!r} and {aid1!r})")
        if aid0 == self.arc_id:
            raise SiteObstructionError("poke across the poking arc itself is not supported")

        tris = ((p0, f0, f1), (p0, f1, p1))
        _region_clear(d, tris, {(self.arc_id, self.seg_index)}, "poke",
                      allow_segments={(aid0, i0)})

        other = _get_arc(d, aid0)
        osp, osq = _segment_of(other, i0)
        odir = (osq[0] - osp[0], osq[1] - osp[1])
        ids = [_fresh_node_id(d, set())]
        ids.append(_fresh_node_id(d, {ids[0]}))
        xid0, xid1 = ids

        k = self.seg_index
        pts = arc.points[:k + 1] + (p0, f0, f1, p1) + arc.points[k + 1:]
        # crossing 0 on the outgoing finger segment (p0, f0) = new index k+1
        # crossing 1 on the returning segment (f1, p1) = new index k+3
        s0 = _assign_slots([
            ("in1", (p0[0] - x0[0], p0[1] - x0[1])),
            ("out1", (f0[0] - x0[0], f0[1] - x0[1])),
            ("in2", (-odir[0], -odir[1])),
            ("out2", odir),
        ])
        s1 = _assign_slots([
            ("in1", (f1[0] - x1[0], f1[1] - x1[1])),
            ("out1", (p1[0] - x1[0], p1[1] - x1[1])),
            ("in2", (-odir[0], -odir[1])),
            ("out2", odir),
        ])
        poke_over = self.flavor == "over"
        x0_over = s0["in1"] if poke_over else s0["in2"]
        x1_over = s1["in1"] if poke_over else s1["in2"]

        ext = Arc(arc.arc_id, pts, arc.from_port, arc.to_port)
        self_arcs = _wire_split(
            d, ext, [(k + 1, x0), (k + 3, x1)],
            [(port_name(xid0, s0["in1"]), port_name(xid0, s0["out1"])),
             (port_name(xid1, s1["in1"]), port_name(xid1, s1["out1"]))])

        # order the two hit points along the other arc's segment
        ta = _seg_param(osp, osq, x0)
        tb = _seg_param(osp, osq, x1)
        if ta < tb:
            osplits = [(i0, x0), (i0, x1)]
            opairs = [(port_name(xid0, s0["in2"]), port_name(xid0, s0["out2"])),
                      (port_name(xid1, s1["in2"]), port_name(xid1, s1["out2"]))]
        else:
            osplits = [(i0, x1), (i0, x0)]
            opairs = [(port_name(xid1, s1["in2"]), port_name(xid1, s1["out2"])),
                      (port_name(xid0, s0["in2"]), port_name(xid0, s0["out2"]))]
        other_arcs = _wire_split(d, other, osplits, opairs)

        xings = [Crossing(xid0, tuple(port_name(xid0, s) for s in range(4)), x0_over),
                 Crossing(xid1, tuple(port_name(xid1, s) for s in range(4)), x1_over)]
        out = _replace_arc(d, self.arc_id, self_arcs)
        out = _replace_arc(out, aid0, other_arcs, xings)
        return _check(out, _is_open(d))


@dataclass(frozen=True)
class Twirl:
    """Fifth extended Reidemeister move at a vertex: cross the two
    same-role arcs just before they reach it.

    For a zip vertex the two incoming arcs swap ports and cross once
    below the vertex; for an unzip vertex the two outgoing arcs do.
    The new crossing's ``sign`` is the caller's choice, matching the
    word-level rule that absorbs a crossing into an adjacent vertex.
    ``t`` places the crossing scaffold along the final segments.
    """

    vertex_id: str
    sign: int = 1
    t: Fraction = Fraction(1, 2)

    def _apply(self, d: Diagram) -> Diagram:
        t = _fr(self.t)
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if not (0 < t < 1):
            raise ValueError("twirl needs 0 < t < 1")
        vtx = next((v for v in d.vertices if v.node_id == self.vertex_id), None)
        if vtx is None:
            raise DiagramError(f"no vertex with id {self.vertex_id!r}")
        incoming = vtx.kind == ZIP
        slot_a, slot_b = (0, 1) if incoming else (1, 2)
        pa, pb = vtx.ports[slot_a], vtx.ports[slot_b]
        arc_a = next((a for a in d.arcs if (a.to_port if incoming else a.from_port) == pa), None)
        arc_b = next((a for a in d.arcs if (a.to_port if incoming else a.from_port) == pb), None)
        if arc_a is None or arc_b is None:
            raise DiagramError("twirl ports are not attached as expected")
        if arc_a.arc_id == arc_b.arc_id:
            raise DiagramError("twirl requires two distinct arcs at the vertex")

        def near(arc: Arc) -> tuple[Point, Point]:
            # (vertex endpoint, adjacent polyline point)
            if incoming:
                return arc.points[-1], arc.points[-2]
            return arc.points[0], arc.points[1]

        vpos, prev_a = near(arc_a)
        vpos_b, prev_b = near(arc_b)
        if vpos != vpos_b:
            raise DiagramError("twirl vertex position mismatch")
        a_out = _lerp(vpos, prev_a, t)      # on arc_a's final segment
        b_out = _lerp(vpos, prev_b, t)
        a_in = _lerp(vpos, prev_a, t / 2)   # inner anchors, inside the lens
        b_in = _lerp(vpos, prev_b, t / 2)
        kind, x = segment_meet((a_out, b_in), (b_out, a_in))
        if kind != CROSS or x is None:
            raise DiagramError("twirl site is degenerate (arcs reach the "
                               "vertex collinearly)")

        last_a = len(arc_a.points) - 2 if incoming else 0
        last_b = len(arc_b.points) - 2 if incoming else 0
        _region_clear(d, ((vpos, a_out, b_out),),
                      {(arc_a.arc_id, last_a), (arc_b.arc_id, last_b)}, "twirl")

        xid = _fresh_node_id(d, set())
        da = (b_in[0] - a_out[0], b_in[1] - a_out[1])  # travel of a's strand
        db = (a_in[0] - b_out[0], a_in[1] - b_out[1])
        if not incoming:
            da, db = (-da[0], -da[1]), (-db[0], -db[1])
        a_over = _sign_pick(self.sign, da, db)
        # outward directions at x for slot sorting
        if incoming:
            slots = _assign_slots([
                ("in1", (a_out[0] - x[0], a_out[1] - x[1])),
                ("out1", (b_in[0] - x[0], b_in[1] - x[1])),
                ("in2", (b_out[0] - x[0], b_out[1] - x[1])),
                ("out2", (a_in[0] - x[0], a_in[1] - x[1])),
            ])
        else:
            slots = _assign_slots([
                ("in1", (b_in[0] - x[0], b_in[1] - x[1])),
                ("out1", (a_out[0] - x[0], a_out[1] - x[1])),
                ("in2", (a_in[0] - x[0], a_in[1] - x[1])),
                ("out2", (b_out[0] - x[0], b_out[1] - x[1])),
            ])
        over_slot = slots["in1"] if a_over else slots["in2"]
        xing = Crossing(xid, tuple(port_name(xid, s) for s in range(4)), over_slot)

        used: set[str] = set()
        new_a_id = _fresh_arc_id(d, arc_a.arc_id, used)
        used.add(new_a_id)
        new_b_id = _fresh_arc_id(d, arc_b.arc_id, used)
        if incoming:
            a_pre = Arc(arc_a.arc_id, arc_a.points[:-1] + (a_out, x),
                        arc_a.from_port, port_name(xid, slots["in1"]))
            a_post = Arc(new_a_id, (x, b_in, vpos),
                         port_name(xid, slots["out1"]), pb)
            b_pre = Arc(arc_b.arc_id, arc_b.points[:-1] + (b_out, x),
                        arc_b.from_port, port_name(xid, slots["in2"]))
            b_post = Arc(new_b_id, (x, a_in, vpos),
                         port_name(xid, slots["out2"]), pa)
        else:
            a_pre = Arc(new_a_id, (vpos, b_in, x),
                        pb, port_name(xid, slots["in1"]))
            a_post = Arc(arc_a.arc_id, (x, a_out) + arc_a.points[1:],
                         port_name(xid, slots["out1"]), arc_a.to_port)
            b_pre = Arc(new_b_id, (vpos, a_in, x),
                        pa, port_name(xid, slots["in2"]))
            b_post = Arc(arc_b.arc_id, (x, b_out) + arc_b.points[1:],
                         port_name(xid, slots["out2"]), arc_b.to_port)

        out = _replace_arc(d, arc_a.arc_id, [a_pre, a_post], [xing])
        out = _replace_arc(out, arc_b.arc_id, [b_pre, b_post])
        return _check(out, _is_open(d))


# --------------------------------------------------------------------------
# swing and switch


@dataclass(frozen=True)
class Swing:
    """Move one interior bend of an arc to a new position.

    The two triangles swept by the displaced segments must be clear of
    all other material; this is the planar shadow of swinging an arc
    over (or under) an extremum, and is direction-sensitive input for
    the braider.
    """

    arc_id: str
    point_index: int
    new_point: Point

    def _apply(self, d: Diagram) -> Diagram:
        arc = _get_arc(d, self.arc_id)
        k = self.point_index
        if not 0 < k < len(arc.points) - 1:
            raise ValueError("swing moves an interior bend")
        new = _pt(self.new_point)
        old = arc.points[k]
        before, after = arc.points[k - 1], arc.points[k + 1]
        if new in (old, before, after):
            raise ValueError("swing target coincides with an existing point")
        tris = ((before, old, new), (after, old, new))
        _region_clear(d, tris, {(self.arc_id, k - 1), (self.arc_id, k)}, "swing")
        pts = arc.points[:k] + (new,) + arc.points[k + 1:]
        out = _replace_arc(d, self.arc_id,
                           [Arc(arc.arc_id, pts, arc.from_port, arc.to_port)])
        return _check(out, _is_open(d))


@dataclass(frozen=True)
class Switch:
    """Flip over/under at a crossing both of whose strands attach
    directly to one common vertex.

    Only this vertex-adjacent shape is a legal switch; the move realises
    the diagram side of absorbing either crossing sign into the vertex.
    """

    crossing_id: str

    def _apply(self, d: Diagram) -> Diagram:
        xing = next((c for c in d.crossings if c.node_id == self.crossing_id), None)
        if xing is None:
            raise DiagramError(f"no crossing with id {self.crossing_id!r}")
        owner = d.port_owner()
        vertex_ids = {v.node_id for v in d.vertices}
        touched: dict[int, set[str]] = {}
        for slot, port in enumerate(xing.ports):
            arc = next(a for a in d.arcs
                       if a.from_port == port or a.to_port == port)
            far = arc.to_port if arc.from_port == port else arc.from_port
            if far is not None and far != port:
                nid, _ = owner[far]
                if nid in vertex_ids:
                    touched.setdefault(slot % 2, set()).add(nid)
        common = touched.get(0, set()) & touched.get(1, set())
        if not common:
            raise DiagramError(
                f"switch requires crossing {self.crossing_id!r} to connect "
                "to a vertex on both strands")
        flipped = Crossing(xing.node_id, xing.ports, (xing.over_slot + 1) % 4)
        xings = tuple(flipped if c.node_id == xing.node_id else c
                      for c in d.crossings)
        out = Diagram(arcs=d.arcs, crossings=xings, vertices=d.vertices)
        return _check(out, _is_open(d))


# --------------------------------------------------------------------------
# driver


def distort(d: Diagram, ops: Iterable[object]) -> Diagram:
    """Apply a sequence of distortion operations, validating after each.

    Affine operations map every coordinate exactly; site operations
    check their clearance requirements and raise
    :class:`SiteObstructionError` when blocked.  The result is a valid
    diagram whose spatial-graph isotopy class equals the input's.
    """
    was_open = _is_open(d)
    cur = d
    for op in ops:
        if isinstance(op, (Translate, Scale, Shear, PythagoreanRotation)):
            cur = _check(_apply_affine(cur, op._map()), was_open)
        elif isinstance(op, (ArcFold, Curl, Poke, Twirl, Swing, Switch)):
            cur = op._apply(cur)
        else:
            raise TypeError(f"unknown distortion op: {op!r}")
    return cur
