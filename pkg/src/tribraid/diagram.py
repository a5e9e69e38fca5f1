"""Piecewise-linear spatial trivalent graph diagrams with exact coordinates.

A diagram is a planar PL drawing of a trivalent spatial graph: arcs are
directed polylines with rational vertices, meeting at two kinds of
nodes.  A *crossing* is a transversal double point with four attached
arc ends and a designated over-strand; a *vertex* is a trivalent graph
vertex, either a ``zip`` (two strands merge into one) or an ``unzip``
(one strand splits into two).  Closed circles are arcs with no ports
whose first and last points coincide.

Three groups of functionality live here:

* the data model, structural/geometric validation, and the STGD1 JSON
  serialization;
* ``closure``: the standard closed-diagram layout of a closable braid
  word, which is the bridge from the word calculus to the diagram side;
* the underlying abstract graph and its exact canonical signature,
  which is the isotopy invariant the test-suite leans on: every diagram
  move must preserve it, and the braiding pipeline must return words
  whose closure reproduces it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DiagramError
from .geometry import (CROSS, DISJOINT, OVERLAP, TOUCH, Point, Segment,
                       bbox, segment_meet)
from .words import BraidWord, Letter, LetterKind, require_valid, strand_profile

ZIP = "zip"
UNZIP = "unzip"


@dataclass(frozen=True)
class Arc:
    """A directed polyline.  ``from_port``/``to_port`` name the node
    ports the ends attach to, or are None for a closed circle (in which
    case the first and last points coincide) or a free boundary end
    (internal to the braiding pipeline; rejected by public validation).
    """

    arc_id: str
    points: tuple[Point, ...]
    from_port: str | None = None
    to_port: str | None = None

    def __post_init__(self) -> None:
        pts = tuple((Fraction(x), Fraction(y)) for x, y in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise DiagramError(f"arc {self.arc_id!r} needs at least two points")

    @property
    def is_circle(self) -> bool:
        return (self.from_port is None and self.to_port is None
                and self.points[0] == self.points[-1])

    def segments(self) -> Iterator[tuple[int, Segment]]:
        for i in range(len(self.points) - 1):
            yield i, (self.points[i], self.points[i + 1])


@dataclass(frozen=True)
class Crossing:
    """A transversal double point.

    ``ports`` lists the four attached arc ends in cyclic order; opposite
    ports (0,2) and (1,3) belong to the same strand.  ``over_slot`` is
    the index of a port on the over-strand, which determines the over
    designation even when one arc attaches more than once (a curl
    crossing itself).
    """

    node_id: str
    ports: tuple[str, str, str, str]
    over_slot: int

    def __post_init__(self) -> None:
        if len(self.ports) != 4 or len(set(self.ports)) != 4:
            raise DiagramError(f"crossing {self.node_id!r} needs four distinct ports")
        if self.over_slot not in (0, 1, 2, 3):
            raise DiagramError(f"crossing {self.node_id!r}: over_slot must be 0..3")

    def strand_of(self, slot: int) -> tuple[int, int]:
        return (slot % 2, slot % 2 + 2)

    @property
    def over_strand(self) -> tuple[int, int]:
        return self.strand_of(self.over_slot)

    @property
    def under_strand(self) -> tuple[int, int]:
        a, b = self.strand_of(self.over_slot + 1)
        return (a, b)


@dataclass(frozen=True)
class Vertex:
    """A trivalent vertex.  Port patterns are fixed by kind:

    * zip:   ports = (in_left, in_right, out)
    * unzip: ports = (in, out_right, out_left)

    both read clockwise around the node in the standard layout.
    """

    node_id: str
    kind: str
    ports: tuple[str, str, str]

    def __post_init__(self) -> None:
        if self.kind not in (ZIP, UNZIP):
            raise DiagramError(f"vertex {self.node_id!r}: kind must be zip or unzip")
        if len(self.ports) != 3 or len(set(self.ports)) != 3:
            raise DiagramError(f"vertex {self.node_id!r} needs three distinct ports")


@dataclass(frozen=True)
class Diagram:
    """An immutable diagram: arcs plus crossing and vertex nodes."""

    arcs: tuple[Arc, ...]
    crossings: tuple[Crossing, ...]
    vertices: tuple[Vertex, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "arcs", tuple(self.arcs))
        object.__setattr__(self, "crossings", tuple(self.crossings))
        object.__setattr__(self, "vertices", tuple(self.vertices))

    def arc(self, arc_id: str) -> Arc:
        for a in self.arcs:
            if a.arc_id == arc_id:
                return a
        raise KeyError(arc_id)

    def node(self, node_id: str):
        for n in self.crossings + self.vertices:
            if n.node_id == node_id:
                return n
        raise KeyError(node_id)

    def port_owner(self) -> dict[str, tuple[str, int]]:
        """Map port id -> (node id, slot index)."""
        owner: dict[str, tuple[str, int]] = {}
        for n in self.crossings + self.vertices:
            for slot, p in enumerate(n.ports):
                owner[p] = (n.node_id, slot)
        return owner

    def port_positions(self) -> dict[str, Point]:
        """Map port id -> coordinate of the attached arc end."""
        pos: dict[str, Point] = {}
        for a in self.arcs:
            if a.from_port is not None:
                pos[a.from_port] = a.points[0]
            if a.to_port is not None:
                pos[a.to_port] = a.points[-1]
        return pos

    def node_positions(self) -> dict[str, Point]:
        """Node coordinates, derived from attached arc ends."""
        ppos = self.port_positions()
        out: dict[str, Point] = {}
        for n in self.crossings + self.vertices:
            for p in n.ports:
                if p in ppos:
                    out[n.node_id] = ppos[p]
                    break
        return out


def port_name(node_id: str, slot: int) -> str:
    return f"{node_id}.{slot}"


# ---------------------------------------------------------------------------
# Validation.


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    where: Point | None = None

    def __str__(self) -> str:
        if self.where is None:
            return f"[{self.code}] {self.message}"
        x, y = self.where
        return f"[{self.code}] {self.message} at ({x}, {y})"


@dataclass(frozen=True)
class DiagramReport:
    ok: bool
    violations: tuple[Violation, ...]

    @property
    def first(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def __bool__(self) -> bool:
        return self.ok


def _arc_end_node(arc: Arc, seg_index: int, end: int, owner, nsegs: int):
    """Node id attached at a segment endpoint, if that endpoint is a
    terminal point of the arc; None otherwise.  ``end`` is 0 for the
    segment start, 1 for its end."""
    if seg_index == 0 and end == 0 and arc.from_port is not None:
        info = owner.get(arc.from_port)
        return info[0] if info else None
    if seg_index == nsegs - 1 and end == 1 and arc.to_port is not None:
        info = owner.get(arc.to_port)
        return info[0] if info else None
    return None


def validate_diagram(d: Diagram, *, allow_open: bool = False) -> DiagramReport:
    """Check a diagram against the full data contract.

    Three layers, reported in deterministic order with the coordinates
    of the first geometric violation:

    1. structure: unique ids, every port attached by exactly one arc
       end, no free ends (unless ``allow_open``), circles closed;
    2. geometry: all arc ends of a node share one coordinate, node
       coordinates pairwise distinct, and exact planarity: the only
       permitted segment contacts are consecutive-bend touches within
       an arc and arc-end meetings at a declared node -- every other
       touch, crossing or collinear overlap is a violation;
    3. orientation: a zip has two incoming and one outgoing arc, an
       unzip one incoming and two outgoing, and each crossing strand
       passes through (one in, one out on opposite ports).
    """
    out: list[Violation] = []

    # --- structure ---------------------------------------------------
    seen_arc: set[str] = set()
    for a in d.arcs:
        if a.arc_id in seen_arc:
            out.append(Violation("dup-arc-id", f"duplicate arc id {a.arc_id!r}"))
        seen_arc.add(a.arc_id)
        for i, (p, q) in a.segments():
            if p == q:
                out.append(Violation("zero-segment",
                                     f"arc {a.arc_id!r} has a zero-length segment", p))
    seen_node: set[str] = set()
    for n in d.crossings + d.vertices:
        if n.node_id in seen_node:
            out.append(Violation("dup-node-id", f"duplicate node id {n.node_id!r}"))
        seen_node.add(n.node_id)
    owner = d.port_owner()
    if len(owner) != sum(len(n.ports) for n in d.crossings + d.vertices):
        out.append(Violation("dup-port-id", "a port id is declared by two nodes"))

    attach: dict[str, list[tuple[str, str]]] = {p: [] for p in owner}
    for a in d.arcs:
        for port, role in ((a.from_port, "from"), (a.to_port, "to")):
            if port is None:
                continue
            if port not in owner:
                out.append(Violation("unknown-port",
                                     f"arc {a.arc_id!r} references undeclared port {port!r}"))
            else:
                attach[port].append((a.arc_id, role))
        if a.from_port is None and a.to_port is None and not a.is_circle:
            if not allow_open:
                out.append(Violation("free-end",
                                     f"arc {a.arc_id!r} has free ends but is not a closed circle",
                                     a.points[0]))
        elif (a.from_port is None) != (a.to_port is None):
            if not allow_open:
                out.append(Violation("free-end",
                                     f"arc {a.arc_id!r} is attached at only one end",
                                     a.points[0] if a.from_port is None else a.points[-1]))
    for p, ends in attach.items():
        if len(ends) == 0:
            out.append(Violation("unattached-port", f"port {p!r} has no arc attached"))
        elif len(ends) > 1:
            out.append(Violation("double-attached-port",
                                 f"port {p!r} is attached by {len(ends)} arc ends"))
    if out:
        return DiagramReport(False, tuple(out))

    # --- node coordinates --------------------------------------------
    ppos = d.port_positions()
    npos: dict[str, Point] = {}
    for n in d.crossings + d.vertices:
        coords = {ppos[p] for p in n.ports if p in ppos}
        if len(coords) > 1:
            out.append(Violation("split-node",
                                 f"arc ends at node {n.node_id!r} do not share one point",
                                 next(iter(coords))))
        elif coords:
            npos[n.node_id] = next(iter(coords))
    positions_seen: dict[Point, str] = {}
    for nid, p in sorted(npos.items()):
        if p in positions_seen:
            out.append(Violation("coincident-nodes",
                                 f"nodes {positions_seen[p]!r} and {nid!r} share a point", p))
        positions_seen[p] = nid
    if out:
        return DiagramReport(False, tuple(out))

    # --- planarity except at declared nodes --------------------------
    segs: list[tuple[str, int, Segment]] = []
    arc_nsegs: dict[str, int] = {}
    arc_by_id = {a.arc_id: a for a in d.arcs}
    for a in d.arcs:
        arc_nsegs[a.arc_id] = len(a.points) - 1
        for i, s in a.segments():
            segs.append((a.arc_id, i, s))

    boxes = []
    for _, _, (p, q) in segs:
        boxes.append((min(p[0], q[0]), min(p[1], q[1]), max(p[0], q[0]), max(p[1], q[1])))

    for i in range(len(segs)):
        aid1, i1, s1 = segs[i]
        b1 = boxes[i]
        for j in range(i + 1, len(segs)):
            aid2, i2, s2 = segs[j]
            b2 = boxes[j]
            if b1[2] < b2[0] or b2[2] < b1[0] or b1[3] < b2[1] or b2[3] < b1[1]:
                continue
            same_arc = aid1 == aid2
            adjacent = same_arc and (i2 == i1 + 1 or
                                     (arc_by_id[aid1].is_circle and i1 == 0
                                      and i2 == arc_nsegs[aid1] - 1))
            kind, pnt = segment_meet(s1, s2)
            if kind == DISJOINT:
                continue
            if kind == OVERLAP:
                out.append(Violation("overlap",
                                     f"arcs {aid1!r} and {aid2!r} run along a common segment",
                                     s1[0]))
                continue
            if kind == CROSS:
                out.append(Violation("undeclared-crossing",
                                     f"arcs {aid1!r} and {aid2!r} cross without a declared node",
                                     pnt))
                continue
            # TOUCH: allowed only at a shared bend of adjacent segments
            # or at a declared node where both segments terminate.
            assert pnt is not None
            if adjacent:
                shared = s1[1] if i2 == i1 + 1 else s1[0]
                if pnt == shared:
                    continue
                out.append(Violation("self-touch",
                                     f"arc {aid1!r} touches itself away from a bend", pnt))
                continue
            n1 = n2 = None
            if pnt == s1[0]:
                n1 = _arc_end_node(arc_by_id[aid1], i1, 0, owner, arc_nsegs[aid1])
            elif pnt == s1[1]:
                n1 = _arc_end_node(arc_by_id[aid1], i1, 1, owner, arc_nsegs[aid1])
            if pnt == s2[0]:
                n2 = _arc_end_node(arc_by_id[aid2], i2, 0, owner, arc_nsegs[aid2])
            elif pnt == s2[1]:
                n2 = _arc_end_node(arc_by_id[aid2], i2, 1, owner, arc_nsegs[aid2])
            if n1 is not None and n1 == n2:
                continue
            out.append(Violation("illegal-touch",
                                 f"arcs {aid1!r} and {aid2!r} touch away from a shared node",
                                 pnt))
    if out:
        return DiagramReport(False, tuple(out))

    # --- orientation -------------------------------------------------
    direction: dict[str, str] = {}
    for a in d.arcs:
        if a.from_port is not None:
            direction[a.from_port] = "out"
        if a.to_port is not None:
            direction[a.to_port] = "in"
    for v in d.vertices:
        dirs = [direction.get(p) for p in v.ports]
        n_in = dirs.count("in")
        n_out = dirs.count("out")
        want = (2, 1) if v.kind == ZIP else (1, 2)
        if (n_in, n_out) != want:
            out.append(Violation("bad-orientation",
                                 f"{v.kind} vertex {v.node_id!r} has {n_in} incoming and "
                                 f"{n_out} outgoing arcs (wants {want[0]} in, {want[1]} out)",
                                 npos.get(v.node_id)))
    for c in d.crossings:
        for pair in ((0, 2), (1, 3)):
            dirs = sorted(direction.get(c.ports[k], "?") for k in pair)
            if dirs != ["in", "out"]:
                out.append(Violation("bad-orientation",
                                     f"crossing {c.node_id!r} strand {pair} does not pass "
                                     "through (needs one incoming and one outgoing arc)",
                                     npos.get(c.node_id)))
    return DiagramReport(not out, tuple(out))


def require_valid_diagram(d: Diagram, *, allow_open: bool = False) -> None:
    rep = validate_diagram(d, allow_open=allow_open)
    if not rep.ok:
        raise DiagramError(str(rep.first))


# ---------------------------------------------------------------------------
# STGD1 JSON serialization.


def _frac_json(v: Fraction) -> list[int]:
    return [v.numerator, v.denominator]


def _frac_parse(v, what: str) -> Fraction:
    if (not isinstance(v, list) or len(v) != 2
            or not all(isinstance(k, int) and not isinstance(k, bool) for k in v)):
        raise DiagramError(f"{what}: rational must be a [numerator, denominator] pair")
    num, den = v
    if den <= 0:
        raise DiagramError(f"{what}: denominator must be positive, got {den}")
    if math.gcd(num, den) != 1:
        raise DiagramError(f"{what}: rational {num}/{den} is not in lowest terms")
    return Fraction(num, den)


def diagram_to_json(d: Diagram) -> str:
    """Serialize to the STGD1 format.

    Deterministic: arcs and nodes keep their stored order, keys are
    emitted in a fixed order, rationals as reduced ``[num, den]`` pairs
    with positive denominator.  Each crossing carries ``over`` (an arc
    id on the over-strand); the ``over_slot`` field is added only when
    the over arc attaches to more than one port of the crossing, where
    the arc id alone would be ambiguous.
    """
    arc_at: dict[str, str] = {}
    for a in d.arcs:
        for p in (a.from_port, a.to_port):
            if p is not None:
                arc_at[p] = a.arc_id
    arcs = []
    for a in d.arcs:
        arcs.append({
            "id": a.arc_id,
            "points": [[_frac_json(x), _frac_json(y)] for x, y in a.points],
            "from_port": a.from_port,
            "to_port": a.to_port,
        })
    crossings = []
    for c in d.crossings:
        over_arc = arc_at.get(c.ports[c.over_slot])
        if over_arc is None:
            raise DiagramError(f"crossing {c.node_id!r} over port is unattached")
        entry = {"id": c.node_id, "ports": list(c.ports), "over": over_arc}
        if sum(1 for p in c.ports if arc_at.get(p) == over_arc) > 1:
            entry["over_slot"] = c.over_slot
        crossings.append(entry)
    vertices = [{"id": v.node_id, "kind": v.kind, "ports": list(v.ports)}
                for v in d.vertices]
    doc = {"format": "STGD1", "arcs": arcs, "crossings": crossings,
           "vertices": vertices}
    return json.dumps(doc, indent=1) + "\n"


def diagram_from_json(text: str) -> Diagram:
    """Parse STGD1.  Structural errors raise :class:`DiagramError`;
    geometric validity is a separate concern (``validate_diagram``)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DiagramError(f"not valid JSON: {e}") from None
    if not isinstance(doc, dict) or doc.get("format") != "STGD1":
        raise DiagramError("missing or wrong format marker (want STGD1)")
    for key in ("arcs", "crossings", "vertices"):
        if not isinstance(doc.get(key), list):
            raise DiagramError(f"field {key!r} must be a list")

    arcs = []
    for entry in doc["arcs"]:
        aid = entry.get("id")
        if not isinstance(aid, str):
            raise DiagramError("arc entry without string id")
        pts = entry.get("points")
        if not isinstance(pts, list) or len(pts) < 2:
            raise DiagramError(f"arc {aid!r}: needs a list of at least two points")
        points = []
        for k, p in enumerate(pts):
            if not isinstance(p, list) or len(p) != 2:
                raise DiagramError(f"arc {aid!r} point {k}: must be an [x, y] pair")
            points.append((_frac_parse(p[0], f"arc {aid!r} point {k} x"),
                           _frac_parse(p[1], f"arc {aid!r} point {k} y")))
        for port_key in ("from_port", "to_port"):
            if not (entry.get(port_key) is None or isinstance(entry.get(port_key), str)):
                raise DiagramError(f"arc {aid!r}: {port_key} must be a string or null")
        arcs.append(Arc(aid, tuple(points), entry.get("from_port"), entry.get("to_port")))

    arc_ports: dict[str, list[str]] = {}
    for a in arcs:
        for p in (a.from_port, a.to_port):
            if p is not None:
                arc_ports.setdefault(a.arc_id, []).append(p)

    crossings = []
    for entry in doc["crossings"]:
        cid = entry.get("id")
        ports = entry.get("ports")
        if not isinstance(cid, str) or not isinstance(ports, list) or len(ports) != 4:
            raise DiagramError("crossing entry needs a string id and four ports")
        over = entry.get("over")
        if not isinstance(over, str):
            raise DiagramError(f"crossing {cid!r}: over must be an arc id")
        if "over_slot" in entry:
            slot = entry["over_slot"]
            if slot not in (0, 1, 2, 3):
                raise DiagramError(f"crossing {cid!r}: over_slot must be 0..3")
            if over not in (None,) and ports[slot] not in arc_ports.get(over, ()):
                raise DiagramError(f"crossing {cid!r}: over_slot does not match over arc")
        else:
            slots = [k for k, p in enumerate(ports)
                     if p in arc_ports.get(over, ())]
            if not slots:
                raise DiagramError(f"crossing {cid!r}: over arc {over!r} is not attached")
            if len(slots) > 1:
                raise DiagramError(f"crossing {cid!r}: over arc {over!r} attaches twice; "
                                   "an over_slot field is required")
            slot = slots[0]
        crossings.append(Crossing(cid, tuple(ports), slot))

    vertices = []
    for entry in doc["vertices"]:
        vid = entry.get("id")
        ports = entry.get("ports")
        kind = entry.get("kind")
        if not isinstance(vid, str) or not isinstance(ports, list) or len(ports) != 3:
            raise DiagramError("vertex entry needs a string id and three ports")
        vertices.append(Vertex(vid, kind, tuple(ports)))

    return Diagram(tuple(arcs), tuple(crossings), tuple(vertices))


# ---------------------------------------------------------------------------
# Standard braid-box and closure layouts.


def _box_passages(word: BraidWord, bottom: Fraction):
    """Lay out the braid box of a word and return its strand passages.

    The box puts strand positions at integer x, the top boundary at
    y = 0, and letter t (1-based) in the horizontal strip
    -t <= y <= -t+1 with its node at (i + 1/2, -t + 1/2), where i is
    the letter index.  Strands drift diagonally within a strip when a
    zip/unzip shifts positions and run vertically otherwise; all of
    them finish at ``bottom``.

    Returns ``(by_start, crossings, vertices)`` where ``by_start`` maps
    each passage's start anchor -- ("top", j) or ("node", id, slot) --
    to its end anchor and point list.
    """
    n = word.top_count

    # One growing polyline per live strand position.  Each record is
    # [points, start_anchor]; anchors are ("top", j) or ("node", id, slot).
    live: list[list] = [[[(Fraction(j), Fraction(0))], ("top", j)]
                        for j in range(1, n + 1)]
    # Stubs finished inside the box: (start_anchor, end_anchor, points).
    stubs: list[tuple[tuple, tuple, list[Point]]] = []
    crossings: list[Crossing] = []
    vertices: list[Vertex] = []

    for t, letter in enumerate(word.letters, start=1):
        y_hi, y_lo = Fraction(1 - t), Fraction(-t)
        y_mid = Fraction(1 - 2 * t, 2)
        i = letter.index
        node_pt = (Fraction(2 * i + 1, 2), y_mid)
        if letter.kind is LetterKind.CROSSING:
            nid = f"x{len(crossings)}"
            over_slot = 0 if letter.sign > 0 else 1
            crossings.append(Crossing(nid, tuple(port_name(nid, s) for s in range(4)),
                                      over_slot))
            for k, slot in ((i - 1, 0), (i, 1)):  # NW in, NE in
                rec = live[k]
                rec[0].append((Fraction(k + 1), y_hi))
                rec[0].append(node_pt)
                stubs.append((rec[1], ("node", nid, slot), rec[0]))
            # SE out continues at position i+1, SW out at position i.
            live[i - 1] = [[node_pt, (Fraction(i), y_lo)], ("node", nid, 3)]
            live[i] = [[node_pt, (Fraction(i + 1), y_lo)], ("node", nid, 2)]
        elif letter.kind is LetterKind.ZIP:
            nid = f"v{len(vertices)}"
            vertices.append(Vertex(nid, ZIP, tuple(port_name(nid, s) for s in range(3))))
            for k, slot in ((i - 1, 0), (i, 1)):
                rec = live[k]
                rec[0].append((Fraction(k + 1), y_hi))
                rec[0].append(node_pt)
                stubs.append((rec[1], ("node", nid, slot), rec[0]))
            merged = [[node_pt, (Fraction(i), y_lo)], ("node", nid, 2)]
            tail = live[i + 1:]
            live = live[:i - 1] + [merged] + tail
            for off, rec in enumerate(tail):
                pos = i + 2 + off  # old position of this strand
                rec[0].append((Fraction(pos), y_hi))
                rec[0].append((Fraction(pos - 1), y_lo))
        else:  # UNZIP
            nid = f"v{len(vertices)}"
            vertices.append(Vertex(nid, UNZIP, tuple(port_name(nid, s) for s in range(3))))
            rec = live[i - 1]
            rec[0].append((Fraction(i), y_hi))
            rec[0].append(node_pt)
            stubs.append((rec[1], ("node", nid, 0), rec[0]))
            left = [[node_pt, (Fraction(i), y_lo)], ("node", nid, 2)]
            right = [[node_pt, (Fraction(i + 1), y_lo)], ("node", nid, 1)]
            tail = live[i:]
            live = live[:i - 1] + [left, right] + tail
            for off, rec2 in enumerate(tail):
                pos = i + 1 + off
                rec2[0].append((Fraction(pos), y_hi))
                rec2[0].append((Fraction(pos + 1), y_lo))

    # Every passage through the box, keyed by its start anchor.  Stubs
    # end at node in-ports; still-live records end at the bottom.
    by_start: dict[tuple, tuple[tuple, list[Point]]] = {}
    for start, end, pts in stubs:
        by_start[start] = (end, pts)
    for j, rec in enumerate(live, start=1):
        rec[0].append((Fraction(j), bottom))
        by_start[rec[1]] = (("bot", j), rec[0])
    return by_start, crossings, vertices


def _compress_collinear(pts: list[Point]) -> tuple[Point, ...]:
    out = [pts[0]]
    for p in pts[1:]:
        if p == out[-1]:
            continue
        if len(out) >= 2:
            a, b = out[-2], out[-1]
            if (b[0] - a[0]) * (p[1] - b[1]) == (b[1] - a[1]) * (p[0] - b[0]):
                out[-1] = p
                continue
        out.append(p)
    return tuple(out)


def _anchor_port(anchor: tuple) -> str | None:
    return None if anchor[0] in ("top", "bot") else port_name(anchor[1], anchor[2])


def braid_box(word: BraidWord) -> Diagram:
    """The open braid-box diagram of a word, without closure arcs.

    Strand ends at the top (y = 0) and bottom boundary are left
    unattached, so the result validates with ``allow_open=True``.  An
    empty word still gets a box of height one so its strands are honest
    segments.  Reading the box back with the braider's sweep recovers
    the word exactly.
    """
    require_valid(word)
    bottom = Fraction(-max(len(word), 1))
    by_start, crossings, vertices = _box_passages(word, bottom)
    order = sorted(by_start,
                   key=lambda k: (0, k[1], 0) if k[0] == "top" else (1, k[1], k[2]))
    arcs = tuple(
        Arc(f"a{i}", _compress_collinear(by_start[start][1]),
            _anchor_port(start), _anchor_port(by_start[start][0]))
        for i, start in enumerate(order))
    return Diagram(arcs, tuple(crossings), tuple(vertices))


def closure(word: BraidWord) -> Diagram:
    """The standard closed diagram of a closable braid word.

    The braid box is laid out as in :func:`braid_box`; the closure arc
    for boundary strand j leaves the bottom at (j, -L), drops to
    y = -L - (n+1-j), runs right to its lane at x = W + n + 1 - j
    (W = the maximum strand count over the profile, so lanes clear the
    widest part of the box), climbs the lane, and returns along
    y = n + 1 - j into the top at (j, 0).  Margins nest strictly
    (outermost for j = 1), which keeps closure arcs disjoint from each
    other and from the box.

    Crossing over-strand convention: a positive crossing is the one
    whose strand entering at the left position passes over.
    """
    profile = require_valid(word)
    if not word.is_closable:
        raise DiagramError(
            f"cannot close a word with boundary ({word.top_count}, {word.bottom_count})")
    n = word.top_count
    L = len(word)
    W = max(profile)
    by_start, crossings, vertices = _box_passages(word, Fraction(-L))

    def closure_points(j: int) -> list[Point]:
        m = Fraction(n + 1 - j)
        lane = Fraction(W + n + 1 - j)
        return [(Fraction(j), Fraction(-L)), (Fraction(j), -L - m), (lane, -L - m),
                (lane, m), (Fraction(j), m), (Fraction(j), Fraction(0))]

    # Stitch maximal strand chains into arcs.  A chain starts at a node
    # out-port and walks box passage -> closure arc -> box passage ...
    # until it ends at a node in-port; anything left over is a circle.
    arcs: list[Arc] = []
    used_tops: set[int] = set()
    arc_counter = 0

    node_starts = sorted((k for k in by_start if k[0] == "node"),
                         key=lambda k: (k[1], k[2]))
    for start in node_starts:
        pts: list[Point] = []
        cur = start
        while True:
            end, seg = by_start[cur]
            pts.extend(seg)
            if end[0] == "node":
                break
            j = end[1]
            pts.extend(closure_points(j))
            used_tops.add(j)
            cur = ("top", j)
        arcs.append(Arc(f"a{arc_counter}", _compress_collinear(pts),
                        port_name(start[1], start[2]), port_name(end[1], end[2])))
        arc_counter += 1

    for j0 in range(1, n + 1):
        if j0 in used_tops or ("top", j0) not in by_start:
            continue
        pts = []
        j = j0
        while True:
            used_tops.add(j)
            end, seg = by_start[("top", j)]
            if end[0] != "bot":
                raise AssertionError("circle chain hit a node")
            pts.extend(seg)
            j = end[1]
            pts.extend(closure_points(j))
            if j == j0:
                break
        arcs.append(Arc(f"a{arc_counter}", _compress_collinear(pts), None, None))
        arc_counter += 1

    return Diagram(tuple(arcs), tuple(crossings), tuple(vertices))


# ---------------------------------------------------------------------------
# Underlying abstract graph and its canonical signature.


@dataclass(frozen=True)
class UnderlyingGraph:
    """The abstract directed multigraph of a diagram.

    Vertices come from zip/unzip nodes; crossings are transparent and
    merely continue strands.  ``edges`` are (tail_vertex, head_vertex)
    pairs following strand orientation; ``circles`` counts components
    with no vertex at all.
    """

    vertex_kinds: tuple[tuple[str, str], ...]  # (vertex id, kind), diagram order
    edges: tuple[tuple[str, str], ...]
    circles: int

    @property
    def vertex_count(self) -> int:
        return len(self.vertex_kinds)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def component_count(self) -> int:
        parent = {v: v for v, _ in self.vertex_kinds}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        comps = len({find(v) for v, _ in self.vertex_kinds})
        return comps + self.circles

    @property
    def betti_number(self) -> int:
        vertexed_components = self.component_count - self.circles
        return self.edge_count - self.vertex_count + vertexed_components + self.circles


def underlying_graph(d: Diagram) -> UnderlyingGraph:
    """Extract the abstract graph by tracing strands through crossings."""
    owner = d.port_owner()
    nodes = {n.node_id: n for n in d.crossings + d.vertices}
    arc_at_port: dict[str, tuple[str, str]] = {}  # port -> (arc id, "from"/"to")
    for a in d.arcs:
        if a.from_port is not None:
            arc_at_port[a.from_port] = (a.arc_id, "from")
        if a.to_port is not None:
            arc_at_port[a.to_port] = (a.arc_id, "to")
    arcs = {a.arc_id: a for a in d.arcs}

    def continue_through(port: str) -> str | None:
        """Given an in-port of a crossing, the opposite out-port."""
        nid, slot = owner[port]
        node = nodes[nid]
        if not isinstance(node, Crossing):
            return None
        return node.ports[(slot + 2) % 4]

    edges: list[tuple[str, str]] = []
    circles = 0
    seen_arcs: set[str] = set()

    # Walk forward from every vertex out-port.
    for v in d.vertices:
        for p in v.ports:
            entry = arc_at_port.get(p)
            if entry is None or entry[1] != "from":
                continue
            arc_id = entry[0]
            tail = v.node_id
            while True:
                seen_arcs.add(arc_id)
                a = arcs[arc_id]
                end_port = a.to_port
                if end_port is None:
                    raise DiagramError(f"arc {a.arc_id!r} has a free end; "
                                       "the abstract graph needs a closed diagram")
                nid, _ = owner[end_port]
                node = nodes[nid]
                if isinstance(node, Vertex):
                    edges.append((tail, nid))
                    break
                nxt = continue_through(end_port)
                assert nxt is not None
                entry = arc_at_port.get(nxt)
                if entry is None or entry[1] != "from":
                    raise DiagramError(f"crossing {nid!r} does not pass through")
                arc_id = entry[0]

    # Remaining arcs belong to circles (pure cycles through crossings).
    for a in d.arcs:
        if a.arc_id in seen_arcs:
            continue
        if a.is_circle:
            seen_arcs.add(a.arc_id)
            circles += 1
            continue
        # follow the cycle through crossings, marking arcs
        arc_id = a.arc_id
        while arc_id not in seen_arcs:
            seen_arcs.add(arc_id)
            cur = arcs[arc_id]
            if cur.to_port is None:
                raise DiagramError(f"arc {cur.arc_id!r} has a free end; "
                                   "the abstract graph needs a closed diagram")
            nxt = continue_through(cur.to_port)
            if nxt is None:
                raise AssertionError("vertex reached from an unseen arc")
            arc_id = arc_at_port[nxt][0]
        circles += 1

    return UnderlyingGraph(tuple((v.node_id, v.kind) for v in d.vertices),
                           tuple(edges), circles)


def _canonical_graph_bytes(g: UnderlyingGraph) -> bytes:
    """Exact canonical encoding of the directed vertex-colored multigraph.

    Individualization-refinement: vertices start colored by kind; colors
    are refined by the multiset of (direction, multiplicity, neighbor
    color) over incident edges until stable; remaining symmetric cells
    are broken by individualizing each candidate in turn and recursing,
    keeping the lexicographically smallest full encoding.  Exhaustive,
    so exact for any input; intended for the small graphs that arise
    here (twelve vertices or fewer).
    """
    verts = [v for v, _ in g.vertex_kinds]
    kind_of = dict(g.vertex_kinds)
    if not verts:
        return repr((0, (), g.circles)).encode()

    index = {v: i for i, v in enumerate(verts)}
    out_adj: list[list[int]] = [[] for _ in verts]
    in_adj: list[list[int]] = [[] for _ in verts]
    for a, b in g.edges:
        out_adj[index[a]].append(index[b])
        in_adj[index[b]].append(index[a])

    def refine(colors: list[int]) -> list[int]:
        while True:
            sig = []
            for i in range(len(verts)):
                outs = sorted(colors[j] for j in out_adj[i])
                ins = sorted(colors[j] for j in in_adj[i])
                sig.append((colors[i], tuple(outs), tuple(ins)))
            ranks = {s: r for r, s in enumerate(sorted(set(sig)))}
            new = [ranks[s] for s in sig]
            if new == colors:
                return colors
            colors = new

    def encode(order: list[int]) -> bytes:
        pos = {v: r for r, v in enumerate(order)}
        edges = sorted((pos[index[a]], pos[index[b]]) for a, b in g.edges)
        kinds = tuple(kind_of[verts[v]] for v in order)
        return repr((len(verts), kinds, tuple(edges), g.circles)).encode()

    best: list[bytes] = []

    def search(colors: list[int]) -> None:
        colors = refine(colors)
        cells: dict[int, list[int]] = {}
        for i, c in enumerate(colors):
            cells.setdefault(c, []).append(i)
        split = [c for c, members in cells.items() if len(members) > 1]
        if not split:
            order = sorted(range(len(verts)), key=lambda i: colors[i])
            enc = encode(order)
            if not best or enc < best[0]:
                best[:] = [enc]
            return
        target = min(split)
        for i in cells[target]:
            nxt = list(colors)
            nxt[i] = -1  # individualize: strictly smaller than any rank
            search(nxt)

    base = [0 if kind_of[v] == ZIP else 1 for v in verts]
    search(base)
    return best[0]


def graph_signature(d: Diagram) -> tuple[int, int, int, int, bytes]:
    """(vertices, edges, components, first Betti number, canonical bytes).

    Invariant under every diagram move in this package: distortions,
    vertex regularization, preparation and braiding all preserve it,
    and for closures of braid words it matches the combinatorial graph
    of the word.  The canonical byte string makes the comparison exact
    rather than merely numeric.
    """
    g = underlying_graph(d)
    return (g.vertex_count, g.edge_count, g.component_count, g.betti_number,
            _canonical_graph_bytes(g))
