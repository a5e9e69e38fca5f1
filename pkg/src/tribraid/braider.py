"""Braiding spatial trivalent graph diagrams into trivalent braid words.

The pipeline turns any valid closed diagram into a closable braid word
whose closure is isotopic to the input:

1. :func:`regularize_vertices` redraws every vertex so all three of its
   incident arc-ends descend away from it locally, inserting at most one
   crossing per vertex.
2. :func:`prepare` shears the diagram into general position, designates
   subdivision points at extrema, chains the climbing pieces into units,
   labels them over or under, and refines until same-label sliding
   triangles are disjoint.
3. :func:`braid_up_arc` eliminates one unit: its material is removed and
   replaced by two monotone-down strands through a vertical lane at the
   unit's top-endpoint x, crossing everything they traverse uniformly
   over or under per the unit's label.  Each elimination is an ambient
   isotopy of the current embedding (slide the climbing strand out along
   its sliding triangle, then around the outside of the diagram), so the
   isotopy class is preserved step by step.
4. :func:`read_word` sweeps the fully braided, all-descending diagram
   top to bottom and emits one letter per crossing or vertex.

Exactness discipline: every perturbation is a global rational shear or a
probed rational point whose forbidden values are computed exactly and
avoided exactly; no epsilon comparison occurs anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .diagram import (
    Arc,
    Crossing,
    Diagram,
    Vertex,
    ZIP,
    UNZIP,
    port_name,
    require_valid_diagram,
)
from .distort import (
    _assign_slots,
    _fresh_arc_id,
    _fresh_node_id,
    _seg_param,
    _sign_pick,
    _wire_split,
)
from .errors import BraidingError, DiagramError
from .geometry import (
    Affine,
    CROSS,
    DISJOINT,
    Point,
    TOUCH,
    linf_point_segment,
    on_segment,
    segment_meet,
    triangles_overlap,
)
from .gp import (
    OVER,
    UNDER,
    _locate,
    effective_labels,
    is_general_position,
    split_arc_points,
    units_of,
)
from .words import BraidWord, Letter, require_valid as require_valid_word

__all__ = [
    "BraiderConfig",
    "BraidUnit",
    "PreparedDiagram",
    "regularize_vertices",
    "prepare",
    "braid_up_arc",
    "braid",
    "read_word",
    "canonical_diagram",
]


@dataclass(frozen=True)
class BraiderConfig:
    """Deterministic choices the algorithm is free to make.

    ``default_label`` labels climbing units that pass through no
    crossing; ``insertion_sign`` is the sign of the crossing inserted
    when a vertex needs one to reach regular position.  Both choices
    change the output word only within its move-equivalence class.
    ``relaxed_units`` lets a unit keep several crossings when they all
    agree in role instead of splitting down to one crossing each.
    """

    default_label: str = OVER
    insertion_sign: int = 1
    processing_order: str = "top-down"
    relaxed_units: bool = False

    def __post_init__(self) -> None:
        if self.default_label not in (OVER, UNDER):
            raise ValueError("default_label must be 'over' or 'under'")
        if self.insertion_sign not in (1, -1):
            raise ValueError("insertion_sign must be +1 or -1")
        if self.processing_order != "top-down":
            raise ValueError("the only supported processing order is 'top-down'")


@dataclass(frozen=True)
class BraidUnit:
    """One climbing unit scheduled for braiding.

    ``points`` runs from the bottom endpoint B to the top endpoint T.
    The snapshot identifies the unit's material geometrically;
    coordinates never move between preparation and braiding, so lookup
    stays stable even after other units' lanes split and rename arcs.
    """

    uid: str
    pieces: tuple[tuple[str, int], ...]
    points: tuple[Point, ...]
    label: str

    @property
    def bottom(self) -> Point:
        return self.points[0]

    @property
    def top(self) -> Point:
        return self.points[-1]

    @property
    def triangle(self) -> tuple[Point, Point, Point]:
        b, t = self.points[0], self.points[-1]
        return (b, t, (t[0], b[1]))


@dataclass(frozen=True)
class PreparedDiagram:
    """A diagram in general position plus the braider's worksheet.

    ``subdivision`` records the designated points under the arc ids they
    had at preparation time.  ``units`` lists the still-unbraided units
    in processing order (top endpoint y descending, then x ascending).
    """

    diagram: Diagram
    subdivision: tuple[tuple[str, tuple[Point, ...]], ...]
    units: tuple[BraidUnit, ...]
    braided: tuple[str, ...]
    sky_top: Fraction
    sky_bot: Fraction
    regularization: tuple[tuple[str, str], ...] = ()

    @property
    def subdivision_map(self) -> dict[str, tuple[Point, ...]]:
        return dict(self.subdivision)

    @property
    def triangles(self) -> tuple[tuple[str, tuple[Point, Point, Point]], ...]:
        return tuple((u.uid, u.triangle) for u in self.units)


# ---------------------------------------------------------------------------
# vertex regularization


def _incident_ends(d: Diagram, v: Vertex) -> list[tuple[int, Arc, bool, Point]]:
    """(slot, arc, is_incoming, neighbour point) for each vertex port."""
    out = []
    for slot, port in enumerate(v.ports):
        for a in d.arcs:
            if a.to_port == port:
                out.append((slot, a, True, a.points[-2]))
                break
            if a.from_port == port:
                out.append((slot, a, False, a.points[1]))
                break
        else:
            raise DiagramError(f"vertex {v.node_id!r} port {port!r} is unattached")
    return out


def _vertex_regular(pos: Point, ends) -> bool:
    for _, _, incoming, nb in ends:
        if incoming and nb[1] <= pos[1]:
            return False
        if not incoming and nb[1] >= pos[1]:
            return False
    return True


def _linf(p: Point, q: Point) -> Fraction:
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]))


def _box_u(pos: Point, h: Fraction, p: Point) -> Fraction:
    """Clockwise square-boundary coordinate, u in [0, 8), with u = 0 at
    the top-left corner of the box of half-width h around pos."""
    x, y = p[0] - pos[0], p[1] - pos[1]
    if y == h and x < h:
        return x / h + 1
    if x == h and y > -h:
        return 3 - y / h
    if y == -h and x > -h:
        return 5 - x / h
    if x == -h and y < h:
        return 7 + y / h
    raise BraidingError("point is not on the routing box boundary")


def _box_point(pos: Point, h: Fraction, r: Fraction, u: Fraction) -> Point:
    u = u % 8
    if u < 2:
        return (pos[0] + (u - 1) * r, pos[1] + r)
    if u < 4:
        return (pos[0] + r, pos[1] + (3 - u) * r)
    if u < 6:
        return (pos[0] + (5 - u) * r, pos[1] - r)
    return (pos[0] - r, pos[1] + (u - 7) * r)


# Regular layout around a vertex: incoming strands approach from above,
# outgoing strands leave downward, in the clockwise slot order the
# vertex declares.
_TARGET_U = {
    ZIP: {0: Fraction(0), 1: Fraction(2), 2: Fraction(5)},
    UNZIP: {0: Fraction(1), 1: Fraction(4), 2: Fraction(6)},
}
_SAME_ROLE = {ZIP: (0, 1), UNZIP: (1, 2)}


def _clearance(d: Diagram, v: Vertex, pos: Point, ends) -> Fraction:
    """Half-width of a square around the vertex containing nothing but
    the vertex and its three incident first segments."""
    skip = set()
    for _, a, incoming, _ in ends:
        idx = len(a.points) - 2 if incoming else 0
        skip.add((a.arc_id, idx))
    best: Fraction | None = None
    for a in d.arcs:
        for p in a.points:
            if p != pos:
                dd = _linf(pos, p)
                if best is None or dd < best:
                    best = dd
        for i, seg in a.segments():
            if (a.arc_id, i) in skip:
                continue
            dd = linf_point_segment(pos, seg)
            if dd > 0 and (best is None or dd < best):
                best = dd
    if best is None or best <= 0:
        raise BraidingError(f"no clearance around vertex {v.node_id!r}")
    return best / 4


def _cyclic_match(seq_a, seq_b) -> bool:
    if len(seq_a) != len(seq_b):
        return False
    k = len(seq_a)
    doubled = list(seq_b) + list(seq_b)
    return any(list(seq_a) == doubled[i:i + k] for i in range(k))


def _lift_targets(exits, targets) -> list[Fraction]:
    """Lift cyclic target coordinates to the reals so the routed curves
    keep their cyclic order.

    Both sequences are indexed identically and sorted by exit.  The
    lifts start within half a turn of the first exit, increase strictly,
    and span less than a full turn; interpolating linearly from exits to
    lifts then keeps every pairwise difference inside (0, 8), so the
    ladder curves never collide in the routing annulus.
    """
    t0 = targets[0]
    while t0 - exits[0] >= 4:
        t0 -= 8
    while t0 - exits[0] < -4:
        t0 += 8
    lifts = [t0]
    for i in range(1, len(targets)):
        gap = (targets[i] - targets[i - 1]) % 8
        if gap == 0:
            raise BraidingError("duplicate routing targets")
        lifts.append(lifts[-1] + gap)
    return lifts


def _route_vertex(d: Diagram, v: Vertex, cfg: BraiderConfig,
                  xid: str) -> tuple[Diagram, str] | None:
    """Redraw one vertex in regular position inside its clear box.

    Returns the rewritten diagram and an action token, or None when the
    vertex is already regular; in that case the diagram object is left
    untouched, which makes regularization idempotent bit for bit.
    """
    ends = _incident_ends(d, v)
    pos = d.node_positions()[v.node_id]
    if _vertex_regular(pos, ends):
        return None
    h = _clearance(d, v, pos, ends)

    info = {}
    for slot, a, incoming, nb in ends:
        t = h / _linf(pos, nb)
        cut = (pos[0] + (nb[0] - pos[0]) * t, pos[1] + (nb[1] - pos[1]) * t)
        info[slot] = {"arc": a, "in": incoming, "cut": cut,
                      "u": _box_u(pos, h, cut)}

    targets = dict(_TARGET_U[v.kind])
    order_exit = sorted(info, key=lambda s: info[s]["u"])
    parity_even = _cyclic_match(
        order_exit, sorted(targets, key=lambda s: targets[s]))
    if not parity_even:
        ra, rb = _SAME_ROLE[v.kind]
        targets[ra], targets[rb] = targets[rb], targets[ra]
        if not _cyclic_match(order_exit,
                             sorted(targets, key=lambda s: targets[s])):
            raise BraidingError("vertex routing parity did not resolve")
    lifts = _lift_targets([info[s]["u"] for s in order_exit],
                          [targets[s] for s in order_exit])
    lift_of = dict(zip(order_exit, lifts))
    swapped = [s for s in info if targets[s] != _TARGET_U[v.kind][s]]

    def build_paths(rungs: int):
        paths = {}
        legs = {}
        for slot in info:
            e, t = info[slot]["u"], lift_of[slot]
            pts = []
            for k in range(rungs):
                s = Fraction(k, rungs - 1)
                pts.append(_box_point(pos, h, h - s * h * Fraction(7, 8),
                                      e + s * (t - e)))
            if slot in swapped:
                small = _box_point(pos, h, h / 16, _TARGET_U[v.kind][slot])
                legs[slot] = (pts[-1], small)
                pts += [small, pos]
            else:
                pts.append(pos)
            paths[slot] = pts
        return paths, legs

    def routing_clear(paths, legs) -> bool:
        segs = []
        for slot, pts in paths.items():
            segs.extend((slot, i, (pts[i], pts[i + 1]))
                        for i in range(len(pts) - 1))
        leg_geoms = set(legs.values())
        for i in range(len(segs)):
            for j in range(i + 1, len(segs)):
                s1, k1, g1 = segs[i]
                s2, k2, g2 = segs[j]
                kind, pt = segment_meet(g1, g2)
                if kind == DISJOINT:
                    continue
                if kind == TOUCH and pt is not None:
                    if s1 == s2 and abs(k1 - k2) == 1 and pt in g1 and pt in g2:
                        continue
                    if pt == pos:
                        continue
                if (kind == CROSS and s1 != s2
                        and g1 in leg_geoms and g2 in leg_geoms):
                    continue
                return False
        return True

    rungs = 8
    for _ in range(7):
        paths, legs = build_paths(rungs)
        if routing_clear(paths, legs):
            break
        rungs = rungs * 2 - 1
    else:
        raise BraidingError(
            f"routing around vertex {v.node_id!r} did not stabilise")

    # When the cyclic order had to be repaired by swapping the same-role
    # pair, the two final approach legs cross; that crossing is the one
    # move-equivalent insertion the rewrite is allowed.
    new_crossing = None
    crossing_point: Point | None = None
    stub_ports: dict[int, tuple[str, str]] = {}
    if swapped:
        sa, sb = sorted(swapped)
        kind, x = segment_meet(legs[sa], legs[sb])
        if kind != CROSS or x is None:
            raise BraidingError("vertex crossing legs failed to cross")
        crossing_point = x
        trav = {}
        for s in (sa, sb):
            a0, a1 = legs[s]
            trav[s] = (a1[0] - a0[0], a1[1] - a0[1]) if info[s]["in"] \
                else (a0[0] - a1[0], a0[1] - a1[1])
        first_over = _sign_pick(cfg.insertion_sign, trav[sa], trav[sb])
        slots = _assign_slots([
            ("in1", (-trav[sa][0], -trav[sa][1])), ("out1", trav[sa]),
            ("in2", (-trav[sb][0], -trav[sb][1])), ("out2", trav[sb])])
        over_slot = slots["in1"] if first_over else slots["in2"]
        new_crossing = Crossing(
            xid, tuple(port_name(xid, s) for s in range(4)), over_slot)
        for s, ti, to in ((sa, "in1", "out1"), (sb, "in2", "out2")):
            pts = paths[s]
            i = pts.index(legs[s][0])
            paths[s] = pts[:i + 1] + [x] + pts[i + 1:]
            stub_ports[s] = (port_name(xid, slots[ti]),
                             port_name(xid, slots[to]))

    edits: dict[str, dict[str, int]] = {}
    for slot, e in info.items():
        key = "tail" if e["in"] else "head"
        edits.setdefault(e["arc"].arc_id, {})[key] = slot

    new_arcs: list[Arc] = []
    for a in d.arcs:
        ed = edits.get(a.arc_id)
        if not ed:
            new_arcs.append(a)
            continue
        pts = list(a.points)
        if "tail" in ed:
            pts = pts[:-1] + paths[ed["tail"]]
        if "head" in ed:
            pts = list(reversed(paths[ed["head"]])) + pts[1:]
        xslot = next((s for s in ed.values() if s in stub_ports), None)
        if xslot is None:
            new_arcs.append(Arc(a.arc_id, tuple(pts), a.from_port, a.to_port))
            continue
        # the rewritten polyline runs in travel order, so the piece
        # before the inserted crossing ends at its incoming half-edge
        i = pts.index(crossing_point)
        in_port, out_port = stub_ports[xslot]
        new_arcs.append(Arc(a.arc_id, tuple(pts[:i + 1]), a.from_port, in_port))
        new_arcs.append(Arc(_fresh_arc_id(d, a.arc_id, set()),
                            tuple(pts[i:]), out_port, a.to_port))

    crossings = d.crossings + ((new_crossing,) if new_crossing else ())
    ups = sum(1 for _, _, inc, nb in ends
              if (inc and nb[1] <= pos[1]) or (not inc and nb[1] >= pos[1]))
    action = f"rerouted-{ups}up" + ("-crossing" if new_crossing else "")
    return Diagram(tuple(new_arcs), crossings, d.vertices), action


def _regularize(d: Diagram, cfg: BraiderConfig
                ) -> tuple[Diagram, list[tuple[str, str]]]:
    log: list[tuple[str, str]] = []
    used: set[str] = set()
    for v in sorted(d.vertices, key=lambda v: v.node_id):
        xid = _fresh_node_id(d, used)
        routed = _route_vertex(d, v, cfg, xid)
        if routed is None:
            continue
        used.add(xid)
        d, action = routed
        log.append((v.node_id, action))
    return d, log


def regularize_vertices(d: Diagram, cfg: BraiderConfig | None = None) -> Diagram:
    """Rewrite the diagram so every vertex sees only locally descending
    arc-ends.

    Each irregular vertex is redrawn inside a box known to contain
    nothing else: the three incident strands are led along a square
    ladder to standard approach directions.  When the cyclic order of
    the strands around the box disagrees with the target order, the two
    same-role strands are swapped and one compensating crossing with the
    configured sign is inserted next to the vertex; otherwise the
    rewrite is a pure planar isotopy.  Already-regular vertices are left
    bit-for-bit untouched, so the map is idempotent.
    """
    cfg = cfg or BraiderConfig()
    require_valid_diagram(d)
    out, _ = _regularize(d, cfg)
    if out is not d:
        require_valid_diagram(out)
    return out


# ---------------------------------------------------------------------------
# preparation


def _all_points(d: Diagram) -> list[Point]:
    seen: set[Point] = set()
    out: list[Point] = []
    for a in d.arcs:
        for p in a.points:
            if p not in seen:
                seen.add(p)
                out.append(p)
    return out


def _pick_dyadic(bad: set[Fraction], below: Fraction | None = None) -> Fraction:
    k = 1
    while k < 4096:
        v = Fraction(1, 2 ** k)
        if (below is None or v < below) and v not in bad:
            return v
        k += 1
    raise BraidingError("no admissible shear value found")  # pragma: no cover


def _apply_affine(d: Diagram, f: Affine) -> Diagram:
    arcs = tuple(Arc(a.arc_id, tuple(f(p) for p in a.points),
                     a.from_port, a.to_port) for a in d.arcs)
    return Diagram(arcs, d.crossings, d.vertices)


def _shear_generic(d: Diagram) -> Diagram:
    """Two global shears that remove every horizontal and vertical
    segment and every coordinate tie between any two points.

    The vertical shear (y += mu*x) stays below every segment's slope so
    no segment reverses vertical direction, preserving vertex
    regularity; afterwards all points have distinct y, so the horizontal
    shear (x += lambda*y) can separate every x without creating y ties.
    """
    pts = _all_points(d)
    bad: set[Fraction] = set()
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            if p[0] != q[0]:
                bad.add(Fraction(q[1] - p[1], p[0] - q[0]))
    margin: Fraction | None = None
    for a in d.arcs:
        for _, (p, q) in a.segments():
            if q[0] != p[0] and q[1] != p[1]:
                m = abs(Fraction(q[1] - p[1], q[0] - p[0]))
                if margin is None or m < margin:
                    margin = m
    d = _apply_affine(d, Affine.shear_y(_pick_dyadic(bad, margin)))

    pts = _all_points(d)
    bad = set()
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            if p[1] == q[1]:
                raise BraidingError("vertical shear left a y tie")
            bad.add(Fraction(q[0] - p[0], p[1] - q[1]))
    return _apply_affine(d, Affine.shear_x(_pick_dyadic(bad)))


def _extrema_subdivision(d: Diagram) -> dict[str, list[Point]]:
    sub: dict[str, list[Point]] = {}
    for a in d.arcs:
        for k in range(1, len(a.points) - 1):
            before = a.points[k][1] - a.points[k - 1][1]
            after = a.points[k + 1][1] - a.points[k][1]
            if (before > 0) != (after > 0):
                sub.setdefault(a.arc_id, []).append(a.points[k])
    return sub


def _probe_fractions():
    for k in range(1, 13):
        step = Fraction(1, 2 ** k)
        t = step
        while t < 1:
            yield t
            t += 2 * step


def _generic_cut(seg: tuple[Point, Point], used_x: set[Fraction],
                 used_y: set[Fraction]) -> Point:
    a, b = seg
    for t in _probe_fractions():
        p = (a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)
        if p[0] not in used_x and p[1] not in used_y:
            return p
    raise BraidingError("no generic cut point found")  # pragma: no cover


def _owning_segment(d: Diagram, p: Point, q: Point) -> tuple[str, tuple[Point, Point]]:
    """Arc owning the path stretch (p, q); the stretch may be a proper
    sub-segment when p or q is a designated subdivision point."""
    for a in d.arcs:
        for _, seg in a.segments():
            if on_segment(p, seg) and on_segment(q, seg):
                return a.arc_id, (p, q)
    raise BraidingError("path segment not found on any arc")  # pragma: no cover


def _unit_roles(d: Diagram, unit) -> set[str]:
    byid = {c.node_id: c for c in d.crossings}
    return {OVER if slot in byid[nid].over_strand else UNDER
            for nid, slot in unit.crossings}


def prepare(d: Diagram, cfg: BraiderConfig | None = None, *,
            extra_cuts: tuple[tuple[str, int, "Fraction"], ...] = (),
            _regularization: tuple[tuple[str, str], ...] = ()) -> PreparedDiagram:
    """Bring a closed diagram with regular vertices into general
    position and plan its braiding.

    ``extra_cuts`` requests additional subdivision points, each given
    parametrically as (arc id, segment index, parameter in (0, 1)) on
    the input diagram; the parametrisation commutes with the shears, so
    callers need not know the sheared coordinates.  Any refinement of a
    clean subdivision stays clean, but a cut whose sheared coordinates
    collide with an existing feature is refused -- pick a nearby
    parameter instead.

    Raises :class:`DiagramError` if a vertex still has a locally
    ascending incident arc-end; run :func:`regularize_vertices` first.
    """
    cfg = cfg or BraiderConfig()
    require_valid_diagram(d)
    for v in d.vertices:
        if not _vertex_regular(d.node_positions()[v.node_id],
                               _incident_ends(d, v)):
            raise DiagramError(
                f"vertex {v.node_id!r} has an ascending incident arc-end; "
                "regularize the diagram before preparing it")

    d = _shear_generic(d)
    subdivision = _extrema_subdivision(d)
    used_x = {p[0] for p in _all_points(d)}
    used_y = {p[1] for p in _all_points(d)}
    for pts in subdivision.values():
        for p in pts:
            used_x.add(p[0])
            used_y.add(p[1])

    for aid, seg_idx, t in extra_cuts:
        try:
            arc = d.arc(aid)
        except KeyError:
            raise BraidingError(f"extra cut names unknown arc {aid!r}") from None
        if not 0 <= seg_idx < len(arc.points) - 1:
            raise BraidingError(f"extra cut segment {seg_idx} out of range "
                                f"for arc {aid!r}")
        t = Fraction(t)
        if not 0 < t < 1:
            raise BraidingError("extra cut parameter must be strictly interior")
        u, w = arc.points[seg_idx], arc.points[seg_idx + 1]
        p = (u[0] + (w[0] - u[0]) * t, u[1] + (w[1] - u[1]) * t)
        if p[0] in used_x or p[1] in used_y:
            raise BraidingError(
                f"extra cut at t={t} on arc {aid!r} collides with an "
                "existing feature; choose a different parameter")
        subdivision.setdefault(aid, []).append(p)
        used_x.add(p[0])
        used_y.add(p[1])

    def add_cut(arc_id: str, seg: tuple[Point, Point]) -> None:
        p = _generic_cut(seg, used_x, used_y)
        subdivision.setdefault(arc_id, []).append(p)
        used_x.add(p[0])
        used_y.add(p[1])

    npos = d.node_positions()

    # Separate crossings until each unit carries at most one (or, in
    # relaxed mode, only crossings of a single role).
    for _ in range(64):
        units = units_of(d, subdivision)
        work = [u for u in units
                if len(u.crossings) >= 2
                and not (cfg.relaxed_units and len(_unit_roles(d, u)) == 1)]
        if not work:
            break
        for u in work:
            i = u.points.index(npos[u.crossings[0][0]])
            aid, seg = _owning_segment(d, u.points[i], u.points[i + 1])
            add_cut(aid, seg)
    else:
        raise BraidingError("crossing separation did not converge")

    # Refine until same-label sliding triangles of non-adjacent units
    # are interior-disjoint.  Splitting shrinks triangles toward the
    # units' own paths, which are pairwise disjoint, so this terminates.
    for _ in range(1000):
        units = units_of(d, subdivision)
        labels = effective_labels(d, units, None, cfg.default_label)
        offenders: list = []
        seen: set[int] = set()
        for i in range(len(units)):
            for j in range(i + 1, len(units)):
                a, b = units[i], units[j]
                if labels[a.key] != labels[b.key]:
                    continue
                if {a.points[0], a.points[-1]} & {b.points[0], b.points[-1]}:
                    continue
                if triangles_overlap(a.triangle, b.triangle):
                    for k in (i, j):
                        if k not in seen:
                            seen.add(k)
                            offenders.append(units[k])
        if not offenders:
            break
        for u in offenders:
            m = (len(u.points) - 1) // 2
            aid, seg = _owning_segment(d, u.points[m], u.points[m + 1])
            add_cut(aid, seg)
    else:
        raise BraidingError("triangle refinement did not converge")

    report = is_general_position(d, subdivision, None, cfg.default_label)
    if not report:
        raise BraidingError(
            "preparation failed to reach general position: "
            + "; ".join(v.message for v in report.violations))

    units = units_of(d, subdivision)
    labels = effective_labels(d, units, None, cfg.default_label)
    ys = [p[1] for p in _all_points(d)]
    return PreparedDiagram(
        diagram=d,
        subdivision=tuple(sorted((aid, tuple(pts))
                                 for aid, pts in subdivision.items())),
        units=tuple(BraidUnit(f"u{i}", u.pieces, u.points, labels[u.key])
                    for i, u in enumerate(units)),
        braided=(),
        sky_top=max(ys) + 1,
        sky_bot=min(ys) - 1,
        regularization=_regularization,
    )


# ---------------------------------------------------------------------------
# braiding one unit


def _arc_on_path(pts, path) -> bool:
    """True when the whole polyline runs forward along the path."""
    locs = []
    for q in pts:
        loc = _locate(path, q)
        if loc is None:
            return False
        locs.append(loc)
    for l1, l2 in zip(locs, locs[1:]):
        if not l1 < l2:
            return False
    for p, q in zip(pts, pts[1:]):
        mid = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
        if _locate(path, mid) is None:
            return False
    return True


def _select_unit(p: PreparedDiagram, key: str) -> BraidUnit:
    for u in p.units:
        if u.uid == key:
            return u
    matches = [u for u in p.units if any(aid == key for aid, _ in u.pieces)]
    if len(matches) == 1:
        return matches[0]
    if len(matches) > 1:
        raise BraidingError(
            f"arc {key!r} carries several units "
            f"({', '.join(u.uid for u in matches)}); braid them by unit id")
    if key in p.braided:
        raise BraidingError(f"unit {key!r} is already braided")
    raise BraidingError(f"{key!r} does not name an up-arc unit of this diagram")


def braid_up_arc(p: PreparedDiagram, arc_id: str) -> PreparedDiagram:
    """Eliminate one climbing unit by an ambient isotopy of the diagram.

    The unit's material is removed; crossings it passed through are
    dissolved (the other strand straightens through them); a vertical
    sky strand drops from above the diagram to the unit's top endpoint,
    and a bottom strand descends from the unit's bottom endpoint into a
    vertical lane at the same x, ending below everything.  Both new
    strands cross every strand they traverse on the same side, given by
    the unit's label: sliding the material out along its sliding
    triangle and around the diagram realises exactly these crossings.
    """
    unit = _select_unit(p, arc_id)
    d = p.diagram
    path = unit.points
    B, T = path[0], path[-1]
    lane = T[0]

    material = [a for a in d.arcs if _arc_on_path(a.points, path)]
    mat_ids = {a.arc_id for a in material}
    pool: list[Arc] = [a for a in d.arcs if a.arc_id not in mat_ids]
    all_ids = {a.arc_id for a in d.arcs}

    def fresh(base: str) -> str:
        stub = Diagram(tuple(Arc(i, ((Fraction(0), Fraction(0)),
                                     (Fraction(1), Fraction(1))), None, None)
                             for i in all_ids), (), ())
        aid = _fresh_arc_id(stub, base, set())
        all_ids.add(aid)
        return aid

    b_port = next((a.from_port for a in material if a.points[0] == B), None)
    t_port = next((a.to_port for a in material if a.points[-1] == T), None)

    # Split arcs that carry B or T without being material end to end;
    # the climbing stretch joins the removed material, the rest survives.
    for a in list(pool):
        has_b = b_port is None and _locate(a.points, B) is not None
        has_t = t_port is None and _locate(a.points, T) is not None
        if not (has_b or has_t):
            continue
        pool.remove(a)
        if a.is_circle:
            if not (has_b and has_t):
                raise BraidingError(
                    "unit climbs a circle but an endpoint lies elsewhere")
            i, t = _locate(a.points, B)
            base = list(a.points[:-1])
            rot = ([B] + base[i + 1:] + base[:i + 1] if t > 0
                   else base[i:] + base[:i]) + [B]
            mat, rest = split_arc_points(tuple(rot), [T])
            if not _arc_on_path(mat, path):
                raise BraidingError("circle material does not follow the unit")
            pool.append(Arc(a.arc_id, tuple(rest), None, None))
            continue
        if has_b and B == a.points[0]:
            b_port = a.from_port
        if has_t and T == a.points[-1]:
            t_port = a.to_port
        cuts = [q for q, flag in ((B, has_b), (T, has_t))
                if flag and q != a.points[0] and q != a.points[-1]]
        pieces = split_arc_points(a.points, cuts) if cuts else [a.points]
        for j, piece in enumerate(pieces):
            if _arc_on_path(piece, path):
                continue
            pool.append(Arc(a.arc_id if j == 0 else fresh(a.arc_id),
                            tuple(piece),
                            a.from_port if j == 0 else None,
                            a.to_port if j == len(pieces) - 1 else None))

    # Dissolve crossings interior to the path: the other strand merges
    # straight through where each crossing used to be.
    npos = d.node_positions()
    removed = {c.node_id for c in d.crossings
               if npos[c.node_id] != B and npos[c.node_id] != T
               and _locate(path, npos[c.node_id]) is not None}
    for cid in sorted(removed):
        ports = set(d.node(cid).ports)
        ain = next((a for a in pool if a.to_port in ports), None)
        aout = next((a for a in pool if a.from_port in ports), None)
        if ain is None or aout is None:
            raise BraidingError(f"crossing {cid!r} lost its other strand")
        pool.remove(ain)
        if ain is aout:
            pool.append(Arc(ain.arc_id, ain.points, None, None))
            continue
        pool.remove(aout)
        pool.append(Arc(ain.arc_id, ain.points + aout.points[1:],
                        ain.from_port, aout.to_port))

    # Shoulder drop for the bottom strand: its diagonal from B to the
    # lane must pass through no surviving point, and the corner where it
    # turns downward must sit on no surviving segment.
    bad: set[Fraction] = set()
    for a in pool:
        for q in a.points:
            if q[0] != B[0] and q[0] != lane:
                s = Fraction(q[0] - B[0], lane - B[0])
                if 0 < s < 1:
                    bad.add((B[1] - q[1]) / s)
        for _, (u, w) in a.segments():
            if (u[0] - lane) * (w[0] - lane) < 0:
                ys = u[1] + (w[1] - u[1]) * Fraction(lane - u[0], w[0] - u[0])
                bad.add(B[1] - ys)
    span = B[1] - p.sky_bot
    drop = next((span / Fraction(2 ** k) for k in range(1, 4096)
                 if span / Fraction(2 ** k) not in bad), None)
    if drop is None:
        raise BraidingError("no admissible shoulder drop found")  # pragma: no cover
    corner = (lane, B[1] - drop)
    sky_pts = ((lane, p.sky_top), T)
    floor = (lane, p.sky_bot)

    # Stitch the new strands to the surviving ends or crossing ports.
    new_segs: list[tuple[str, int]] = []
    if t_port is not None:
        aid = fresh("sky")
        pool.append(Arc(aid, sky_pts, None, t_port))
        new_segs.append((aid, 0))
    else:
        host = next((a for a in pool if a.points[0] == T), None)
        if host is None or host.from_port is not None:
            raise BraidingError("no surviving strand descends from the unit top")
        pool.remove(host)
        pool.append(Arc(host.arc_id, (sky_pts[0],) + host.points,
                        None, host.to_port))
        new_segs.append((host.arc_id, 0))
    if b_port is not None:
        aid = fresh("bot")
        pool.append(Arc(aid, (B, corner, floor), b_port, None))
        new_segs.append((aid, 0))
        new_segs.append((aid, 1))
    else:
        host = next((a for a in pool if a.points[-1] == B), None)
        if host is None or host.to_port is not None:
            raise BraidingError("no surviving strand descends into the unit bottom")
        pool.remove(host)
        ext = host.points + (corner, floor)
        pool.append(Arc(host.arc_id, ext, host.from_port, None))
        new_segs.append((host.arc_id, len(ext) - 3))
        new_segs.append((host.arc_id, len(ext) - 2))

    # Every transversal meeting of a new segment with surviving material
    # becomes a crossing, over or under throughout per the unit's label.
    by_arc = {a.arc_id: a for a in pool}
    new_seg_set = set(new_segs)
    hits: dict[str, list[tuple[int, Point, str, str]]] = {}
    new_crossings: list[Crossing] = []
    used_nodes: set[str] = set()
    for ns_arc, ns_idx in new_segs:
        na = by_arc[ns_arc]
        g0, g1 = na.points[ns_idx], na.points[ns_idx + 1]
        d_new = (g1[0] - g0[0], g1[1] - g0[1])
        for a in pool:
            for i, (u, w) in a.segments():
                if a.arc_id == ns_arc and abs(i - ns_idx) <= 1:
                    continue
                if (a.arc_id, i) in new_seg_set:
                    other = (a.arc_id, i)
                    if other <= (ns_arc, ns_idx):
                        continue
                kind, pt = segment_meet((g0, g1), (u, w))
                if kind == DISJOINT:
                    continue
                if kind == TOUCH and pt is not None \
                        and pt in (g0, g1) and pt in (u, w):
                    continue
                if kind != CROSS or pt is None:
                    raise BraidingError(
                        f"lane strand meets arc {a.arc_id!r} non-transversally")
                if (a.arc_id, i) in new_seg_set:
                    raise BraidingError("new strands crossed each other")
                xid = _fresh_node_id(d, used_nodes)
                used_nodes.add(xid)
                d_for = (w[0] - u[0], w[1] - u[1])
                slots = _assign_slots([
                    ("in1", (-d_new[0], -d_new[1])), ("out1", d_new),
                    ("in2", (-d_for[0], -d_for[1])), ("out2", d_for)])
                over_slot = slots["in1"] if unit.label == OVER else slots["in2"]
                new_crossings.append(Crossing(
                    xid, tuple(port_name(xid, s) for s in range(4)), over_slot))
                hits.setdefault(ns_arc, []).append(
                    (ns_idx, pt, port_name(xid, slots["in1"]),
                     port_name(xid, slots["out1"])))
                hits.setdefault(a.arc_id, []).append(
                    (i, pt, port_name(xid, slots["in2"]),
                     port_name(xid, slots["out2"])))

    final_arcs: list[Arc] = []
    for a in pool:
        if a.arc_id not in hits:
            final_arcs.append(a)
            continue
        entries = sorted(
            hits[a.arc_id],
            key=lambda e: (e[0], _seg_param(a.points[e[0]],
                                            a.points[e[0] + 1], e[1])))
        stub = Diagram(tuple(Arc(i, ((Fraction(0), Fraction(0)),
                                     (Fraction(1), Fraction(1))), None, None)
                             for i in all_ids), (), ())
        parts = _wire_split(stub, a,
                            [(i, pt) for i, pt, _, _ in entries],
                            [(pin, pout) for _, _, pin, pout in entries])
        all_ids.update(x.arc_id for x in parts)
        final_arcs.extend(parts)

    crossings = tuple(c for c in d.crossings if c.node_id not in removed) \
        + tuple(new_crossings)
    nd = Diagram(tuple(final_arcs), crossings, d.vertices)
    require_valid_diagram(nd, allow_open=True)
    return PreparedDiagram(
        diagram=nd,
        subdivision=p.subdivision,
        units=tuple(u for u in p.units if u.uid != unit.uid),
        braided=p.braided + (unit.uid,),
        sky_top=p.sky_top,
        sky_bot=p.sky_bot,
        regularization=p.regularization,
    )


# ---------------------------------------------------------------------------
# reading the word off a braided diagram


def _x_at(a: Arc, h: Fraction) -> Fraction:
    for i in range(len(a.points) - 1):
        u, w = a.points[i], a.points[i + 1]
        if w[1] <= h <= u[1]:
            if u[1] == w[1]:
                return u[0]
            return u[0] + (w[0] - u[0]) * (u[1] - h) / (u[1] - w[1])
    raise BraidingError(f"arc {a.arc_id!r} does not span height {h}")


def read_word(d: Diagram) -> BraidWord:
    """Read the braid word off a diagram whose arcs all descend.

    Every arc must be strictly monotone decreasing in y; crossings and
    vertices are visited top to bottom and each contributes one letter
    whose strand index is the rank, from the left, of its left incoming
    wire just above the event.  Ties in event height are an error; shear
    the diagram first.
    """
    if not d.arcs:
        raise BraidingError("an empty diagram has no braid word")
    for a in d.arcs:
        for u, w in zip(a.points, a.points[1:]):
            if w[1] >= u[1]:
                raise BraidingError(
                    f"arc {a.arc_id!r} is not strictly descending; "
                    "braid the diagram before reading it")

    npos = d.node_positions()
    events = sorted(((npos[n.node_id], n) for n in d.crossings + d.vertices),
                    key=lambda e: -e[0][1])
    for (p1, n1), (p2, n2) in zip(events, events[1:]):
        if p1[1] == p2[1]:
            raise BraidingError(
                f"events {n1.node_id!r} and {n2.node_id!r} share height {p1[1]}")

    top_bound = [a.points[0][1] for a in d.arcs if a.from_port is None]
    bot_bound = [a.points[-1][1] for a in d.arcs if a.to_port is None]
    if not top_bound or not bot_bound:
        raise BraidingError("no strand reaches the diagram boundary")
    top_ends, bot_ends = min(top_bound), max(bot_bound)
    if events and (top_ends <= events[0][0][1] or bot_ends >= events[-1][0][1]):
        raise BraidingError("a strand end lies between events")

    def ranks(h: Fraction) -> dict[str, int]:
        present = [(_x_at(a, h), a.arc_id) for a in d.arcs
                   if a.points[-1][1] < h < a.points[0][1]]
        present.sort()
        for (x1, _), (x2, _) in zip(present, present[1:]):
            if x1 == x2:
                raise BraidingError(f"two strands share x at height {h}")
        return {aid: i + 1 for i, (_, aid) in enumerate(present)}

    arc_by_to_port = {a.to_port: a.arc_id for a in d.arcs
                      if a.to_port is not None}

    first_probe = (top_ends + (events[0][0][1] if events else bot_ends)) / 2
    top_count = len(ranks(first_probe))
    letters: list[Letter] = []
    prev_h = top_ends
    for pos, node in events:
        rank_of = ranks((prev_h + pos[1]) / 2)
        ins = sorted((rank_of[arc_by_to_port[port]], slot)
                     for slot, port in enumerate(node.ports)
                     if port in arc_by_to_port)
        if isinstance(node, Crossing):
            (r1, s1), (r2, _) = ins
            if r2 != r1 + 1:
                raise BraidingError(
                    f"crossing {node.node_id!r} joins non-adjacent strands")
            letters.append(Letter.crossing(r1, 1 if s1 in node.over_strand else -1))
        elif node.kind == ZIP:
            (r1, _), (r2, _) = ins
            if r2 != r1 + 1:
                raise BraidingError(
                    f"vertex {node.node_id!r} joins non-adjacent strands")
            letters.append(Letter.zip(r1))
        else:
            ((r1, _),) = ins
            letters.append(Letter.unzip(r1))
        prev_h = pos[1]

    word = BraidWord(top_count, tuple(letters))
    require_valid_word(word)
    return word


# ---------------------------------------------------------------------------
# canonical renaming and the full pipeline


def canonical_diagram(d: Diagram) -> Diagram:
    """Rename arcs and nodes deterministically by geometry.

    Two diagrams with identical geometry but different identifier
    histories (for example, produced by braiding units in different
    orders) become equal after canonicalisation.
    """
    npos = d.node_positions()
    order_arcs = sorted(d.arcs, key=lambda a: a.points)
    order_cross = sorted(d.crossings, key=lambda c: npos[c.node_id])
    order_vert = sorted(d.vertices, key=lambda v: npos[v.node_id])
    node_map = {c.node_id: f"x{i}" for i, c in enumerate(order_cross)}
    node_map.update({v.node_id: f"v{i}" for i, v in enumerate(order_vert)})
    port_map: dict[str, str] = {}
    for n in d.crossings + d.vertices:
        for slot, pid in enumerate(n.ports):
            port_map[pid] = port_name(node_map[n.node_id], slot)

    def mp(port):
        return None if port is None else port_map[port]

    return Diagram(
        tuple(Arc(f"a{i}", a.points, mp(a.from_port), mp(a.to_port))
              for i, a in enumerate(order_arcs)),
        tuple(Crossing(node_map[c.node_id],
                       tuple(port_map[p] for p in c.ports), c.over_slot)
              for c in order_cross),
        tuple(Vertex(node_map[v.node_id], v.kind,
                     tuple(port_map[p] for p in v.ports))
              for v in order_vert),
    )


def braid(d: Diagram, cfg: BraiderConfig | None = None, *,
          extra_cuts: tuple[tuple[str, int, "Fraction"], ...] = ()) -> BraidWord:
    """The full braiding pipeline: a valid closed diagram in, a closable
    braid word out whose closure is isotopic to the input.

    ``extra_cuts`` is forwarded to :func:`prepare`; refining the
    subdivision changes the output only within its move-equivalence
    class.
    """
    cfg = cfg or BraiderConfig()
    require_valid_diagram(d)
    reg, log = _regularize(d, cfg)
    if reg is not d:
        require_valid_diagram(reg)
    p = prepare(reg, cfg, extra_cuts=extra_cuts, _regularization=tuple(log))
    while p.units:
        p = braid_up_arc(p, p.units[0].uid)
    out = p.diagram
    if not out.arcs:
        raise BraidingError("nothing left to read: the diagram was empty")

    # Stagger event heights with one last exact shear if needed, kept
    # small enough that strands stay monotone and boundary ends stay
    # outside the event range.
    npos = out.node_positions()
    heights = [pos[1] for pos in npos.values()]
    if len(set(heights)) < len(heights):
        plist = list(npos.values())
        bad: set[Fraction] = set()
        for i, q1 in enumerate(plist):
            for q2 in plist[i + 1:]:
                if q1[0] != q2[0]:
                    bad.add(Fraction(q2[1] - q1[1], q1[0] - q2[0]))
        margin: Fraction | None = None
        for a in out.arcs:
            for _, (u, w) in a.segments():
                if w[0] != u[0]:
                    m = abs(Fraction(w[1] - u[1], w[0] - u[0]))
                    if margin is None or m < margin:
                        margin = m
        xs = [pt[0] for pt in _all_points(out)]
        width_bound = Fraction(1) / (max(xs) - min(xs) + 1)
        if margin is None or width_bound < margin:
            margin = width_bound
        out = _apply_affine(out, Affine.shear_y(_pick_dyadic(bad, margin)))
        require_valid_diagram(out, allow_open=True)
    return read_word(out)
