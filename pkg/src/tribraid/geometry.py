"""Exact planar geometry over the rationals.

Every coordinate in this package is a :class:`fractions.Fraction`; every
predicate here is decided by exact sign computations on rational
polynomials of the inputs.  No floating point enters any decision, so
"degenerate" configurations (collinear points, touching segments,
shared endpoints) are classified reliably rather than approximately.

Points are plain ``(x, y)`` tuples of Fractions.  Segments are pairs of
points.  The module is deliberately small: orientation tests, segment
intersection classification, point/segment membership, convex-triangle
interior overlap via exact separating axes, and the rational affine maps
(translation, scaling, shear, Pythagorean rotation) used by the diagram
distortion operations.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Point = tuple[Fraction, Fraction]
Segment = tuple[Point, Point]


def pt(x, y) -> Point:
    """Build an exact point, coercing ints/strings/Fractions."""
    return (Fraction(x), Fraction(y))


def cross2(u: tuple[Fraction, Fraction], v: tuple[Fraction, Fraction]) -> Fraction:
    """Scalar cross product u x v of two plane vectors."""
    return u[0] * v[1] - u[1] * v[0]


def orient(a: Point, b: Point, c: Point) -> int:
    """Sign of the cross product (b-a) x (c-a).

    +1 when ``a, b, c`` make a left turn (counterclockwise), -1 for a
    right turn, 0 when collinear.  This single predicate drives almost
    every other decision in the module.
    """
    d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (d > 0) - (d < 0)


def on_segment(p: Point, seg: Segment) -> bool:
    """True iff ``p`` lies on the closed segment (endpoints included)."""
    a, b = seg
    if orient(a, b, p) != 0:
        return False
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def in_open_segment(p: Point, seg: Segment) -> bool:
    """True iff ``p`` lies on the segment but is not an endpoint."""
    return on_segment(p, seg) and p != seg[0] and p != seg[1]


# Classification labels for segment_meet.
DISJOINT = "disjoint"
TOUCH = "touch"        # single shared point; endpoint of at least one segment
CROSS = "cross"        # single shared point interior to both segments
OVERLAP = "overlap"    # collinear intersection of positive length


def line_intersection(a: Point, b: Point, c: Point, d: Point) -> Point | None:
    """Intersection point of lines ab and cd, or None when parallel."""
    r = (b[0] - a[0], b[1] - a[1])
    s = (d[0] - c[0], d[1] - c[1])
    denom = r[0] * s[1] - r[1] * s[0]
    if denom == 0:
        return None
    t = ((c[0] - a[0]) * s[1] - (c[1] - a[1]) * s[0]) / denom
    return (a[0] + t * r[0], a[1] + t * r[1])


def segment_meet(s1: Segment, s2: Segment) -> tuple[str, Point | None]:
    """Classify how two closed segments intersect.

    Returns ``(kind, point)`` where kind is one of DISJOINT / TOUCH /
    CROSS / OVERLAP and point is the (unique) shared point for TOUCH and
    CROSS, None otherwise.  TOUCH means the shared point is an endpoint
    of at least one of the segments; CROSS means a transversal crossing
    interior to both.  Exactness matters: a segment ending precisely on
    the interior of another is TOUCH, never CROSS.
    """
    a, b = s1
    c, d = s2
    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)

    if o1 == o2 == 0:  # collinear (o3 == o4 == 0 follows for nondegenerate)
        # Project on the dominant axis and compare 1-d intervals.
        axis = 0 if a[0] != b[0] or c[0] != d[0] else 1
        lo1, hi1 = sorted((a[axis], b[axis]))
        lo2, hi2 = sorted((c[axis], d[axis]))
        lo, hi = max(lo1, lo2), min(hi1, hi2)
        if lo > hi:
            return DISJOINT, None
        if lo == hi:
            shared = a if a[axis] == lo else b if b[axis] == lo else c if c[axis] == lo else d
            return TOUCH, shared
        return OVERLAP, None

    if o1 != o2 and o3 != o4 and o1 * o2 < 0 and o3 * o4 < 0:
        p = line_intersection(a, b, c, d)
        assert p is not None
        return CROSS, p

    # Remaining possibilities: a single endpoint touching, or nothing.
    for p, seg in ((c, s1), (d, s1), (a, s2), (b, s2)):
        if on_segment(p, seg):
            return TOUCH, p
    return DISJOINT, None


def segments_cross(s1: Segment, s2: Segment) -> bool:
    """True iff the segments cross transversally at an interior point."""
    return segment_meet(s1, s2)[0] == CROSS


def point_in_triangle(p: Point, tri: Sequence[Point], strict: bool = False) -> bool:
    """Exact point-in-triangle test.

    With ``strict`` the boundary does not count.  Degenerate (collinear)
    triangles contain nothing strictly and only their segment points
    non-strictly.
    """
    a, b, c = tri
    o = orient(a, b, c)
    if o == 0:
        if strict:
            return False
        return on_segment(p, (a, b)) or on_segment(p, (b, c)) or on_segment(p, (a, c))
    if o < 0:
        a, b = b, a
    s1 = orient(a, b, p)
    s2 = orient(b, c, p)
    s3 = orient(c, a, p)
    if strict:
        return s1 > 0 and s2 > 0 and s3 > 0
    return s1 >= 0 and s2 >= 0 and s3 >= 0


def _ccw(tri: Sequence[Point]) -> list[Point]:
    a, b, c = tri
    if orient(a, b, c) < 0:
        return [a, c, b]
    return [a, b, c]


def triangles_overlap(t1: Sequence[Point], t2: Sequence[Point]) -> bool:
    """True iff the open interiors of two triangles intersect.

    Uses exact separating axes: for convex sets the interiors are
    disjoint iff some edge line of either triangle has the whole other
    triangle on its closed outer half-plane.  Sharing only an edge or a
    vertex therefore does not count as overlap.  A degenerate triangle
    has empty interior and never overlaps anything.
    """
    if orient(*t1) == 0 or orient(*t2) == 0:
        return False
    p1, p2 = _ccw(t1), _ccw(t2)
    for poly, other in ((p1, p2), (p2, p1)):
        for i in range(3):
            a, b = poly[i], poly[(i + 1) % 3]
            # CCW polygon: interior is strictly left of each edge.
            if all(orient(a, b, v) <= 0 for v in other):
                return False
    return True


def segment_hits_triangle(seg: Segment, tri: Sequence[Point]) -> bool:
    """True iff the segment meets the open interior of the triangle.

    Touching the boundary only (running along an edge, or ending on it)
    does not count.  Exact: a chord entering and leaving through the
    boundary is detected via its midpoint or an edge crossing.
    """
    if orient(*tri) == 0:
        return False
    a, b = seg
    if point_in_triangle(a, tri, strict=True) or point_in_triangle(b, tri, strict=True):
        return True
    edges = [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])]
    for e in edges:
        if segments_cross(seg, e):
            return True
    # The segment could pass through the interior while both endpoints
    # and all edge meetings are boundary touches (e.g. vertex to vertex
    # through the middle).  The midpoint decides exactly.
    mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    return point_in_triangle(mid, tri, strict=True)


# ---------------------------------------------------------------------------
# Rational affine maps.

class Affine:
    """An exact affine map x -> M x + t with rational entries.

    Composition and application are exact.  The distortion operations
    only ever build orientation-preserving instances (det > 0), which
    ``is_orientation_preserving`` lets callers assert.
    """

    __slots__ = ("m", "t")

    def __init__(self, m: tuple[Fraction, Fraction, Fraction, Fraction],
                 t: tuple[Fraction, Fraction]):
        self.m = tuple(Fraction(v) for v in m)
        self.t = (Fraction(t[0]), Fraction(t[1]))

    def __call__(self, p: Point) -> Point:
        a, b, c, d = self.m
        return (a * p[0] + b * p[1] + self.t[0],
                c * p[0] + d * p[1] + self.t[1])

    def det(self) -> Fraction:
        a, b, c, d = self.m
        return a * d - b * c

    def is_orientation_preserving(self) -> bool:
        return self.det() > 0

    def then(self, other: "Affine") -> "Affine":
        """The map applying self first, then other."""
        a, b, c, d = other.m
        e, f, g, h = self.m
        m = (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
        tx, ty = other(self.t)
        return Affine(m, (tx, ty))

    @staticmethod
    def identity() -> "Affine":
        return Affine((Fraction(1), Fraction(0), Fraction(0), Fraction(1)),
                      (Fraction(0), Fraction(0)))

    @staticmethod
    def translation(dx, dy) -> "Affine":
        return Affine((Fraction(1), Fraction(0), Fraction(0), Fraction(1)),
                      (Fraction(dx), Fraction(dy)))

    @staticmethod
    def scaling(factor, center: Point = (Fraction(0), Fraction(0))) -> "Affine":
        f = Fraction(factor)
        if f <= 0:
            raise ValueError("scale factor must be positive")
        cx, cy = Fraction(center[0]), Fraction(center[1])
        return Affine((f, Fraction(0), Fraction(0), f),
                      (cx - f * cx, cy - f * cy))

    @staticmethod
    def shear_x(k) -> "Affine":
        """x -> x + k*y, y fixed."""
        return Affine((Fraction(1), Fraction(k), Fraction(0), Fraction(1)),
                      (Fraction(0), Fraction(0)))

    @staticmethod
    def shear_y(k) -> "Affine":
        """y -> y + k*x, x fixed."""
        return Affine((Fraction(1), Fraction(0), Fraction(k), Fraction(1)),
                      (Fraction(0), Fraction(0)))

    @staticmethod
    def pythagorean_rotation(triple: tuple[int, int, int],
                             center: Point = (Fraction(0), Fraction(0))) -> "Affine":
        """Exact rotation by the angle of a Pythagorean triple (a, b, c).

        The matrix [[a/c, -b/c], [b/c, a/c]] is orthogonal with rational
        entries exactly when a^2 + b^2 = c^2, which is validated.  Signs
        of a and b select the quadrant of the rotation angle.
        """
        a, b, c = (Fraction(v) for v in triple)
        if c <= 0 or a * a + b * b != c * c:
            raise ValueError(f"not a Pythagorean triple: {triple!r}")
        cx, cy = Fraction(center[0]), Fraction(center[1])
        m = (a / c, -b / c, b / c, a / c)
        tx = cx - m[0] * cx - m[1] * cy
        ty = cy - m[2] * cx - m[3] * cy
        return Affine(m, (tx, ty))


def direction_key(v: tuple[Fraction, Fraction]):
    """Sort key ordering nonzero direction vectors counterclockwise.

    Starts at east (positive x axis) and sweeps through north, west,
    south.  Exact: within a quadrant-sector vectors compare by cross
    product, so no normalization or trigonometry is involved.  Opposite
    vectors land in different sectors, and equal directions (positive
    multiples) compare equal.
    """
    x, y = v
    if x == 0 and y == 0:
        raise ValueError("zero vector has no direction")
    if x > 0 and y >= 0:
        sector = 0  # starts exactly east
    elif x <= 0 and y > 0:
        sector = 1  # starts exactly north
    elif x < 0 and y <= 0:
        sector = 2  # starts exactly west
    else:
        sector = 3  # starts exactly south
    # The sector's opening axis direction sorts first; off-axis vectors
    # then order by slope y/x, which increases strictly along the
    # counterclockwise sweep within each open quadrant.
    on_axis = (y == 0) if sector in (0, 2) else (x == 0)
    slope = Fraction(0) if on_axis else Fraction(y, x)
    return (sector, 0 if on_axis else 1, slope)


def bbox(points: Iterable[Point]) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """(min_x, min_y, max_x, max_y) over a nonempty point iterable."""
    it = iter(points)
    first = next(it)
    min_x = max_x = first[0]
    min_y = max_y = first[1]
    for x, y in it:
        if x < min_x:
            min_x = x
        elif x > max_x:
            max_x = x
        if y < min_y:
            min_y = y
        elif y > max_y:
            max_y = y
    return min_x, min_y, max_x, max_y


def linf_point_segment(p: Point, seg: Segment) -> Fraction:
    """Exact L-infinity distance from a point to a closed segment.

    Computed by minimizing max(|dx|, |dy|) over the segment, which for a
    straight segment is attained either at an endpoint or where the two
    coordinate gaps tie.  Used for clearance radii, where any exact
    positive lower bound suffices; the L-infinity metric keeps results
    rational (Euclidean distance would need square roots).
    """
    a, b = seg
    candidates = [a, b]
    dx, dy = b[0] - a[0], b[1] - a[1]
    # Parameter values where |px - (ax + t dx)| == |py - (ay + t dy)|.
    for sgn in (1, -1):
        denom = dx - sgn * dy
        if denom != 0:
            t = ((p[0] - a[0]) - sgn * (p[1] - a[1])) / denom
            if 0 <= t <= 1:
                candidates.append((a[0] + t * dx, a[1] + t * dy))
    # Orthogonal-foot style candidates for each axis: where one gap is 0.
    if dx != 0:
        t = (p[0] - a[0]) / dx
        if 0 <= t <= 1:
            candidates.append((a[0] + t * dx, a[1] + t * dy))
    if dy != 0:
        t = (p[1] - a[1]) / dy
        if 0 <= t <= 1:
            candidates.append((a[0] + t * dx, a[1] + t * dy))
    return min(max(abs(p[0] - q[0]), abs(p[1] - q[1])) for q in candidates)
