"""Best-effort human-readable views of words and diagrams.

ASCII output is for terminals and is not round-trippable; SVG output
draws the exact rational geometry (words are laid out via their braid
box first) and embeds the source text in a metadata block so a rendered
file still carries its own provenance.  All arithmetic stays rational
until the final coordinate formatting, the one place floats appear.
"""

from __future__ import annotations

from fractions import Fraction
from xml.sax.saxutils import escape

from .diagram import Diagram, braid_box
from .words import BraidWord, LetterKind, require_valid, serialize_word

__all__ = [
    "render_word_ascii",
    "render_diagram_ascii",
    "render_word_svg",
    "render_diagram_svg",
]


# ---------------------------------------------------------------------------
# ASCII


def render_word_ascii(word: BraidWord) -> str:
    """One row per letter between rows of vertical strands.

    Strand columns sit two characters apart; the acting pair collapses
    to a V / caret / X glyph and the serialized token is repeated at the
    right margin, which keeps the picture honest when column counts
    shift mid-word.
    """
    profile = require_valid(word)

    def bars(m: int) -> str:
        return " ".join("|" for _ in range(m))

    lines = [bars(word.top_count)]
    for letter, m in zip(word.letters, profile):
        i = letter.index
        cells = ["|"] * m
        if letter.kind is LetterKind.CROSSING:
            cells[i - 1] = "\\" if letter.sign > 0 else "/"
            cells[i] = "/" if letter.sign > 0 else "\\"
        elif letter.kind is LetterKind.ZIP:
            cells[i - 1], cells[i] = "\\", "/"
        else:
            cells[i - 1] = "^"
        row = " ".join(cells)
        lines.append(f"{row}   {_token(letter)}")
        lines.append(bars(m + letter.count_delta))
    return "\n".join(lines) + "\n"


def _token(letter) -> str:
    if letter.kind is LetterKind.CROSSING:
        return f"{'s' if letter.sign > 0 else 'S'}{letter.index}"
    return f"{'y' if letter.kind is LetterKind.ZIP else 'l'}{letter.index}"


def render_diagram_ascii(d: Diagram, *, width: int = 72, height: int = 36) -> str:
    """Rasterize the diagram onto a character grid.

    Arcs are sampled densely and drawn with direction glyphs; node
    positions overwrite them with ``x`` (crossing), ``z`` (zip) or
    ``l`` (unzip).  Purely cosmetic -- collisions in crowded regions
    simply overdraw.
    """
    pts = [p for a in d.arcs for p in a.points]
    if not pts:
        return "(empty diagram)\n"
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    spanx = (x1 - x0) or Fraction(1)
    spany = (y1 - y0) or Fraction(1)

    def cell(p) -> tuple[int, int]:
        cx = int((p[0] - x0) / spanx * (width - 1))
        cy = int((y1 - p[1]) / spany * (height - 1))
        return min(max(cy, 0), height - 1), min(max(cx, 0), width - 1)

    grid = [[" "] * width for _ in range(height)]
    for a in d.arcs:
        for _, (p, q) in a.segments():
            steps = max(abs(cell(q)[0] - cell(p)[0]),
                        abs(cell(q)[1] - cell(p)[1]), 1)
            dx, dy = q[0] - p[0], q[1] - p[1]
            glyph = "|" if 2 * abs(dx) < abs(dy) else \
                    "-" if 2 * abs(dy) < abs(dx) else \
                    ("\\" if (dx > 0) == (dy < 0) else "/")
            for s in range(steps + 1):
                t = Fraction(s, steps)
                r, c = cell((p[0] + dx * t, p[1] + dy * t))
                grid[r][c] = glyph
    npos = d.node_positions()
    for c in d.crossings:
        r, cc = cell(npos[c.node_id])
        grid[r][cc] = "x"
    for v in d.vertices:
        r, cc = cell(npos[v.node_id])
        grid[r][cc] = "z" if v.kind == "zip" else "l"
    return "\n".join("".join(row).rstrip() for row in grid) + "\n"


# ---------------------------------------------------------------------------
# SVG


def _fmt(v: Fraction) -> str:
    return f"{float(v):.4f}".rstrip("0").rstrip(".")


def _trimmed(points, trim_from: bool, trim_to: bool):
    """Shorten a polyline's first/last segment by a third: the gap that
    shows which strand dives under at a crossing."""
    pts = list(points)
    cut = Fraction(1, 3)
    if trim_from and len(pts) >= 2:
        a, b = pts[0], pts[1]
        pts[0] = (a[0] + (b[0] - a[0]) * cut, a[1] + (b[1] - a[1]) * cut)
    if trim_to and len(pts) >= 2:
        a, b = pts[-1], pts[-2]
        pts[-1] = (a[0] + (b[0] - a[0]) * cut, a[1] + (b[1] - a[1]) * cut)
    return pts


def render_diagram_svg(d: Diagram, *, source: str | None = None,
                       canvas: int = 640) -> str:
    """Exact-geometry SVG with under-strand gaps at crossings.

    ``source`` (normally the serialized input file) is embedded verbatim
    in a metadata block.  Coordinates become floats only here, scaled so
    the longer bounding-box side spans ``canvas`` pixels.
    """
    pts = [p for a in d.arcs for p in a.points]
    if not pts:
        return _svg_document([], 10, 10, source)
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0) or Fraction(1)
    margin = span / 20
    scale = Fraction(canvas) / (span + 2 * margin)

    def sp(p) -> str:
        x = (p[0] - x0 + margin) * scale
        y = (y1 - p[1] + margin) * scale
        return f"{_fmt(x)},{_fmt(y)}"

    under_ports: set[str] = set()
    for c in d.crossings:
        for slot in range(4):
            if slot not in c.over_strand:
                under_ports.add(c.ports[slot])

    body: list[str] = []
    for a in d.arcs:
        shown = _trimmed(a.points,
                         a.from_port in under_ports,
                         a.to_port in under_ports)
        path = " ".join(sp(p) for p in shown)
        body.append(f'<polyline points="{path}" class="strand"/>')
    npos = d.node_positions()
    for v in d.vertices:
        x, y = sp(npos[v.node_id]).split(",")
        body.append(f'<circle cx="{x}" cy="{y}" r="4" class="vertex"/>')
        body.append(f'<text x="{x}" y="{y}" dx="6" dy="-6" '
                    f'class="label">{escape(v.kind)} {escape(v.node_id)}</text>')
    w = (x1 - x0 + 2 * margin) * scale
    h = (y1 - y0 + 2 * margin) * scale
    return _svg_document(body, w, h, source)


def _svg_document(body, w, h, source) -> str:
    meta = ""
    if source is not None:
        meta = ("<metadata><![CDATA[\n" +
                source.replace("]]>", "]] >") + "\n]]></metadata>\n")
    style = ("<style>.strand{fill:none;stroke:#224;stroke-width:2;"
             "stroke-linejoin:round}"
             ".vertex{fill:#a22}"
             ".label{font:10px sans-serif;fill:#666}</style>\n")
    return (f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{_fmt(Fraction(w).limit_denominator())}" '
            f'height="{_fmt(Fraction(h).limit_denominator())}" '
            f'viewBox="0 0 {_fmt(Fraction(w).limit_denominator())} '
            f'{_fmt(Fraction(h).limit_denominator())}">\n'
            + meta + style + "\n".join(body) + "\n</svg>\n")


def render_word_svg(word: BraidWord, *, source: str | None = None) -> str:
    """A word renders as its open braid box."""
    if source is None:
        source = serialize_word(word)
    return render_diagram_svg(braid_box(word), source=source)
