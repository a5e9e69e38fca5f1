"""Command-line surface for the tribraid library.

Subcommands::

    validate   report on a word (TBW1) or diagram (STGD1) file
    braid      turn a diagram file into a braid word
    close      build the closure diagram of a closable word
    equiv      bounded equivalence search between two words
    rewrite    replay a move path, or normalize a word
    gen        deterministic pseudo-random words and diagrams
    render     ASCII or SVG pictures of words and diagrams
    selftest   quick internal consistency battery

Exit codes: 0 success (including verdict Equivalent), 1 usage or parse
error, 2 verdict Exhausted, 3 validation failure.  All output is
deterministic given flags and seeds; the environment variable
``TRIBRAID_SEED`` overrides ``--seed`` wherever a seed is accepted.

Input files are dispatched on their header: a leading ``TBW1`` token
means a braid word, a leading ``{`` an STGD1 JSON diagram.  Every file
the tool emits re-parses to a value equal to the one it serialized.
"""

from __future__ import annotations

import argparse
import os
import sys

from .braider import BraiderConfig, braid, prepare, _regularize
from .diagram import (
    Diagram,
    closure,
    diagram_from_json,
    diagram_to_json,
    validate_diagram,
)
from .errors import (
    DiagramError,
    MoveError,
    PathReplayError,
    TribraidError,
    WordParseError,
)
from .gen import random_diagram, random_word
from .gp import OVER, UNDER
from .markov import markov_equivalent_bounded, tl_equivalent_bounded
from .moves import parse_steps, replay, replay_steps, serialize_steps
from .render import (
    render_diagram_ascii,
    render_diagram_svg,
    render_word_ascii,
    render_word_svg,
)
from .rules import comm_normal_form_with_trace
from .search import (
    DEFAULT_BUDGET_DEPTH,
    DEFAULT_BUDGET_STATES,
    DEFAULT_BUDGET_WORD_LEN,
    SearchBudget,
    isotopic_bounded,
)
from .words import (
    BraidWord,
    LetterKind,
    parse_word,
    serialize_word,
    validate,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_EXHAUSTED = 2
EXIT_INVALID = 3


class UsageError(Exception):
    """Bad invocation or unparseable input; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; route through our own
    # error handling so usage problems consistently report exit 1.
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# small helpers shared by the subcommands


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def _sniff(text: str, path: str) -> str:
    head = text.lstrip()[:8]
    if head.startswith("TBW1"):
        return "word"
    if head.startswith("{"):
        return "diagram"
    raise UsageError(f"{path}: unrecognized header (expected TBW1 or STGD1 JSON)")


def _parse_word_file(path: str) -> BraidWord:
    try:
        return parse_word(_read(path))
    except WordParseError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _parse_diagram_file(path: str) -> Diagram:
    try:
        return diagram_from_json(_read(path))
    except DiagramError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _require_word(path: str) -> BraidWord | int:
    """Parse and validate; on invalid print the report and return 3."""
    word = _parse_word_file(path)
    report = validate(word)
    if not report.ok:
        print(f"{path}: invalid word: letter {report.first_bad_letter}: "
              f"{report.reason}", file=sys.stderr)
        return EXIT_INVALID
    return word


def _require_diagram(path: str) -> Diagram | int:
    diagram = _parse_diagram_file(path)
    report = validate_diagram(diagram)
    if not report.ok:
        print(f"{path}: invalid diagram: {report.first}", file=sys.stderr)
        return EXIT_INVALID
    return diagram


def _seed(args) -> int:
    env = os.environ.get("TRIBRAID_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"TRIBRAID_SEED must be an integer, got {env!r}") from exc
    return args.seed


def _budget(args) -> SearchBudget:
    try:
        return SearchBudget(max_depth=args.depth, max_word_len=args.max_len,
                            max_states=args.states)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _braider_config(args) -> BraiderConfig:
    try:
        return BraiderConfig(
            default_label=args.label,
            insertion_sign=1 if args.sign == "+" else -1,
            relaxed_units=args.relaxed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _word_counts(word: BraidWord) -> tuple[int, int]:
    nzip = sum(1 for l in word.letters if l.kind is LetterKind.ZIP)
    nunzip = sum(1 for l in word.letters if l.kind is LetterKind.UNZIP)
    return nzip, nunzip


def _oneline(word: BraidWord) -> str:
    return " ".join(serialize_word(word).split())


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    text = _read(args.path)
    if _sniff(text, args.path) == "word":
        got = _require_word(args.path)
        if isinstance(got, int):
            return got
        word = got
        profile = validate(word).profile
        nzip, nunzip = _word_counts(word)
        print(f"(m,n) = ({word.top_count},{profile[-1]}), "
              f"letters={len(word.letters)}, zip={nzip}, unzip={nunzip}")
        return EXIT_OK
    got = _require_diagram(args.path)
    if isinstance(got, int):
        return got
    d = got
    nzip = sum(1 for v in d.vertices if v.kind == "zip")
    nunzip = sum(1 for v in d.vertices if v.kind == "unzip")
    print(f"valid diagram: arcs={len(d.arcs)}, crossings={len(d.crossings)}, "
          f"zip={nzip}, unzip={nunzip}")
    return EXIT_OK


def cmd_braid(args) -> int:
    got = _require_diagram(args.input)
    if isinstance(got, int):
        return got
    cfg = _braider_config(args)
    word = braid(got, cfg)
    _write(args.out, serialize_word(word))
    if args.emit_log is not None:
        _write(args.emit_log, _braid_log(got, cfg))
    return EXIT_OK


def _braid_log(d: Diagram, cfg: BraiderConfig) -> str:
    """Re-run the regularization and preparation stages for reporting.

    Both stages are deterministic, so the rerun describes exactly what
    the braiding pass did.
    """
    routed, events = _regularize(d, cfg)
    lines = [f"regularize: vertex {vid}: {what}" for vid, what in events]
    if not lines:
        lines.append("regularize: all vertices already in regular position")
    prep = prepare(routed, cfg, _regularization=events)
    npoints = sum(len(pts) for _, pts in prep.subdivision)
    lines.append(f"prepare: {len(prep.diagram.arcs)} arcs, "
                 f"{npoints} designated points, {len(prep.units)} units")
    for u in prep.units:
        bx, by = u.bottom
        tx, ty = u.top
        lines.append(f"unit {u.uid}: label={u.label}, "
                     f"bottom=({bx},{by}), top=({tx},{ty}), "
                     f"pieces={len(u.pieces)}")
    return "".join(line + "\n" for line in lines)


def cmd_close(args) -> int:
    got = _require_word(args.input)
    if isinstance(got, int):
        return got
    try:
        d = closure(got)
    except DiagramError as exc:
        print(f"{args.input}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _write(args.out, diagram_to_json(d))
    return EXIT_OK


_EQUIV_MODES = {
    "isotopy": isotopic_bounded,
    "tl": tl_equivalent_bounded,
    "markov": markov_equivalent_bounded,
}


def cmd_equiv(args) -> int:
    words = []
    for path in (args.word1, args.word2):
        got = _require_word(path)
        if isinstance(got, int):
            return got
        words.append(got)
    budget = _budget(args)
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    try:
        verdict = _EQUIV_MODES[args.mode](words[0], words[1], budget)
    except TribraidError as exc:
        # tl/markov modes demand closable inputs
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if not verdict.equivalent:
        tail = f": {verdict.reason}" if verdict.reason else ""
        print(f"Exhausted ({verdict.states_visited} states visited{tail})")
        return EXIT_EXHAUSTED
    # Re-execute the witness before claiming anything: a verdict is only
    # as good as its replay.
    try:
        replay(verdict.path)
    except PathReplayError as exc:
        print(f"internal error: unreplayable witness: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.path is not None:
        _write(args.path, _path_file(verdict.path))
    print(f"Equivalent ({len(verdict.path)} steps, "
          f"{verdict.states_visited} states visited)")
    return EXIT_OK


def _path_file(path) -> str:
    header = (f"# start: {_oneline(path.start)}\n"
              f"# end:   {_oneline(path.end)}\n")
    return header + serialize_steps(path.steps)


def cmd_rewrite(args) -> int:
    got = _require_word(args.input)
    if isinstance(got, int):
        return got
    word = got
    if args.replay is not None:
        try:
            steps = parse_steps(_read(args.replay))
        except (WordParseError, MoveError) as exc:
            raise UsageError(f"{args.replay}: {exc}") from exc
        try:
            final = replay_steps(word, steps)
        except PathReplayError as exc:
            print(f"{args.replay}: {exc}", file=sys.stderr)
            return EXIT_INVALID
        _write(args.out, serialize_word(final))
        return EXIT_OK
    final, trace = comm_normal_form_with_trace(word)
    if args.path is not None:
        _write(args.path, f"# start: {_oneline(word)}\n"
               f"# end:   {_oneline(final)}\n" + serialize_steps(trace))
    _write(args.out, serialize_word(final))
    return EXIT_OK


def cmd_gen(args) -> int:
    seed = _seed(args)
    if args.kind == "word":
        letters = 8 if args.letters is None else args.letters
        strands = 5 if args.max_strands is None else args.max_strands
        try:
            word = random_word(seed, letters=letters, max_strands=strands,
                               closable=not args.open)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        _write(args.out, serialize_word(word))
        return EXIT_OK
    letters = 4 if args.letters is None else args.letters
    strands = 4 if args.max_strands is None else args.max_strands
    try:
        d = random_diagram(seed, letters=letters, max_strands=strands,
                           distortions=args.distortions)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write(args.out, diagram_to_json(d))
    return EXIT_OK


def cmd_render(args) -> int:
    text = _read(args.input)
    if _sniff(text, args.input) == "word":
        got = _require_word(args.input)
        if isinstance(got, int):
            return got
        out = (render_word_ascii(got) if args.format == "ascii"
               else render_word_svg(got, source=text))
    else:
        try:
            d = diagram_from_json(text)
        except DiagramError as exc:
            raise UsageError(f"{args.input}: {exc}") from exc
        # rendering is best-effort and happily draws stub diagrams, so
        # no validation gate here
        out = (render_diagram_ascii(d) if args.format == "ascii"
               else render_diagram_svg(d, source=text))
    _write(args.out, out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    failures = 0
    total = 0

    def check(name: str, fn) -> None:
        nonlocal failures, total
        total += 1
        try:
            fn()
        except Exception as exc:  # noqa: BLE001 - report, don't crash
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            if not args.quiet:
                print(f"ok   {name}")

    def word_round_trips() -> None:
        for seed in range(6):
            w = random_word(seed, letters=6, max_strands=4)
            assert parse_word(serialize_word(w)) == w, f"seed {seed}"

    def diagram_round_trip() -> None:
        w = parse_word("TBW1 2\ny1 l1\n")
        d = closure(w)
        assert validate_diagram(d).ok
        assert diagram_from_json(diagram_to_json(d)) == d

    def braid_round_trip() -> None:
        from .diagram import graph_signature
        w = parse_word("TBW1 2\nl1 y1\n")
        d = closure(w)
        out = braid(d)
        nzip, nunzip = _word_counts(out)
        assert nzip == nunzip == 1, f"zip={nzip} unzip={nunzip}"
        assert graph_signature(closure(out)) == graph_signature(d)

    def zip_absorbs_crossing() -> None:
        w1 = parse_word("TBW1 2\ns1 y1\n")
        w2 = parse_word("TBW1 2\ny1\n")
        verdict = isotopic_bounded(w1, w2, SearchBudget(max_depth=1))
        assert verdict.equivalent, verdict.reason
        replay(verdict.path)

    def stabilization_found() -> None:
        from .markov import stabilize
        w = parse_word("TBW1 2\ns1\n")
        verdict = markov_equivalent_bounded(w, stabilize(w, 1, +1),
                                            SearchBudget(max_depth=2))
        assert verdict.equivalent, verdict.reason
        replay(verdict.path)

    check("word serialization round-trips", word_round_trips)
    check("closure validates and round-trips", diagram_round_trip)
    check("braid recovers closure signature", braid_round_trip)
    check("crossing absorbed by zip within depth 1", zip_absorbs_crossing)
    check("stabilization reachable by Markov search", stabilization_found)
    if failures:
        print(f"selftest: {failures} of {total} checks FAILED")
        return EXIT_USAGE
    print(f"selftest: {total} checks passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument wiring


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tribraid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("validate", help="check a word or diagram file")
    p.add_argument("path", help="TBW1 or STGD1 file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("braid", help="turn a diagram into a braid word")
    p.add_argument("input", help="STGD1 diagram file")
    p.add_argument("-o", "--out", help="output word file (default: stdout)")
    p.add_argument("--emit-log",
                   help="also write the regularization/preparation log here")
    _add_braider_flags(p)
    p.set_defaults(func=cmd_braid)

    p = sub.add_parser("close", help="build the closure diagram of a word")
    p.add_argument("input", help="TBW1 word file (closable)")
    p.add_argument("-o", "--out", help="output diagram file (default: stdout)")
    p.set_defaults(func=cmd_close)

    p = sub.add_parser("equiv", help="bounded equivalence search")
    p.add_argument("word1", help="first TBW1 word file")
    p.add_argument("word2", help="second TBW1 word file")
    p.add_argument("--mode", choices=sorted(_EQUIV_MODES), default="isotopy",
                   help="relation searched (default: isotopy)")
    p.add_argument("--path", help="write the witnessing move path here")
    p.add_argument("--jobs", type=int, default=1, metavar="N",
                   help="worker budget for batch drivers; a single pair "
                        "runs sequentially and output never depends on N")
    _add_budget_flags(p)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("rewrite", help="replay a move path or normalize")
    p.add_argument("input", help="TBW1 word file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--replay", metavar="PATHFILE",
                       help="apply the steps in PATHFILE to the word")
    group.add_argument("--normalize", action="store_true",
                       help="free-reduce and sort far commutations")
    p.add_argument("--path",
                   help="with --normalize, write the replayable trace here")
    p.add_argument("-o", "--out", help="output word file (default: stdout)")
    p.set_defaults(func=cmd_rewrite)

    p = sub.add_parser("gen", help="deterministic pseudo-random objects")
    p.add_argument("--kind", choices=("word", "diagram"), required=True)
    p.add_argument("--seed", type=int, default=0,
                   help="generator seed (TRIBRAID_SEED overrides)")
    p.add_argument("--letters", type=int, default=None,
                   help="word length (default: 8 for words, 4 for diagrams)")
    p.add_argument("--max-strands", type=int, default=None,
                   help="strand-count cap (default: 5 for words, 4 for diagrams)")
    p.add_argument("--distortions", type=int, default=3,
                   help="diagram only: number of distortion moves")
    p.add_argument("--open", action="store_true",
                   help="word only: allow a non-closable boundary")
    p.add_argument("-o", "--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("render", help="draw a word or diagram")
    p.add_argument("input", help="TBW1 or STGD1 file")
    p.add_argument("--format", choices=("ascii", "svg"), default="ascii")
    p.add_argument("-o", "--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("selftest", help="run the built-in consistency checks")
    p.add_argument("-q", "--quiet", action="store_true",
                   help="print failures only")
    p.set_defaults(func=cmd_selftest)

    return parser


def _add_budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=int, default=DEFAULT_BUDGET_DEPTH,
                   help=f"search depth bound (default {DEFAULT_BUDGET_DEPTH})")
    p.add_argument("--max-len", type=int, default=DEFAULT_BUDGET_WORD_LEN,
                   help="intermediate word length bound "
                        f"(default {DEFAULT_BUDGET_WORD_LEN})")
    p.add_argument("--states", type=int, default=DEFAULT_BUDGET_STATES,
                   help=f"visited-state bound (default {DEFAULT_BUDGET_STATES})")


def _add_braider_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--label", choices=(OVER, UNDER), default=OVER,
                   help="label for units that cross nothing (default: over)")
    p.add_argument("--sign", choices=("+", "-"), default="+",
                   help="sign of crossings inserted while regularizing "
                        "vertices (default: +)")
    p.add_argument("--relaxed", action="store_true",
                   help="allow several same-role crossings per unit")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TribraidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
