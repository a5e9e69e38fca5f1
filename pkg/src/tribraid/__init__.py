"""Trivalent braid calculus: words, rewriting, Markov moves, diagrams.

The package is organized bottom-up:

* :mod:`.words` -- validated words over crossings/zips/unzips.
* :mod:`.rules` -- the nine isotopy rule families as a rewrite system.
* :mod:`.moves` -- replayable move paths (isotopy + Markov-level steps).
* :mod:`.search` -- budgeted bidirectional equivalence search.
* :mod:`.markov` -- L-moves, conjugation, stabilization, TL/Markov search.
* :mod:`.geometry` -- exact rational planar predicates.
* :mod:`.diagram` -- piecewise-linear spatial trivalent-graph diagrams.
* :mod:`.distort` -- diagram distortions (affine + local template moves).
* :mod:`.braider` -- the diagram-to-braid-word algorithm.
* :mod:`.gen` -- seeded random words and diagrams.
* :mod:`.render` -- ASCII and SVG views.
* :mod:`.cli` -- the ``tribraid`` command-line tool.
"""

from .errors import (BraidingError, CompositionError, DiagramError,
                     InvalidWordError, MoveError, PathReplayError, SiteError,
                     SiteObstructionError, TribraidError, WordParseError)
from .words import (BraidWord, Letter, LetterKind, StrandProfile,
                    ValidationReport, compose, embed_right, identity,
                    parse_word, serialize_word, strand_profile, validate)
from .rules import (Direction, RuleFamily, RuleId, RuleScheme, RuleStep, Site,
                    apply, comm_normal_form, find_sites, free_reduce,
                    rule_catalog)
from .moves import (ConjStep, CycleStep, DestabStep, LMoveStep, MovePath,
                    StabStep, UnLMoveStep, parse_steps, replay, replay_steps,
                    serialize_steps)
from .search import SearchBudget, Verdict, isotopic_bounded
from .markov import (Flavor, GadgetSigns, LMoveSpec, LReduction, Shape,
                     conjugate, cycle_sigma, derive_conjugation_via_lmoves,
                     destabilize, detect_l_reductions, gadget_signs, l_move,
                     markov_equivalent_bounded, stabilize,
                     tl_equivalent_bounded, undo_l_move)
from .geometry import Affine, Point, orient, segment_meet
from .diagram import (Arc, Crossing, Diagram, DiagramReport, Vertex, Violation,
                      braid_box, closure, diagram_from_json, diagram_to_json,
                      graph_signature, port_name, require_valid_diagram,
                      underlying_graph, validate_diagram)
from .distort import (ArcFold, Curl, Poke, PythagoreanRotation, Scale, Shear,
                      Swing, Switch, Translate, Twirl, distort)
from .braider import (BraiderConfig, BraidUnit, PreparedDiagram, braid,
                      braid_up_arc, canonical_diagram, prepare, read_word,
                      regularize_vertices)
from .gen import random_diagram, random_distortions, random_word
from .render import (render_diagram_ascii, render_diagram_svg,
                     render_word_ascii, render_word_svg)

__version__ = "0.1.0"
