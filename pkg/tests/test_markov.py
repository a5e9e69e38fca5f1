"""Markov-type moves: L-moves, conjugation, stabilization, and searches."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import closable_words, valid_words
from oracles import to_tuples
from tribraid import (BraidWord, Flavor, GadgetSigns, LMoveSpec, Letter,
                      MoveError, SearchBudget, Shape, conjugate, cycle_sigma,
                      derive_conjugation_via_lmoves, destabilize,
                      detect_l_reductions, free_reduce, gadget_signs,
                      identity, isotopic_bounded, l_move,
                      markov_equivalent_bounded,
                      parse_steps, replay, serialize_steps, stabilize,
                      strand_profile, tl_equivalent_bounded, undo_l_move,
                      validate)

X, Z, U = Letter.crossing, Letter.zip, Letter.unzip


def word(top, *letters):
    return BraidWord(top, tuple(letters))


@st.composite
def lmove_specs(draw, wd):
    profile = strand_profile(wd)
    cut = draw(st.integers(0, len(wd.letters)))
    i = draw(st.integers(1, profile[cut]))
    flavor = draw(st.sampled_from((Flavor.OVER, Flavor.UNDER)))
    sign = draw(st.sampled_from((1, -1)))
    shape = draw(st.sampled_from((Shape.BASIC, Shape.LEFT, Shape.RIGHT)))
    return LMoveSpec(cut, i, flavor, sign, shape)


# ---------------------------------------------------------------------------
# L-moves


def test_gadget_sign_table():
    assert gadget_signs(Flavor.OVER) == GadgetSigns(-1, 1)
    assert gadget_signs(Flavor.UNDER) == GadgetSigns(1, -1)


def test_under_lmove_on_one_crossing():
    # the new strand routes under on the way in, over on the way out
    big = l_move(word(2, X(1, 1)), LMoveSpec(0, 1, Flavor.UNDER, 1, Shape.RIGHT))
    assert big.top_count == 3
    assert [str(l) for l in big.letters] == ["s2", "s1", "S2", "s1"]


def test_lmove_at_top_strand_is_stabilization():
    w = word(2, X(1, 1), X(1, -1))
    for flavor in (Flavor.OVER, Flavor.UNDER):
        for sign in (1, -1):
            big = l_move(w, LMoveSpec(2, 2, flavor, sign, Shape.RIGHT))
            assert big == stabilize(w, 2, sign)


def test_left_shape_mirrors_the_crossing():
    w = word(2, X(1, 1))
    right = l_move(w, LMoveSpec(0, 1, Flavor.OVER, 1, Shape.RIGHT))
    left = l_move(w, LMoveSpec(0, 1, Flavor.OVER, -1, Shape.LEFT))
    assert right == left


def test_lmove_cut_out_of_range():
    with pytest.raises(MoveError):
        l_move(word(2, X(1, 1)), LMoveSpec(5, 1, Flavor.OVER, 1, Shape.RIGHT))
    with pytest.raises(MoveError):
        l_move(word(2, X(1, 1)), LMoveSpec(0, 3, Flavor.OVER, 1, Shape.RIGHT))


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_lmove_results_are_valid_and_taller(data):
    w = data.draw(closable_words(max_top=4, max_len=6))
    spec = data.draw(lmove_specs(w))
    big = l_move(w, spec)
    assert big.top_count == w.top_count + 1
    assert validate(big).ok
    assert big.bottom_count == w.bottom_count + 1


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_undo_inverts_lmove(data):
    w = data.draw(closable_words(max_top=4, max_len=6))
    spec = data.draw(lmove_specs(w))
    big = l_move(w, spec)
    assert free_reduce(undo_l_move(big, spec)) == free_reduce(w)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_detect_finds_the_introduced_gadget(data):
    w = data.draw(closable_words(max_top=3, max_len=5))
    spec = data.draw(lmove_specs(w))
    big = l_move(w, spec)
    matches = [r for r in detect_l_reductions(big) if r.reduced == w]
    assert matches, "freshly introduced gadget goes undetected"
    assert all(undo_l_move(big, r) == r.reduced for r in matches)


def test_detect_single_crossing_reduces_to_one_strand():
    # a lone top crossing is itself a stabilization gadget
    reductions = detect_l_reductions(word(2, X(1, 1)))
    assert [r.reduced for r in reductions] == [identity(1)]


def test_detect_on_unreducible_word_is_empty():
    # removing either crossing would strand an index-1 crossing on one strand
    assert detect_l_reductions(word(2, X(1, 1), X(1, 1))) == []


# ---------------------------------------------------------------------------
# conjugation / cycling / stabilization


def test_conjugate_wraps_with_inverse_pair():
    w = word(3, Z(1), U(1))
    out = conjugate(w, 2, -1)
    assert out.letters == (X(2, -1),) + w.letters + (X(2, 1),)
    assert validate(out).ok and out.is_closable


def test_conjugate_strand_bounds():
    with pytest.raises(MoveError):
        conjugate(word(2, X(1, 1)), 2, 1)
    with pytest.raises(MoveError):
        conjugate(word(2, X(1, 1)), 0, 1)


def test_cycle_sigma_head_and_tail():
    w = word(2, X(1, 1), Z(1), U(1))
    assert cycle_sigma(w, "head").letters == (Z(1), U(1), X(1, 1))
    assert cycle_sigma(w) == cycle_sigma(w, "head")
    t = word(2, Z(1), U(1), X(1, -1))
    assert cycle_sigma(t, "tail").letters == (X(1, -1), Z(1), U(1))


def test_cycle_sigma_requires_boundary_crossing():
    with pytest.raises(MoveError):
        cycle_sigma(word(2, Z(1), U(1)), "head")
    with pytest.raises(MoveError):
        cycle_sigma(identity(2), "tail")


def test_stabilize_inserts_top_crossing():
    w = word(2, X(1, 1))
    out = stabilize(w, 1, -1)
    assert out.top_count == 3
    assert out.letters == (X(1, 1), X(2, -1))
    assert out.is_closable


def test_stabilize_requires_full_level():
    w = word(2, Z(1), U(1))  # level drops to 1 between the letters
    with pytest.raises(MoveError):
        stabilize(w, 1, 1)
    assert stabilize(w, 0, 1).letters == (X(2, 1), Z(1), U(1))
    assert stabilize(w, 2, 1).letters == (Z(1), U(1), X(2, 1))


def test_destabilize_undoes_stabilize():
    w = word(2, X(1, 1), X(1, 1))
    for k in (0, 1, 2):
        for s in (1, -1):
            assert w in destabilize(stabilize(w, k, s))


def test_destabilize_lone_crossing_to_identity():
    assert destabilize(word(2, X(1, 1))) == [identity(1)]


def test_destabilize_on_unreducible_word():
    assert destabilize(word(2, X(1, 1), X(1, 1))) == []


@settings(max_examples=60, deadline=None)
@given(closable_words(), st.sampled_from((1, -1)))
def test_markov_ops_preserve_closability(w, sign):
    n = w.top_count
    if n >= 2:
        assert conjugate(w, 1, sign).is_closable
    cuts = [k for k, level in enumerate(strand_profile(w)) if level == n]
    for k in cuts:
        assert stabilize(w, k, sign).is_closable
    for reduced in destabilize(w):
        assert reduced.is_closable


# ---------------------------------------------------------------------------
# bounded equivalence searches


def test_stabilization_is_markov_reachable_at_depth_one():
    w = word(2, X(1, 1), X(1, 1))
    v = markov_equivalent_bounded(w, stabilize(w, 2, 1), SearchBudget(1, 8, 500))
    assert v.equivalent
    assert replay(v.path) == stabilize(w, 2, 1)


def test_conjugation_is_markov_reachable_at_depth_one():
    # the high crossing cannot be absorbed by the low vertex pair, so the
    # two sides have distinct canonical forms and plain isotopy cannot
    # bridge them; one markov move (a cycle, or a conjugation whose new
    # head cancels) must appear in the path
    lhs = word(3, X(2, 1), Z(1), U(1))
    rhs = word(3, Z(1), U(1), X(2, 1))
    assert not isotopic_bounded(lhs, rhs, SearchBudget(1, 8, 500)).equivalent
    v = markov_equivalent_bounded(lhs, rhs, SearchBudget(1, 8, 500))
    assert v.equivalent
    tokens = [s.token() for s in v.path.steps]
    assert any(t.startswith(("cycle", "conj")) for t in tokens)
    assert replay(v.path) == rhs


def test_pure_cycle_appears_when_conjugation_cannot_shortcut():
    lhs = word(3, X(2, 1), X(1, -1))
    rhs = word(3, X(1, -1), X(2, 1))
    v = markov_equivalent_bounded(lhs, rhs, SearchBudget(2, 8, 2000))
    assert v.equivalent
    assert replay(v.path) == rhs


def test_lmove_result_is_markov_reachable():
    w = word(2, X(1, 1))
    big = l_move(w, LMoveSpec(0, 1, Flavor.UNDER, 1, Shape.RIGHT))
    v = markov_equivalent_bounded(w, big, SearchBudget(6, 14, 50000))
    assert v.equivalent
    assert replay(v.path) == big


def test_markov_search_requires_closable_words():
    with pytest.raises(MoveError):
        markov_equivalent_bounded(word(2, Z(1)), word(2, Z(1)),
                                  SearchBudget(2, 8, 100))


def test_tl_single_lmove_found_at_depth_one():
    w = word(2, X(1, -1))
    big = l_move(w, LMoveSpec(1, 1, Flavor.OVER, 1, Shape.RIGHT))
    v = tl_equivalent_bounded(w, big, SearchBudget(1, 10, 2000))
    assert v.equivalent


def test_tl_connects_conjugates_within_depth_six():
    for b in (word(2, Z(1), U(1)), word(2, X(1, 1), X(1, 1))):
        lhs = word(2, X(1, 1), *b.letters)
        rhs = word(2, *b.letters, X(1, 1))
        v = tl_equivalent_bounded(lhs, rhs, SearchBudget(6, 16, 100000))
        assert v.equivalent, (b, v.reason)


def test_tl_across_strand_counts():
    # a lone crossing on two strands collapses to the one-strand identity
    v = tl_equivalent_bounded(identity(1), word(2, X(1, 1)),
                              SearchBudget(2, 8, 2000))
    assert v.equivalent


def test_tl_distinct_closures_exhaust_honestly():
    # one circle against two: no path exists, and the verdict says only
    # that the budget ran out rather than inventing an answer
    v = tl_equivalent_bounded(identity(1), identity(2),
                              SearchBudget(3, 6, 3000))
    assert not v.equivalent
    assert "exhausted" in v.reason


# ---------------------------------------------------------------------------
# the conjugation-from-L-moves derivation


def test_derive_conjugation_loop_on_identity_body():
    w = word(2, X(1, -1))
    path = derive_conjugation_via_lmoves(w, 1, -1)
    assert path.start == w and path.end == w
    assert len(path.steps) >= 2
    assert replay(path) == w


def test_derive_conjugation_on_vertex_body():
    w = word(2, X(1, -1), Z(1), U(1))
    path = derive_conjugation_via_lmoves(w, 1, -1)
    assert path.end == word(2, Z(1), U(1), X(1, -1))
    assert replay(path) == path.end
    tokens = [s.token() for s in path.steps]
    assert tokens[0].startswith("Lmove") and tokens[-1].startswith("unLmove")


def test_derive_conjugation_tail_form():
    w = word(2, Z(1), U(1), X(1, 1))
    path = derive_conjugation_via_lmoves(w, 1, 1)
    assert path.end == word(2, X(1, 1), Z(1), U(1))


def test_derive_conjugation_rejects_wrong_head():
    with pytest.raises(MoveError):
        derive_conjugation_via_lmoves(word(2, Z(1), U(1)), 1, 1)
    with pytest.raises(MoveError):
        derive_conjugation_via_lmoves(word(2, X(1, 1), Z(1), U(1)), 1, -1)


def test_derive_conjugation_reports_single_pair_limit():
    # three vertex-free strands need a longer L-move chain; the
    # one-enlargement derivation must refuse rather than mislabel
    with pytest.raises(MoveError):
        derive_conjugation_via_lmoves(word(3, X(2, 1), X(1, -1), X(2, 1)), 2, 1)


# ---------------------------------------------------------------------------
# tokens


def test_markov_step_tokens_round_trip():
    w = word(2, X(1, -1), Z(1), U(1))
    path = derive_conjugation_via_lmoves(w, 1, -1)
    text = serialize_steps(path.steps)
    assert parse_steps(text) == path.steps
    assert "Lmove" in text and "unLmove" in text
