"""Rewrite rules: catalog, site discovery, application, canonical form."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import valid_words
from oracles import naive_neighbors, to_tuples
from tribraid import (BraidWord, Direction, Letter, RuleFamily, RuleId, Site,
                      SiteError, apply, comm_normal_form, find_sites,
                      free_reduce, rule_catalog, strand_profile)
from tribraid.rules import (comm_normal_form_with_trace,
                            free_reduce_with_trace, word_order_key)
from tribraid.moves import replay_steps

X, Z, U = Letter.crossing, Letter.zip, Letter.unzip


def word(top, *letters):
    return BraidWord(top, tuple(letters))


# ---------------------------------------------------------------------------
# the catalog


def test_catalog_has_nine_schemes():
    catalog = rule_catalog()
    assert len(catalog) == 9
    assert len({s.rule.family for s in catalog}) == 9


def test_catalog_sign_variants():
    for scheme in rule_catalog():
        if scheme.rule.family is RuleFamily.FAR_COMMUTE:
            assert scheme.sign_variants == ()
        else:
            assert scheme.sign_variants == (1, -1)


# ---------------------------------------------------------------------------
# one worked example per family (left-to-right, then back)


CASES = [
    (RuleFamily.FREE_REDUCE, word(2, X(1, 1), X(1, -1)), word(2)),
    (RuleFamily.R3,
     word(3, X(1, -1), X(2, -1), X(1, -1)),
     word(3, X(2, -1), X(1, -1), X(2, -1))),
    (RuleFamily.R5_ZIP, word(2, X(1, 1), Z(1)), word(2, Z(1))),
    (RuleFamily.R5_UNZIP, word(1, U(1), X(1, -1)), word(1, U(1))),
    (RuleFamily.R4_ZIP_A,
     word(3, X(1, 1), X(2, 1), Z(1)), word(3, Z(2), X(1, 1))),
    (RuleFamily.R4_ZIP_B,
     word(3, X(2, -1), X(1, -1), Z(2)), word(3, Z(1), X(1, -1))),
    (RuleFamily.R4_UNZIP_A,
     word(2, U(1), X(2, 1), X(1, 1)), word(2, X(1, 1), U(2))),
    (RuleFamily.R4_UNZIP_B,
     word(2, U(2), X(1, 1), X(2, 1)), word(2, X(1, 1), U(1))),
    (RuleFamily.FAR_COMMUTE, word(4, X(1, 1), X(3, -1)),
     word(4, X(3, -1), X(1, 1))),
]


@pytest.mark.parametrize("family,lhs,rhs", CASES,
                         ids=[c[0].name for c in CASES])
def test_family_forward_and_back(family, lhs, rhs):
    sites = [s for s in find_sites(lhs, RuleId(family, None))
             if s.direction is Direction.LEFT_TO_RIGHT]
    assert len(sites) == 1
    site = sites[0]
    out = apply(lhs, RuleId(family, site.sign_variant), site)
    assert out == rhs

    # the site involutes into one that maps rhs back to lhs: same letter
    # index, opposite direction.  Cancelled pairs leave no letters behind,
    # so their inverse (an insertion) is constructed rather than discovered;
    # the symmetric far commutation reads the same in both directions.
    if family is RuleFamily.FREE_REDUCE:
        back = Site(site.letter_index, Direction.RIGHT_TO_LEFT, site.i,
                    sign_variant=site.sign_variant)
    elif family is RuleFamily.FAR_COMMUTE:
        (back,) = find_sites(rhs, RuleId(family, None))
        assert back.letter_index == site.letter_index
    else:
        matches = [s for s in find_sites(rhs, RuleId(family, None))
                   if s.direction is Direction.RIGHT_TO_LEFT
                   and s.letter_index == site.letter_index
                   and s.i == site.i
                   and s.sign_variant == site.sign_variant]
        assert len(matches) == 1
        back = matches[0]
    assert apply(rhs, RuleId(family, back.sign_variant), back) == lhs


def test_far_commute_lifts_across_a_zip():
    # a zip narrows the frame, so the far letter is renumbered when it
    # crosses over: y(1) c(2)  <->  c(3) y(1) on four strands
    lhs = word(4, Z(1), X(2, 1))
    rhs = word(4, X(3, 1), Z(1))
    (site,) = [s for s in find_sites(lhs, RuleId(RuleFamily.FAR_COMMUTE, None))
               if s.direction is Direction.LEFT_TO_RIGHT]
    assert (site.i, site.j) == (1, 3)
    assert apply(lhs, RuleFamily.FAR_COMMUTE, site) == rhs


def test_far_commute_pushes_across_an_unzip():
    lhs = word(3, U(1), X(3, -1))
    rhs = word(3, X(2, -1), U(1))
    (site,) = [s for s in find_sites(lhs, RuleId(RuleFamily.FAR_COMMUTE, None))
               if s.direction is Direction.LEFT_TO_RIGHT]
    assert apply(lhs, RuleFamily.FAR_COMMUTE, site) == rhs


def test_r5_expansion_offers_both_signs():
    sites = find_sites(word(2, Z(1)), RuleId(RuleFamily.R5_ZIP, None))
    assert [(s.direction, s.sign_variant) for s in sites] == [
        (Direction.RIGHT_TO_LEFT, 1), (Direction.RIGHT_TO_LEFT, -1)]
    grown = apply(word(2, Z(1)), RuleId(RuleFamily.R5_ZIP, -1), sites[1])
    assert grown == word(2, X(1, -1), Z(1))


def test_free_reduce_insertion_is_accepted_by_apply():
    # expansion sites are never enumerated, but apply honours them
    w = word(3, Z(1))
    site = Site(2, Direction.RIGHT_TO_LEFT, 1, sign_variant=-1)
    grown = apply(w, RuleId(RuleFamily.FREE_REDUCE, -1), site)
    assert grown == word(3, Z(1), X(1, -1), X(1, 1))
    assert find_sites(w, RuleId(RuleFamily.FREE_REDUCE, None)) == []


def test_free_reduce_insertion_respects_live_count():
    w = word(3, Z(1), Z(1))
    with pytest.raises(SiteError):
        apply(w, RuleId(RuleFamily.FREE_REDUCE, 1),
              Site(3, Direction.RIGHT_TO_LEFT, 1, sign_variant=1))


def test_stale_site_raises():
    w = word(3, X(1, 1), X(2, 1), X(1, 1))
    (site,) = [s for s in find_sites(w, RuleId(RuleFamily.R3, None))
               if s.direction is Direction.LEFT_TO_RIGHT]
    other = word(3, X(2, 1), X(1, 1), X(2, 1))
    with pytest.raises(SiteError):
        apply(other, RuleId(RuleFamily.R3, site.sign_variant),
              Site(site.letter_index, site.direction, 2))
    with pytest.raises(SiteError):
        apply(w, RuleId(RuleFamily.R3, 1), Site(9, Direction.LEFT_TO_RIGHT, 1))


def test_sites_are_sorted_and_unique():
    w = word(4, X(1, 1), X(1, -1), X(3, 1), X(1, 1), Z(2))
    for scheme in rule_catalog():
        sites = find_sites(w, scheme.rule)
        assert len(set(sites)) == len(sites)
        keys = [(s.letter_index, s.direction.value, s.i, s.j or -1,
                 0 if (s.sign_variant or 1) > 0 else 1) for s in sites]
        assert keys == sorted(keys)


@settings(max_examples=120, deadline=None)
@given(valid_words(max_top=4, max_len=7))
def test_neighbours_match_reference(w):
    """Site discovery + application agrees with a from-scratch rewriter."""
    mine = set()
    for scheme in rule_catalog():
        for site in find_sites(w, scheme.rule):
            rule = scheme.rule
            if rule.sign_variant is None and site.sign_variant is not None:
                rule = RuleId(rule.family, site.sign_variant)
            out = apply(w, rule, site)
            if len(out.letters) <= 11:
                mine.add(to_tuples(out))
    profile = strand_profile(w)
    for k in range(len(w.letters) + 1):
        for i in range(1, profile[k]):
            for s in (1, -1):
                out = apply(w, RuleId(RuleFamily.FREE_REDUCE, s),
                            Site(k + 1, Direction.RIGHT_TO_LEFT, i,
                                 sign_variant=s))
                if len(out.letters) <= 11:
                    mine.add(to_tuples(out))
    top, ls = to_tuples(w)
    assert mine == set(naive_neighbors(top, ls, 11))


# ---------------------------------------------------------------------------
# free reduction


def test_free_reduce_cascades():
    w = word(3, X(1, 1), X(2, 1), X(2, -1), X(1, -1))
    assert free_reduce(w) == word(3)


def test_free_reduce_trace_replays():
    w = word(2, X(1, 1), X(1, 1), X(1, -1), X(1, -1), X(1, 1))
    reduced, steps = free_reduce_with_trace(w)
    assert reduced == word(2, X(1, 1))
    assert replay_steps(w, steps) == reduced


@settings(max_examples=100, deadline=None)
@given(valid_words())
def test_free_reduce_is_idempotent_fixed_point(w):
    r = free_reduce(w)
    assert free_reduce(r) == r
    for a, b in zip(r.letters, r.letters[1:]):
        assert not (a.kind.name == "CROSSING" and b.kind.name == "CROSSING"
                    and a.index == b.index and a.sign == -b.sign)


# ---------------------------------------------------------------------------
# the commutation normal form


def test_comm_normal_form_extracts_distant_letters():
    # the low crossing slides past the high one; the adjacent-index pair
    # at 3 and 4 stays put
    w = word(5, X(4, 1), X(1, 1), X(3, -1))
    assert comm_normal_form(w) == word(5, X(1, 1), X(4, 1), X(3, -1))


def test_comm_normal_form_trace_replays():
    w = word(5, X(4, 1), X(1, 1), X(1, -1), X(3, -1))
    canon, steps = comm_normal_form_with_trace(w)
    assert canon == word(5, X(4, 1), X(3, -1))
    assert replay_steps(w, steps) == canon


@settings(max_examples=120, deadline=None)
@given(valid_words())
def test_comm_normal_form_idempotent(w):
    c = comm_normal_form(w)
    assert comm_normal_form(c) == c


@settings(max_examples=80, deadline=None)
@given(valid_words(max_top=4, max_len=7))
def test_comm_normal_form_invariant_under_commutation_moves(w):
    """Any one far-commutation or cancellation leaves the form unchanged."""
    canon = comm_normal_form(w)
    for family in (RuleFamily.FAR_COMMUTE, RuleFamily.FREE_REDUCE):
        for site in find_sites(w, RuleId(family, None)):
            rule = RuleId(family, site.sign_variant)
            assert comm_normal_form(apply(w, rule, site)) == canon


@settings(max_examples=40, deadline=None)
@given(valid_words(max_top=4, max_len=6), st.integers(0, 2**31))
def test_comm_normal_form_randomized_schedules_converge(w, seed):
    """Random walks by commutation moves never split a class."""
    rng = random.Random(seed)
    current = w
    for _ in range(6):
        options = []
        for family in (RuleFamily.FAR_COMMUTE, RuleFamily.FREE_REDUCE):
            options += [(RuleId(family, s.sign_variant), s)
                        for s in find_sites(current, RuleId(family, None))]
        if not options:
            break
        rule, site = rng.choice(options)
        current = apply(current, rule, site)
    assert comm_normal_form(current) == comm_normal_form(w)


# ---------------------------------------------------------------------------
# the deterministic word order


def test_word_order_prefers_shorter():
    small = word(3, X(1, 1))
    big = word(3, X(1, 1), X(1, -1))
    assert word_order_key(small) < word_order_key(big)


def test_word_order_breaks_ties_by_letters():
    a = word(3, X(1, 1))
    b = word(3, X(1, -1))
    c = word(3, X(2, 1))
    d = word(3, Z(1))
    keys = [word_order_key(x) for x in (a, b, c, d)]
    assert keys == sorted(keys)
    assert len(set(keys)) == 4
