"""Shared strategies and helpers for the test suite."""

from __future__ import annotations

from hypothesis import strategies as st

from tribraid import BraidWord, Letter


@st.composite
def valid_words(draw, max_top=5, max_len=10, kinds=('c', 'z', 'u')):
    """A random well-formed word, built left to right against the live count."""
    top = draw(st.integers(1, max_top))
    length = draw(st.integers(0, max_len))
    m = top
    letters = []
    for _ in range(length):
        options = [k for k in kinds if k == 'u' or m >= 2]
        if not options:
            break
        kind = draw(st.sampled_from(options))
        if kind == 'c':
            letters.append(Letter.crossing(draw(st.integers(1, m - 1)),
                                           draw(st.sampled_from((1, -1)))))
        elif kind == 'z':
            letters.append(Letter.zip(draw(st.integers(1, m - 1))))
            m -= 1
        else:
            letters.append(Letter.unzip(draw(st.integers(1, m))))
            m += 1
    return BraidWord(top, tuple(letters))


def pure_words(max_top=5, max_len=10):
    return valid_words(max_top=max_top, max_len=max_len, kinds=('c',))


def closable_words(max_top=4, max_len=8):
    return valid_words(max_top=max_top, max_len=max_len).filter(
        lambda w: w.is_closable)
