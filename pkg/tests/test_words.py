from hypothesis import given, strategies as st

from growthforge.words import (
    FWord,
    GWord,
    commutator,
    eta_chain,
    eta_word,
    normal_form,
    r_word,
    r_word_free,
    r_word_raw,
    reduced_words,
    substitute,
    substitution_table,
    twist,
)
from growthforge.grig import OmegaWord

import pytest

words = st.text(alphabet="abcd", max_size=40)


def test_normal_form_examples():
    assert normal_form("bcd").letters == ""
    assert normal_form("aa").letters == ""
    assert normal_form("bc").letters == "d"
    assert normal_form("abca").letters == "ada"
    assert normal_form("").is_identity()


def test_rejects_foreign_letters():
    with pytest.raises(ValueError):
        normal_form("abx")


def test_r_word_lengths():
    assert len(r_word_raw()) == 78
    assert len(r_word_free(0)) == 78
    # the prefix cdb collapses in the Klein factor
    assert len(r_word(0)) == 64
    assert normal_form("cdb").is_identity()


def test_commutator_expansion():
    assert commutator("ab", "c") == "abcbac"


@given(words)
def test_normal_form_idempotent(w):
    g = normal_form(w)
    assert normal_form(g.letters) == g
    # normal forms alternate a with a single Klein letter
    s = g.letters
    assert all((x == "a") != (y == "a") for x, y in zip(s, s[1:]))


@given(words, words)
def test_product_is_associative_with_inverse(u, v):
    gu, gv = GWord.of(u), GWord.of(v)
    assert (gu * gv) * gu.inverse() == gu * (gv * gu.inverse())
    assert (gu * gu.inverse()).is_identity()


@given(words)
def test_fword_only_cancels_squares(w):
    f = FWord.of(w)
    assert all(x != y for x, y in zip(f.letters, f.letters[1:]))
    assert len(normal_form(f.letters)) <= len(f)


@given(words, st.integers(0, 2))
def test_twist_is_invertible(w, x):
    assert twist(twist(w, x), -x) == normal_form(w)
    assert twist(w, 3) == normal_form(w)


@given(words, st.integers(0, 2))
def test_substitution_is_a_homomorphism(w, x):
    u = w[: len(w) // 2]
    v = w[len(w) // 2:]
    for kind in ("sigma", "tau"):
        assert substitute(w, kind, x) == substitute(u, kind, x) * substitute(v, kind, x)


@given(words)
def test_sigma_length_bound(w):
    assert len(substitute(w, "sigma", 0)) <= 3 * len(w)


def test_substitution_tables():
    assert substitution_table("sigma", 0) == {"a": "aca", "b": "b", "c": "c", "d": "d"}
    assert substitution_table("tau", 0) == {"a": "c", "b": "a", "c": "a", "d": ""}
    # the relation bcd = 1 survives every twist
    for x in range(3):
        for kind in ("sigma", "tau"):
            assert substitute("bcd", kind, x).is_identity()
    with pytest.raises(ValueError):
        substitution_table("rho", 0)


def test_eta_chain_ends_in_eta():
    om = OmegaWord.parse("012")
    for k in range(4):
        chain = eta_chain(om, k)
        assert len(chain) == k + 1
        assert chain[-1] == eta_word(om, k)
        assert len(chain[-1]) <= 80 * 2**k
    with pytest.raises(ValueError):
        eta_word(om, -1)


def test_reduced_words_counts():
    ws = list(reduced_words(3))
    assert len(ws) == 1 + 4 + 12 + 36
    assert len(set(ws)) == len(ws)


def test_eta_lengths_up_to_six():
    om = OmegaWord.parse("012")
    lengths = [len(eta_word(om, k)) for k in range(7)]
    # frozen: each sigma step exactly doubles the 64-letter normal form of r
    assert lengths == [64 * 2**k for k in range(7)]
    assert all(n <= 80 * 2**k for k, n in enumerate(lengths))
