from hypothesis import given, strategies as st

from growthforge.growth import ball_series
from growthforge.marked import (
    ball_elements,
    diagonal_product,
    evaluate,
    product_projection_fibers,
    relabel,
    tabulate,
    trivial_group,
    verify_marking,
)
from growthforge.psl2 import psl2_group
from growthforge.grig import OmegaWord, grig_group

import pytest

H5 = psl2_group(5)
G3 = grig_group(OmegaWord.parse("012"), 3)
words = st.text(alphabet="abcd", max_size=30)


def test_trivial_group():
    T = trivial_group()
    assert verify_marking(T).ok
    assert evaluate("abcabd", T) == T.identity
    assert ball_series(T, 5).ball == (1,) * 6


def test_marking_detects_bad_relation():
    bad = relabel(H5, ["a", "b", "c", "c"])
    rep = verify_marking(bad)
    assert not rep.ok and rep.failed_relation == "bcd"


def test_diagonal_product_needs_factors():
    with pytest.raises(ValueError):
        diagonal_product([])


def test_product_with_itself_is_the_group():
    P = diagonal_product([H5, H5])
    assert ball_series(P, 8).ball == ball_series(H5, 8).ball


def test_projection_fibers():
    rep = product_projection_fibers(H5, G3, 4, 10**6)
    assert rep.surjective == (True, True)
    assert rep.product_ball >= max(rep.factor_balls)
    # fibers partition the product ball
    assert sum(s * m for s, m in rep.fibers[0].items()) == rep.product_ball
    capped = product_projection_fibers(H5, G3, 4, 10)
    assert capped.outcome == "cap"


def test_tabulate_preserves_growth():
    T = tabulate(H5)
    assert T.identity == 0
    assert ball_series(T, 8).ball == ball_series(H5, 8).ball


@given(words, words)
def test_evaluate_is_a_homomorphism(u, v):
    for G in (H5, G3):
        assert evaluate(u + v, G) == G.mul(evaluate(u, G), evaluate(v, G))
        assert G.mul(evaluate(u, G), G.inv(evaluate(u, G))) == G.identity


@given(words)
def test_encode_is_injective_on_the_product(w):
    P = diagonal_product([H5, G3])
    x = evaluate(w, P)
    y = evaluate(w + "bcd", P)
    assert x == y and P.encode(x) == P.encode(y)


def test_ball_elements_spheres_are_disjoint():
    spheres = ball_elements(G3, 6, 10**6)
    flat = [x for s in spheres for x in s]
    assert len(flat) == len(set(flat))
