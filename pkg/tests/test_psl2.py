from hypothesis import given, strategies as st

from growthforge.growth import ball_series, diameter, empirical_expansion
from growthforge.marked import evaluate, verify_marking
from growthforge.psl2 import (
    check_identities,
    group_order,
    is_valid_modulus,
    normal_closure_is_whole,
    order_by_closure,
    psl2_group,
    sqrt_minus_one,
    standard_generator_matrices,
    valid_moduli,
)
from growthforge.words import r_word
from itertools import islice

import pytest


def test_valid_moduli():
    assert list(islice(valid_moduli(), 8)) == [1, 5, 13, 17, 25, 29, 37, 41]
    assert not is_valid_modulus(3) and not is_valid_modulus(15) and not is_valid_modulus(10)
    assert is_valid_modulus(65)


@pytest.mark.parametrize("N", [3, 7, 15, 4])
def test_bad_moduli_rejected(N):
    with pytest.raises(ValueError):
        standard_generator_matrices(N)


def test_sqrt_minus_one():
    assert sqrt_minus_one(5) == 2
    assert sqrt_minus_one(13) == 5
    for N in (17, 25, 65, 125, 221):
        i = sqrt_minus_one(N)
        assert (i * i + 1) % N == 0


def test_group_orders():
    assert [group_order(N) for N in (1, 5, 13, 25)] == [1, 60, 1092, 7500]
    assert order_by_closure(5) == 60
    assert order_by_closure(13) == 1092
    assert order_by_closure(25) == 7500


@pytest.mark.parametrize("N", [5, 13, 17, 25, 65])
def test_identity_suite(N):
    rep = check_identities(N)
    assert rep["ok"], rep
    assert verify_marking(psl2_group(N)).ok


def test_twisted_marking():
    for x in range(3):
        G = psl2_group(13, x)
        assert verify_marking(G).ok
        # r_x is a commutator word, so it is nontrivial in the twisted copy as well
        assert evaluate(r_word(x), G) != G.identity


def test_normal_closure():
    assert normal_closure_is_whole(5, r_word(0)) is True
    assert normal_closure_is_whole(13, r_word(0)) is True
    assert normal_closure_is_whole(5, "") is False
    assert normal_closure_is_whole(13, r_word(0), cap=100) == "cap"


def test_diameter_and_expansion():
    assert diameter(psl2_group(5)) == 6
    rep = empirical_expansion(5)
    assert rep.order == 60 and rep.diameter == 6 and not rep.partial
    assert 0 < rep.best_K < 20000
    rep13 = empirical_expansion(13)
    assert rep13.order == 1092 and rep13.best_K <= 20000


@given(st.sampled_from([5, 13, 17]), st.text(alphabet="abcd", max_size=25))
def test_inverse_is_reverse_word(N, w):
    G = psl2_group(N)
    assert evaluate(w[::-1], G) == G.inv(evaluate(w, G))


def test_crt_growth_matches():
    big = ball_series(psl2_group(65), 6).ball
    from growthforge.marked import diagonal_product
    prod = ball_series(diagonal_product([psl2_group(5), psl2_group(13)]), 6).ball
    assert big == prod
