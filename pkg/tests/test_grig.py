import random

from hypothesis import given, strategies as st

from growthforge.grig import (
    GEN_TABLE,
    OmegaWord,
    TreeAuto,
    certificate_depth,
    decorated_group,
    forget_decoration,
    grig_group,
    kernel_order,
    leaf_orbit,
    omega_report,
    theta,
    tree_of,
)
from growthforge.growth import ball_series, coincidence_report, group_size
from growthforge.marked import evaluate, trivial_group, verify_marking
from growthforge.psl2 import psl2_group
from growthforge.words import eta_word, r_word, substitute

import pytest

OMEGA = OmegaWord.parse("012")
H5 = psl2_group(5)
words = st.text(alphabet="abcd", max_size=30)


def test_omega_parsing_and_letters():
    om = OmegaWord.parse("01|2")
    assert om.prefix_of(5) == (0, 1, 2, 2, 2)
    assert om.is_stabilizing and om.spec() == "01|2"
    assert OMEGA.prefix_of(7) == (0, 1, 2, 0, 1, 2, 0)
    assert OMEGA.shift(1).prefix_of(3) == (1, 2, 0)
    assert OmegaWord.parse("2|01").shift(3).prefix_of(2) == (0, 1)
    for bad in ("", "013", "0|"):
        with pytest.raises(ValueError):
            OmegaWord.parse(bad)
    with pytest.raises(IndexError):
        OMEGA.letter(0)


def test_omega_report_and_certificate():
    assert omega_report(OMEGA) == omega_report(OMEGA, 10)
    assert omega_report(OMEGA).run_bound == 1
    assert omega_report(OmegaWord.parse("0001|12")).run_bound == 3
    assert certificate_depth(OMEGA, 3) == 6
    with pytest.raises(ValueError):
        certificate_depth(OmegaWord.parse("1"), 2)
    assert omega_report(OmegaWord.parse("1")).stabilizing


def test_generator_table_rows():
    # each row puts a on exactly two of b, c, d; row x misses phi^-x(d)
    for x, row in GEN_TABLE.items():
        assert sum(row.values()) == 2
        assert not row["dcb"[x]]


@pytest.mark.parametrize("k,order", [(1, 2), (2, 8), (3, 128), (4, 4096)])
def test_quotient_orders(k, order):
    assert group_size(grig_group(OMEGA, k)) == order


def test_markings_are_valid():
    for k in range(5):
        assert verify_marking(grig_group(OMEGA, k)).ok
        assert verify_marking(decorated_group(OMEGA, min(k, 2), H5)).ok


def test_bytes_and_tuple_backends_agree():
    small = ball_series(grig_group(OMEGA, 8), 9).ball
    full = ball_series(decorated_group(OMEGA, 8), 9).ball
    assert small == full


def test_leaf_orbit_is_transitive():
    for k in range(1, 7):
        assert leaf_orbit(OMEGA, k) == set(range(1 << k))


def test_tree_of_and_identity():
    G = grig_group(OMEGA, 3)
    t = tree_of(G, evaluate("abab", G))
    assert isinstance(t, TreeAuto) and t.depth == 3
    assert tree_of(G, G.identity).is_identity()
    assert TreeAuto.from_bits(3, t.bits()) == t


@given(words)
def test_forgetting_decoration_is_the_quotient(w):
    F = decorated_group(OMEGA, 3, H5)
    G = grig_group(OMEGA, 3)
    assert tuple(forget_decoration(evaluate(w, F)).perm) == tree_of(G, evaluate(w, G)).perm


@given(words)
def test_trivial_decoration_matches_grig(w):
    F = decorated_group(OMEGA, 3, trivial_group())
    G = grig_group(OMEGA, 3)
    assert tuple(evaluate(w, F).perm) == tree_of(G, evaluate(w, G)).perm


def test_sigma_identity():
    # sigma_x(eta) evaluates to (tree identity; tau_x(eta), eta) in F_x(H)
    rng = random.Random(7)
    for x in range(3):
        F = decorated_group(OmegaWord((), (x,)), 1, H5)
        for _ in range(200):
            w = "".join(rng.choice("abcd") for _ in range(rng.randint(0, 30)))
            e = evaluate(substitute(w, "sigma", x), F)
            assert tuple(e.perm) == (0, 1)
            assert tuple(e.leaves) == (evaluate(substitute(w, "tau", x), H5), evaluate(w, H5))


def test_eta_lands_in_one_leaf():
    for k in range(4):
        w = eta_word(OMEGA, k)
        e = evaluate(w, decorated_group(OMEGA, k, H5))
        r = evaluate(r_word(OMEGA.letter(k + 1)), H5)
        leaves = list(e.leaves)
        assert leaves.count(r) == 1
        assert leaves.count(H5.identity) == len(leaves) - 1
        # the value sits in the rightmost leaf
        assert leaves[-1] == r


def test_kernel_order():
    out = kernel_order(OMEGA, 1, H5, 10**6)
    assert out.order == 3600 and out.group_order == 7200 and out.matches
    assert kernel_order(OMEGA, 1, H5, 100).order == "cap"


@pytest.mark.parametrize("m", [1, 2, 3])
def test_contraction(m):
    rep = coincidence_report(decorated_group(OMEGA, m, H5), grig_group(OMEGA, m + 2), theta(m))
    assert rep.coincide


def test_shallow_quotient_differs():
    rep = coincidence_report(grig_group(OMEGA, 1), grig_group(OMEGA, 4), 3)
    assert not rep.coincide and rep.first_difference == 1
