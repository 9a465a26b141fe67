import json

from hypothesis import given, settings, strategies as st

from growthforge.grig import OmegaWord, decorated_group, grig_group
from growthforge.growth import (
    GrowthSeries,
    ball_series,
    ball_spheres,
    balls_coincide,
    check_submultiplicative,
    coincidence_report,
    default_cap,
    diameter,
    exponent_series,
    gamma_oracle,
    gamma_truncation_bound,
    group_size,
    normal_ball_lower_series,
    r_length,
    sigma_composite,
    substituted_ball_lower,
)
from growthforge.marked import CapExceeded, diagonal_product, evaluate, trivial_group
from growthforge.psl2 import psl2_group
from growthforge.registry import resolve

import pytest

OMEGA = OmegaWord.parse("012")
H5 = psl2_group(5)

# G_w at radius <= 15, frozen from an independent BFS at depth 7
ORACLE_M4 = (1, 5, 11, 23, 40, 68, 108, 176, 271, 427, 643, 999, 1487, 2259, 3313, 4973)


def test_series_basics():
    s = ball_series(H5, 10)
    assert s.complete and not s.truncated
    # frozen from an independent matrix BFS
    assert s.ball == (1, 5, 11, 22, 34, 54, 60, 60, 60, 60, 60)
    assert s.at(100) == 60
    assert sum(s.sphere) == s.ball[-1]
    with pytest.raises(ValueError):
        ball_series(H5, -1)


def test_truncation_marker():
    s = ball_series(grig_group(OMEGA, 8), 30, cap=500)
    assert s.truncated and not s.complete
    assert s.n_max < 30
    with pytest.raises(IndexError):
        s.at(30)


def test_csv_and_json_round_trip():
    s = ball_series(grig_group(OMEGA, 4), 6)
    lines = s.to_csv().splitlines()
    assert lines[0] == "n,ball,sphere" and len(lines) == 8
    back = GrowthSeries.from_dict(json.loads(s.to_json()))
    assert back.ball == s.ball and back.group_label == s.group_label


def test_default_cap_env(monkeypatch):
    monkeypatch.setenv("GROWTHFORGE_CAP", "1e3")
    assert default_cap() == 1000
    monkeypatch.setenv("GROWTHFORGE_CAP", "0")
    with pytest.raises(ValueError):
        default_cap()


def test_diameter_and_size_caps():
    assert diameter(grig_group(OMEGA, 2)) == 4
    assert group_size(grig_group(OMEGA, 3)) == 128
    with pytest.raises(CapExceeded):
        group_size(grig_group(OMEGA, 6), cap=100)
    with pytest.raises(CapExceeded):
        diameter(H5, cap=10)


def test_product_size_fast_path_matches_search():
    P = diagonal_product([grig_group(OMEGA, 3), H5])
    slow = sum(len(s) for s in ball_spheres(P, 10**6, 10**6)[0])
    assert group_size(P) == slow == 7680


@pytest.mark.parametrize("workers", [1, 2, 4])
def test_threads_do_not_change_series(workers):
    G = decorated_group(OMEGA, 2, H5)
    assert ball_series(G, 9, workers=workers) == ball_series(G, 9)


def test_oracle_series():
    orc = gamma_oracle(OMEGA, 4)
    assert orc.depth == 7 and orc.certified == 15
    assert orc.exact == ORACLE_M4
    assert orc.is_exact(15) and not orc.is_exact(16)
    # the envelope beyond the exact range is submultiplicative
    assert orc.value(16) <= orc.value(8) ** 2
    assert orc.value(20) >= orc.value(15)


def test_oracle_against_deeper_quotient():
    deeper = ball_series(grig_group(OMEGA, 9), 15).ball
    assert deeper == ORACLE_M4


def test_coincidence():
    assert balls_coincide(H5, H5, 6)
    rep = coincidence_report(grig_group(OMEGA, 1), grig_group(OMEGA, 4), 3)
    assert not rep.coincide


def test_truncation_bound_example():
    F1 = decorated_group(OMEGA, 1, H5)
    G6 = grig_group(OMEGA, 6)
    for n in range(11):
        assert gamma_truncation_bound([F1, G6], [3600], G6, n).holds
    single = gamma_truncation_bound([G6], [1], G6, 5)
    assert single.product_ball == single.limit_ball == single.max_factor_ball


def test_substituted_lower_bound():
    for k in (0, 1, 2):
        rep = substituted_ball_lower(H5, OMEGA, k, 3)
        assert rep.holds and rep.c_k == (1 << (k + 1)) - 1
    rep = substituted_ball_lower(trivial_group(), OMEGA, 2, 3)
    assert rep.gamma_H == 1 and rep.holds


def test_sigma_composite_lands_in_last_leaf():
    F = decorated_group(OMEGA, 2, H5)
    e = evaluate(sigma_composite("abdc", OMEGA, 2), F)
    assert e.leaves[-1] == evaluate("abdc", H5)


def test_normal_ball_lower_series():
    assert r_length(0) == 78
    s1 = normal_ball_lower_series(H5, 0, 1, 400)
    assert s1.provenance == "lower-bound"
    assert all(v == 1 for v in s1.ball[:78])
    assert s1.ball[78] > 1
    assert s1.ball[-1] > 1
    s2 = normal_ball_lower_series(H5, 0, 2, 400)
    assert all(a <= b for a, b in zip(s1.ball, s2.ball))


def test_exponent_series():
    s = GrowthSeries("two-power", tuple(2**n for n in range(30)))
    pts = exponent_series(s)
    assert pts[0][0] == 2 and abs(pts[-1][1] - 1) < 0.15
    const = GrowthSeries("finite", (1, 5, 11, 23, 40, 60, 60, 60, 60))
    vals = [v for n, v in exponent_series(const) if n >= 5]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@settings(max_examples=20)
@given(st.sampled_from(["psl2:5", "psl2:13", "grig:012:depth=5", "F:012:k=2:H=psl2:5",
                        "prod(psl2:5,grig:012:depth=3)"]))
def test_submultiplicative_and_symmetric(label):
    G = resolve(label)
    s = ball_series(G, 9)
    assert check_submultiplicative(s) is None
    # generators are involutions: spheres grow by at most a factor 3 after radius 1
    sp = s.sphere
    assert all(sp[n + 1] <= 3 * sp[n] for n in range(1, len(sp) - 1))


@settings(max_examples=15)
@given(st.sampled_from(["psl2:5", "grig:012:depth=4", "F:012:k=1:H=psl2:5"]),
       st.sampled_from(["psl2:13", "grig:012:depth=3", "trivial"]))
def test_product_sandwich(a, b):
    A, B = resolve(a), resolve(b)
    sp = ball_series(diagonal_product([A, B]), 7).ball
    sa, sb = ball_series(A, 7).ball, ball_series(B, 7).ball
    for n in range(8):
        assert max(sa[n], sb[n]) <= sp[n] <= sa[n] * sb[n]


def test_coincidence_transfers_to_series():
    F = decorated_group(OMEGA, 2, H5)
    G = grig_group(OMEGA, 4)
    if balls_coincide(F, G, 3):
        assert ball_series(F, 3).ball == ball_series(G, 3).ball


def test_registry_labels():
    assert resolve("trivial").order == 1
    assert resolve("psl2:13:twist=2").meta["twist"] == 2
    with pytest.raises(ValueError):
        resolve("nope")
