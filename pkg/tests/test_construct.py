import json
import math

from hypothesis import given, strategies as st

from growthforge.calculus import BoundConstants, parse_growth_expr
from growthforge.construct import (
    ConstructionPlan,
    OracleProduct,
    PlanError,
    Stage,
    build_general_plan,
    build_main_plan,
    classify_D,
    least_modulus_above,
    oracle_log,
    primes_1mod4_between,
    truncated_gamma,
    verify_plan,
)
from growthforge.grig import OmegaWord
from growthforge.growth import gamma_oracle
from growthforge.psl2 import group_order, is_valid_modulus

import pytest

OMEGA = OmegaWord.parse("012")
ORACLE = gamma_oracle(OMEGA, 4)
SMALL = BoundConstants(0.125, 0.125)


def toy_plan(stages=2):
    f = parse_growth_expr("exp(n^0.9)")
    g = OracleProduct(parse_growth_expr("exp(n^0.5)"), ORACLE)
    return f, g, build_general_plan(f, g, omega=OMEGA, stages=stages, constants=SMALL, oracle=ORACLE)


def test_oracle_product_and_log():
    g = OracleProduct(parse_growth_expr("exp(n^0.5)"), ORACLE)
    assert g.log(9) == pytest.approx(3 + math.log(ORACLE.exact[9]))
    assert "gamma[012]" in g.src
    # beyond the enumerated envelope the split bound is still submultiplicative
    assert oracle_log(ORACLE, 5000) <= 2 * oracle_log(ORACLE, 2500) + 1e-9


def test_least_modulus():
    assert least_modulus_above(math.log(59)) == 5
    assert least_modulus_above(math.log(60)) == 13
    N = least_modulus_above(20.0)
    assert is_valid_modulus(N) and math.log(group_order(N)) > 20.0
    with pytest.raises(PlanError):
        least_modulus_above(5000.0)


def test_prime_window():
    p = primes_1mod4_between(math.log(100), math.log(5000))
    assert p == 13
    assert primes_1mod4_between(5.0, 4.0) is None
    assert primes_1mod4_between(math.log(61), math.log(1000)) is None


def test_toy_plan_shape():
    f, g, plan = toy_plan()
    s1, s2 = plan.stages
    assert (s1.m, s1.modulus) == (1, 1)
    assert (s2.m, s2.modulus, s2.twist, s2.n, s2.n_prime) == (2, 5, 2, 1, 1)
    back = ConstructionPlan.from_dict(json.loads(plan.to_json()))
    assert back.to_dict() == plan.to_dict()


def test_toy_plan_verifies():
    f, g, plan = toy_plan()
    rep = verify_plan(plan, f, g, oracle=ORACLE)
    assert rep.passed
    assert {c.display for c in rep.checks} == {"upper", "lower"}
    upper = next(c for c in rep.checks if c.display == "upper")
    assert upper.provenance == "exact-integers"
    assert upper.detail["gamma_truncated_exact"] <= upper.gamma_bound


def test_three_stage_toy_plan_fails_honestly():
    with pytest.raises(PlanError):
        toy_plan(3)


def test_plan_validation():
    with pytest.raises(PlanError):
        ConstructionPlan(OMEGA, [Stage(2, 1, 0), Stage(2, 5, 0)], SMALL)
    with pytest.raises(PlanError):
        ConstructionPlan(OMEGA, [Stage(1, 1, 0), Stage(2, 7, 0)], SMALL)
    with pytest.raises(ValueError):
        build_general_plan("exp(n^0.9)", "exp(n^0.5)", stages=0, oracle=ORACLE)


def test_truncated_gamma_certificate():
    _, _, plan = toy_plan()
    tr = truncated_gamma(plan, 1, 3)
    assert tr.certificate == 3
    assert tr.series.ball[:4] == ORACLE.exact[:4]


def test_main_plan_with_proxy():
    plan = build_main_plan("exp(n^0.9)", "exp(n^0.3)", "exp(n^0.8)", "exp(n^0.25)",
                           omega=OMEGA, constants=BoundConstants(20000, 0.125), oracle=ORACLE)
    s1, s2 = plan.stages
    assert s1.m == 4 and s1.modulus == 1
    assert (s2.m, s2.modulus, s2.n, s2.n_prime) == (14, 5, 13, 144716)
    assert s2.provenance["log_L"] < math.log(60) < s2.provenance["log_U"]


def test_main_plan_with_exponential_envelope_fails():
    g1 = OracleProduct(parse_growth_expr("exp(n^0.25)"), ORACLE)
    with pytest.raises(PlanError):
        build_main_plan("exp(n^0.9)", "exp(n^0.3)", g1, "exp(n^0.25)", omega=OMEGA,
                        constants=BoundConstants(20000, 0.125), oracle=ORACLE, m_max=20)


def test_classify():
    rep = classify_D(5, 1, "exp(n^0.9)", "exp(n^0.3)", OMEGA, n_max=8, oracle=ORACLE)
    assert rep.label == "D_greater" and rep.witness == 2
    assert json.loads(json.dumps(rep.to_dict()))["label"] == "D_greater"
    # a very fast f2 cannot be reached inside the window
    rep = classify_D(5, 1, "exp(n^2)", "exp(n^1.5)", OMEGA, n_max=6, oracle=ORACLE, n_far=10**4)
    assert rep.label in ("D_less", "unknown")


@given(st.floats(0.0, 14.0))
def test_least_modulus_is_least(t):
    N = least_modulus_above(t)
    assert math.log(group_order(N)) > t
    smaller = [M for M in range(1, N) if is_valid_modulus(M)]
    assert all(math.log(group_order(M)) <= t for M in smaller)
