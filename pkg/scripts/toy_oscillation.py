"""Desk-scale oscillation: build a two-stage plan and re-verify it with exact balls.

Also runs the large-gap plan with an uncertified power proxy for g1, and
shows that three general stages already need moduli beyond reach.
"""
import argparse
from dataclasses import dataclass

from growthforge.calculus import BoundConstants, parse_growth_expr
from growthforge.construct import OracleProduct, PlanError, build_general_plan, build_main_plan, verify_plan
from growthforge.grig import OmegaWord
from growthforge.growth import gamma_oracle


@dataclass
class Config:
    omega: str = "012"
    f: str = "exp(n^0.9)"
    g: str = "exp(n^0.5)"
    K: float = 0.125
    Kprime: float = 0.125
    oracle_m: int = 4


def run(cfg: Config):
    omega = OmegaWord.parse(cfg.omega)
    oracle = gamma_oracle(omega, cfg.oracle_m)
    f = parse_growth_expr(cfg.f)
    g = OracleProduct(parse_growth_expr(cfg.g), oracle)
    constants = BoundConstants(cfg.K, cfg.Kprime)
    plan = build_general_plan(f, g, omega=omega, stages=2, constants=constants, oracle=oracle)
    print(plan.to_json())
    rep = verify_plan(plan, f, g, oracle=oracle)
    for c in rep.checks:
        print(f"stage {c.stage} {c.display:5s} n={c.n} gamma_bound={c.gamma_bound} "
              f"log_target={c.log_target:.4f} pass={c.passed} ({c.provenance})")
    try:
        build_general_plan(f, g, omega=omega, stages=3, constants=constants, oracle=oracle)
    except PlanError as e:
        print("three stages:", e)
    main = build_main_plan(cfg.f, "exp(n^0.3)", "exp(n^0.8)", "exp(n^0.25)", omega=omega,
                           constants=BoundConstants(20000, cfg.Kprime), oracle=oracle)
    for s in main.stages:
        print(f"large-gap stage m={s.m} p={s.modulus} n={s.n} n'={s.n_prime}")
    return rep


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--K", type=float, default=Config.K)
    ap.add_argument("--Kprime", type=float, default=Config.Kprime)
    a = ap.parse_args()
    run(Config(K=a.K, Kprime=a.Kprime))
