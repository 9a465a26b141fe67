"""Scan the growth-gap condition for f = exp(n^beta), g1 = exp(n^alpha).

The predicted threshold is beta > 1 / (2 - alpha); the scan reports the
first grid point from which the condition holds, for each beta and C.
"""
import argparse
from dataclasses import dataclass, field

from growthforge.calculus import condition_check, parse_growth_expr


@dataclass
class Config:
    alpha: float = 0.6
    betas: list = field(default_factory=lambda: [0.65, 0.70, 0.72, 0.75, 0.8, 0.9])
    Cs: list = field(default_factory=lambda: [1.0, 10.0])
    n_hi: float = 1e60


def run(cfg: Config) -> dict:
    g1 = parse_growth_expr(f"exp(n^{cfg.alpha})")
    print(f"alpha = {cfg.alpha}, predicted threshold beta > {1 / (2 - cfg.alpha):.4f}")
    out = {}
    for beta in cfg.betas:
        f = parse_growth_expr(f"exp(n^{beta})")
        for C in cfg.Cs:
            rep = condition_check(f, f, g1, "vi", C, 2, cfg.n_hi)
            out[(beta, C)] = rep.holds_from
            hf = "none" if rep.holds_from is None else f"{rep.holds_from:.3g}"
            print(f"beta={beta:<5} C={C:<5g} holds from n0 = {hf}")
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--alpha", type=float, default=Config.alpha)
    ap.add_argument("--n-hi", type=float, default=Config.n_hi)
    a = ap.parse_args()
    run(Config(alpha=a.alpha, n_hi=a.n_hi))
