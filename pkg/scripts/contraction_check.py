"""Contraction radii: F^m(PSL_2(Z/5)) against G_{w,m+2}, and where G_w balls stabilize.

For each m the script checks the radius 2^m - 1 coincidence, then finds
the least quotient depth whose radius-(2^m - 1) ball already agrees with a
deeper quotient. The last column compares with the certificate depth used
by the growth oracle.
"""
import argparse
from dataclasses import dataclass

from growthforge.grig import OmegaWord, certificate_depth, decorated_group, grig_group, theta
from growthforge.growth import ball_series, coincidence_report
from growthforge.psl2 import psl2_group


@dataclass
class Config:
    omega: str = "012"
    modulus: int = 5
    m_max: int = 4
    cap: int = 5_000_000


def stable_depth(omega: OmegaWord, m: int, cap: int) -> int:
    r = theta(m)
    ref = ball_series(grig_group(omega, m + 4), r, cap).ball
    for depth in range(1, m + 4):
        if ball_series(grig_group(omega, depth), r, cap).ball == ref:
            return depth
    return m + 4


def run(cfg: Config) -> list:
    omega = OmegaWord.parse(cfg.omega)
    H = psl2_group(cfg.modulus)
    rows = []
    print("m  radius  coincide  product_ball  stable_depth  certificate_depth")
    for m in range(1, cfg.m_max + 1):
        rep = coincidence_report(decorated_group(omega, m, H), grig_group(omega, m + 2), theta(m), cap=cfg.cap)
        sd = stable_depth(omega, m, cfg.cap)
        cd = certificate_depth(omega, m)
        rows.append((m, theta(m), rep.coincide, rep.product_ball, sd, cd))
        print(f"{m}  {theta(m):6d}  {str(rep.coincide):8s}  {rep.product_ball:12d}  {sd:12d}  {cd:17d}")
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--omega", default=Config.omega)
    ap.add_argument("--modulus", type=int, default=Config.modulus)
    ap.add_argument("--m-max", type=int, default=Config.m_max)
    a = ap.parse_args()
    run(Config(a.omega, a.modulus, a.m_max))
