"""Exact ball series for a few backends, written as CSV plus exponent data.

    python scripts/growth_series.py --out results/growth --n 20
"""
import argparse
import json
import os
from dataclasses import dataclass, field

from growthforge.growth import ball_series, exponent_series
from growthforge.registry import resolve


@dataclass
class Config:
    out: str = "results/growth"
    n: int = 20
    workers: int = 1
    cap: int = 5_000_000
    backends: list = field(default_factory=lambda: [
        "psl2:5", "psl2:13", "psl2:65",
        "grig:012:depth=4", "grig:012:depth=8",
        "F:012:k=1:H=psl2:5", "F:012:k=2:H=psl2:5",
    ])


def run(cfg: Config) -> dict:
    os.makedirs(cfg.out, exist_ok=True)
    summary = {}
    for label in cfg.backends:
        s = ball_series(resolve(label), cfg.n, cfg.cap, cfg.workers)
        stem = label.replace(":", "_").replace("=", "").replace("|", "-")
        with open(os.path.join(cfg.out, f"{stem}.csv"), "w") as fh:
            fh.write(s.to_csv())
        summary[label] = {"ball": list(s.ball), "complete": s.complete, "truncated": s.truncated,
                          "exponent": exponent_series(s)[-1:] or None}
        print(f"{label:28s} n={s.n_max:3d} ball={s.ball[-1]:>10d} complete={s.complete} truncated={s.truncated}")
    with open(os.path.join(cfg.out, "summary.json"), "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
    return summary


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=Config.out)
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--workers", type=int, default=Config.workers)
    ap.add_argument("--cap", type=int, default=Config.cap)
    a = ap.parse_args()
    run(Config(a.out, a.n, a.workers, a.cap))
