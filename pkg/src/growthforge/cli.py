"""Command-line entry point: ``growthforge <command> ...``.

Every JSON report is written with sorted keys so that repeated runs are
byte-identical. Counts are exact integers; analytic bounds are reported in
log space.
"""
from __future__ import annotations

import argparse
import json
import math
import random
import sys
from typing import Optional, Sequence

from . import calculus as calc
from .calculus import BoundConstants, parse_growth_expr
from .construct import (
    OracleProduct,
    PlanError,
    build_general_plan,
    build_main_plan,
    classify_D,
    verify_plan,
)
from .grig import OmegaWord, decorated_group, grig_group, kernel_order, theta
from .growth import (
    GrowthSeries,
    ball_series,
    coincidence_report,
    default_cap,
    diameter,
    exponent_series,
    gamma_oracle,
    gamma_truncation_bound,
    group_size,
)
from .marked import CapExceeded, diagonal_product, evaluate, verify_marking
from .psl2 import check_identities, psl2_group
from .registry import resolve
from .words import eta_word, substitute

# Function shapes for the calculus and construct commands.
PRESETS = {
    # upper bound exp(n^(4/5)) against a lower target exp(n^0.9)
    "oscillating": {"f": "exp(n^0.9)", "g": "exp(n^0.8)"},
    # mu(n) = n^0.9 with the upper envelope exp(mu(9n))
    "oscillating-upper": {"f1": "exp((9*n)^0.9)", "f2": "exp(n^0.9)", "g1": "exp(n^0.8)", "g2": "exp(n^0.5207)"},
    # near-exponential quartet with epsilon = 1/2
    "near-exponential": {
        "f1": "exp(n*log(log(log(n)))^0.5/log(log(n)))",
        "f2": "exp(n/log(log(n)))",
        "g1": "exp(n/log(n)^0.5)",
        "g2": "exp(n/log(n)^2.5)",
    },
    # power pair with log g1 ~ n^0.6 and log f ~ n^0.75
    "power-pair": {"f1": "exp(n^0.75)", "f2": "exp(n^0.75)", "g1": "exp(n^0.6)", "g2": "exp(n^0.5)"},
}


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default)


def _json_default(o):
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if hasattr(o, "to_dict"):
        return o.to_dict()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if isinstance(o, tuple):
        return list(o)
    return repr(o)


def _out(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cap(args) -> int:
    return args.cap if getattr(args, "cap", None) else default_cap()


def _constants(args) -> BoundConstants:
    return BoundConstants(args.K, args.Kprime)


def _fn(args, name: str):
    val = getattr(args, name, None)
    if val is None and getattr(args, "preset", None):
        val = PRESETS[args.preset].get(name)
        if val is None and name == "f":
            val = PRESETS[args.preset].get("f1")
        if val is None and name == "g":
            val = PRESETS[args.preset].get("g1")
    if val is None:
        raise SystemExit(f"error: --{name} is required (or use --preset)")
    return parse_growth_expr(val)


# ---------------------------------------------------------------- commands


def cmd_growth(args) -> int:
    G = resolve(args.backend)
    s = ball_series(G, args.n, _cap(args), args.workers)
    if args.format == "csv":
        _out(args, s.to_csv())
    else:
        certs = [{"kind": "enumeration", "complete": s.complete, "truncated": s.truncated,
                  "provenance": "exact"}]
        _out(args, s.to_json(certs))
    return 3 if s.truncated else 0


def cmd_diameter(args) -> int:
    G = resolve(args.backend)
    try:
        d = diameter(G, _cap(args))
    except CapExceeded as e:
        _out(args, _dump({"group_label": G.label, "outcome": "cap", "cap": e.cap}))
        return 3
    _out(args, _dump({"group_label": G.label, "diameter": d, "provenance": "exact"}))
    return 0


def cmd_coincide(args) -> int:
    rep = coincidence_report(resolve(args.b1), resolve(args.b2), args.n, _cap(args), args.workers)
    _out(args, _dump({"n": rep.n, "coincide": rep.coincide, "product_ball": rep.product_ball,
                      "balls": list(rep.balls), "first_difference": rep.first_difference,
                      "provenance": "exact"}))
    return 0


def cmd_psl2(args) -> int:
    rep = check_identities(args.N)
    rep["marking_ok"] = verify_marking(psl2_group(args.N)).ok
    _out(args, _dump(rep))
    return 0 if rep["ok"] else 1


def cmd_eta(args) -> int:
    omega = OmegaWord.parse(args.omega)
    w = eta_word(omega, args.k)
    rep = {"omega": omega.spec(), "k": args.k, "length": len(w), "bound": 80 * 2**args.k,
           "word": w.letters, "r_letter": omega.letter(args.k + 1)}
    if args.check:
        G = grig_group(omega, args.k)
        rep["trivial_in_quotient"] = evaluate(w, G) == G.identity
    _out(args, _dump(rep))
    return 0


def cmd_verify(args) -> int:
    omega = OmegaWord.parse(args.omega)
    cap = _cap(args)
    if args.what == "sigma":
        H = resolve(args.H)
        rng = random.Random(args.seed)
        results = {}
        for x in (0, 1, 2):
            F = decorated_group(OmegaWord((), (x,)), 1, H)
            bad = None
            for t in range(args.samples):
                w = "".join(rng.choice("abcd") for _ in range(rng.randint(0, args.max_len)))
                e = evaluate(substitute(w, "sigma", x), F)
                want = (tuple(range(2)), (evaluate(substitute(w, "tau", x), H), evaluate(w, H)))
                if (tuple(e.perm), tuple(e.leaves)) != want:
                    bad = w
                    break
            results[str(x)] = {"ok": bad is None, "counterexample": bad}
        ok = all(r["ok"] for r in results.values())
        _out(args, _dump({"check": "sigma", "H": H.label, "samples": args.samples, "ok": ok, "by_twist": results}))
        return 0 if ok else 1
    if args.what == "contraction":
        H = resolve(args.H)
        m = args.m
        depth = args.depth if args.depth is not None else m + 2
        rep = coincidence_report(decorated_group(omega, m, H), grig_group(omega, depth), theta(m), cap, args.workers)
        _out(args, _dump({"check": "contraction", "omega": omega.spec(), "H": H.label, "m": m,
                          "quotient_depth": depth, "radius": theta(m), "coincide": rep.coincide,
                          "product_ball": rep.product_ball, "balls": list(rep.balls), "pass": rep.coincide}))
        return 0 if rep.coincide else 1
    if args.what == "kernel":
        H = resolve(args.H)
        out = kernel_order(omega, args.k, H, cap)
        _out(args, _dump({"check": "kernel", "omega": omega.spec(), "k": args.k, "H": H.label,
                          "order": out.order, "group_order": out.group_order, "expected": out.expected,
                          "pass": out.matches}))
        return 0 if out.matches or out.order == "cap" else 1
    if args.what == "product-bounds":
        factors = [resolve(b) for b in args.factors]
        limit = resolve(args.limit) if args.limit else factors[-1]
        if args.orders:
            orders = args.orders
        else:
            # kernel of the product onto the limit, for finite groups
            P = diagonal_product(factors) if len(factors) > 1 else factors[0]
            orders = [group_size(P, cap) // group_size(limit, cap)]
        rows = []
        for n in range(args.n + 1):
            r = gamma_truncation_bound(factors, orders, limit, n, cap)
            rows.append({"n": n, "product": r.product_ball, "max_factor": r.max_factor_ball,
                         "limit": r.limit_ball, "kernel_product": r.kernel_product,
                         "lower_ok": r.lower_ok, "upper_ok": r.upper_ok})
        ok = all(r["lower_ok"] and r["upper_ok"] for r in rows)
        _out(args, _dump({"check": "product-bounds", "factors": [F.label for F in factors], "limit": limit.label,
                          "N_orders": orders, "rows": rows, "pass": ok}))
        return 0 if ok else 1
    raise SystemExit(f"unknown verify target {args.what}")


def cmd_calculus(args) -> int:
    if args.what == "admissible":
        f = _fn(args, "f")
        lo = args.lo if args.lo is not None else max(4, f.domain_floor)
        rep = calc.admissibility_report(f, lo, args.hi)
        _out(args, _dump(rep.to_dict()))
        return 0
    if args.what == "fstar":
        f = _fn(args, "f")
        _out(args, _dump({"function": f.src, "z": args.z, "f_star": calc.f_star(f, args.z)}))
        return 0
    if args.what == "condition":
        f1, f2, g1 = _fn(args, "f1"), _fn(args, "f2"), _fn(args, "g1")
        reps = [calc.condition_check(f1, f2, g1, args.mode, C, args.lo or 2, args.hi).to_dict() for C in args.C]
        _out(args, _dump({"functions": {"f1": f1.src, "f2": f2.src, "g1": g1.src}, "reports": reps}))
        return 0
    if args.what == "bounds":
        f, g = _fn(args, "f"), _fn(args, "g")
        f2 = parse_growth_expr(args.f2) if args.f2 else f
        rows = []
        for i in range(args.i_lo, args.i_hi + 1):
            row = {"i": i}
            try:
                u = calc.bound_U_report(f, g, i)
                row.update(u.to_dict())
                row["log_N"] = calc.log_bound_N(f, g, i)
            except (calc.FStarError, ValueError) as e:
                row["U_error"] = str(e)
            try:
                row["log_L"] = calc.log_bound_L(f2, i, args.Kprime)
            except (calc.FStarError, ValueError) as e:
                row["L_error"] = str(e)
            rows.append(row)
        _out(args, _dump({"f": f.src, "g": g.src, "f2": f2.src, "Kprime": args.Kprime, "scope": "log-space",
                          "rows": rows}))
        return 0
    raise SystemExit(f"unknown calculus target {args.what}")


def _oracle_g(expr: str, omega: OmegaWord, oracle_m: int, with_oracle: bool):
    base = parse_growth_expr(expr)
    if not with_oracle:
        return base, None
    orc = gamma_oracle(omega, oracle_m)
    return OracleProduct(base, orc), orc


def cmd_construct(args) -> int:
    omega = OmegaWord.parse(args.omega)
    constants = _constants(args)
    orc = gamma_oracle(omega, args.oracle_m)
    try:
        if args.what == "general":
            f = _fn(args, "f")
            g = _fn(args, "g")
            g = OracleProduct(g, orc) if args.times_oracle else g
            plan = build_general_plan(f, g, omega=omega, stages=args.stages, constants=constants, oracle=orc)
            doc = {"plan": plan.to_dict()}
            if args.verify:
                doc["verification"] = verify_plan(plan, f, g, _cap(args), orc).to_dict()
        else:
            f1, f2, g1, g2 = (_fn(args, k) for k in ("f1", "f2", "g1", "g2"))
            g1 = OracleProduct(g1, orc) if args.times_oracle else g1
            plan = build_main_plan(f1, f2, g1, g2, omega=omega, stages=args.stages, constants=constants,
                                   oracle=orc, m_max=args.m_max)
            doc = {"plan": plan.to_dict()}
    except PlanError as e:
        _out(args, _dump({"error": str(e), "constants": constants.to_dict()}))
        return 2
    _out(args, _dump(doc))
    if args.verify and not doc.get("verification", {}).get("passed", True):
        return 1
    return 0


def cmd_classify(args) -> int:
    omega = OmegaWord.parse(args.omega)
    rep = classify_D(args.N, args.i, args.f1, args.f2, omega, args.n_max, _cap(args))
    _out(args, _dump(rep.to_dict()))
    return 0


def cmd_plotdata(args) -> int:
    with open(args.series) as fh:
        s = GrowthSeries.from_dict(json.load(fh))
    pts = exponent_series(s)
    if args.format == "csv":
        lines = ["n,exponent"] + [f"{n},{v!r}" for n, v in pts]
        _out(args, "\n".join(lines))
    else:
        _out(args, _dump({"group_label": s.group_label, "points": [[n, v] for n, v in pts]}))
    return 0


# ---------------------------------------------------------------- parser


def _common(p, cap=True, workers=False):
    p.add_argument("--out", help="write output here instead of stdout")
    if cap:
        p.add_argument("--cap", type=int, default=None, help="element cap (default GROWTHFORGE_CAP or 5e7)")
    if workers:
        p.add_argument("--workers", type=int, default=1)


def _consts(p):
    p.add_argument("--K", type=float, default=20000.0)
    p.add_argument("--Kprime", type=float, default=20000.0)


def _fns(p, names):
    for name in names:
        p.add_argument(f"--{name}", default=None, help="growth expression, e.g. exp(n^0.5)")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="growthforge", description="Exact growth experiments for Grigorchuk-type products.")
    ap.add_argument("--config", help="flat key=value file; keys mirror long flags")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("growth", help="ball series of a backend")
    p.add_argument("backend")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _common(p, workers=True)
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("diameter")
    p.add_argument("backend")
    _common(p)
    p.set_defaults(func=cmd_diameter)

    p = sub.add_parser("coincide")
    p.add_argument("b1")
    p.add_argument("b2")
    p.add_argument("--n", type=int, required=True)
    _common(p, workers=True)
    p.set_defaults(func=cmd_coincide)

    p = sub.add_parser("psl2")
    p.add_argument("action", choices=["check"])
    p.add_argument("--N", type=int, required=True)
    _common(p, cap=False)
    p.set_defaults(func=cmd_psl2)

    p = sub.add_parser("eta")
    p.add_argument("--omega", default="012")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--check", action="store_true", help="also evaluate in G_{w,k}")
    _common(p, cap=False)
    p.set_defaults(func=cmd_eta)

    p = sub.add_parser("verify")
    p.add_argument("what", choices=["sigma", "contraction", "kernel", "product-bounds"])
    p.add_argument("--omega", default="012")
    p.add_argument("--H", default="psl2:5")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--depth", type=int, default=None, help="quotient depth for contraction (default m+2)")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--factors", nargs="+", default=["grig:012:depth=2", "psl2:5"])
    p.add_argument("--limit", default=None)
    p.add_argument("--orders", type=int, nargs="*", default=None)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--max-len", dest="max_len", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    _common(p, workers=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("calculus")
    p.add_argument("what", choices=["admissible", "fstar", "condition", "bounds"])
    _fns(p, ["f", "g", "f1", "f2", "g1"])
    p.add_argument("--z", type=float, default=4.0)
    p.add_argument("--lo", type=float, default=None)
    p.add_argument("--hi", type=float, default=1e6)
    p.add_argument("--mode", choices=["vi", "vi_prime"], default="vi")
    p.add_argument("--C", type=float, nargs="+", default=[1.0, 10.0])
    p.add_argument("--i-lo", dest="i_lo", type=int, default=2)
    p.add_argument("--i-hi", dest="i_hi", type=int, default=10)
    _consts(p)
    _common(p, cap=False)
    p.set_defaults(func=cmd_calculus)

    p = sub.add_parser("construct")
    p.add_argument("what", choices=["general", "main"])
    _fns(p, ["f", "g", "f1", "f2", "g1", "g2"])
    p.add_argument("--omega", default="012")
    p.add_argument("--stages", type=int, default=2)
    p.add_argument("--times-oracle", dest="times_oracle", action="store_true",
                   help="multiply g (or g1) by the certified growth of G_w")
    p.add_argument("--oracle-m", dest="oracle_m", type=int, default=4, help="oracle exact to radius 2^m - 1")
    p.add_argument("--m-max", dest="m_max", type=int, default=24)
    p.add_argument("--verify", action="store_true")
    _consts(p)
    _common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("classify")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--i", type=int, default=1)
    p.add_argument("--f1", required=True)
    p.add_argument("--f2", required=True)
    p.add_argument("--omega", default="012")
    p.add_argument("--n-max", dest="n_max", type=int, default=8)
    _common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("plotdata")
    p.add_argument("series", help="JSON written by `growth --format json`")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _common(p, cap=False)
    p.set_defaults(func=cmd_plotdata)
    return ap


def _read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SystemExit(f"error: bad config line {raw.rstrip()!r}")
            k, v = line.split("=", 1)
            out[k.strip().replace("-", "_")] = v.strip()
    return out


def _convert(action, raw: str):
    if action.nargs in ("+", "*"):
        return [action.type(x) if action.type else x for x in raw.split()]
    if action.const is True and action.nargs == 0:
        return raw.lower() in ("1", "true", "yes")
    return action.type(raw) if action.type else raw


def _apply_config(ap: argparse.ArgumentParser, path: str) -> None:
    """Config values become option defaults, so command-line flags still win."""
    conf = _read_config(path)
    sub = next(a for a in ap._actions if isinstance(a, argparse._SubParsersAction))
    for p in sub.choices.values():
        for action in p._actions:
            if action.dest in conf and action.option_strings:
                action.default = _convert(action, conf[action.dest])
                action.required = False


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    conf_path = _config_path(argv)
    if conf_path:
        _apply_config(ap, conf_path)
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, calc.GrowthExprError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def _config_path(argv: Sequence[str]) -> Optional[str]:
    for k, tok in enumerate(argv):
        if tok == "--config" and k + 1 < len(argv):
            return argv[k + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
