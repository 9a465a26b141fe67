"""Stage-by-stage construction of oscillating products and their desk-scale checks.

A plan is a list of stages (m_j, N_j, twist). The group it describes is the
diagonal product of F^{m_j}_w(PSL_2(Z/N_j)) (twisted by phi^{twist}) over all
stages together with G_w. Stages with N_j = 1 contribute G_{w,m_j}.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from itertools import count, islice
from typing import Iterable, Optional, Union

import sympy

from .calculus import (
    BoundConstants,
    FStarError,
    GrowthFn,
    as_growth_fn,
    check_grid,
    compare,
    f_star,
    log_bound_L,
    log_bound_U,
)
from .grig import OmegaWord, certificate_depth, decorated_group, grig_group, theta
from .growth import GrowthSeries, OracleSeries, ball_series, ball_spheres, default_cap, gamma_oracle
from .marked import CapExceeded, MarkedGroup, diagonal_product
from .psl2 import group_order, is_valid_modulus, psl2_group


class PlanError(RuntimeError):
    """A construction step could not be completed."""


# ---------------------------------------------------------------- g with the oracle factor


@dataclass(frozen=True)
class OracleProduct:
    """g(n) = base(n) * gamma_{G_w}(n), with the oracle's envelope past its certificate."""

    base: GrowthFn
    oracle: OracleSeries

    @property
    def src(self) -> str:
        return f"({self.base.src})*gamma[{self.oracle.omega.spec()}]"

    def log(self, n: float) -> float:
        return self.base.log(n) + oracle_log(self.oracle, int(n))

    def __call__(self, n: float) -> float:
        try:
            return math.exp(self.log(n))
        except OverflowError:
            return math.inf


def oracle_log(oracle: OracleSeries, n: int) -> float:
    """log gamma_{G_w}(n): exact within the certificate, submultiplicative bound beyond."""
    if n <= oracle.certified:
        return math.log(oracle.exact[n])
    if n <= 4096:
        return math.log(oracle.value(n))
    logs = [math.log(v) for v in oracle.exact]
    top = len(logs) - 1
    return min((n // a) * logs[a] + logs[n % a] for a in range(1, top + 1))


def _log(fn, n) -> float:
    return fn.log(n) if hasattr(fn, "log") else math.log(fn(n))


def _src(fn) -> str:
    return getattr(fn, "src", repr(fn))


# ---------------------------------------------------------------- plans


@dataclass
class Stage:
    m: int
    modulus: int
    twist: int
    n: Optional[int] = None  # radius of the upper display
    n_prime: Optional[int] = None  # radius of the lower display
    provenance: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return group_order(self.modulus)

    def kernel_log(self) -> float:
        """log |H|^(2^m)."""
        return (1 << self.m) * math.log(self.order)

    def kernel_size(self) -> int:
        return self.order ** (1 << self.m)


@dataclass
class ConstructionPlan:
    omega: OmegaWord
    stages: list
    constants: BoundConstants
    kind: str = "general"
    reports: dict = field(default_factory=dict)

    def __post_init__(self):
        ms = [s.m for s in self.stages]
        if any(b <= a for a, b in zip(ms, ms[1:])):
            raise PlanError(f"stage depths must strictly increase, got {ms}")
        for s in self.stages:
            if not is_valid_modulus(s.modulus):
                raise PlanError(f"modulus {s.modulus} is not 1 or a product of primes 1 mod 4")

    def stage_group(self, j: int) -> MarkedGroup:
        s = self.stages[j]
        if s.modulus == 1:
            return grig_group(self.omega, s.m)
        return decorated_group(self.omega, s.m, psl2_group(s.modulus, s.twist))

    def kernel_product(self, upto: int) -> int:
        """prod over stages j < upto of |H_j|^(2^{m_j})."""
        return math.prod(self.stages[j].kernel_size() for j in range(upto))

    def kernel_log(self, upto: int) -> float:
        return sum(self.stages[j].kernel_log() for j in range(upto))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "omega": self.omega.spec(),
            "constants": self.constants.to_dict(),
            "stages": [
                {"m": s.m, "modulus": s.modulus, "twist": s.twist, "n": s.n, "n_prime": s.n_prime,
                 "provenance": s.provenance}
                for s in self.stages
            ],
            "reports": self.reports,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ConstructionPlan":
        stages = [Stage(s["m"], s["modulus"], s["twist"], s.get("n"), s.get("n_prime"),
                        s.get("provenance", {})) for s in d["stages"]]
        c = d.get("constants", {})
        return cls(OmegaWord.parse(d["omega"]), stages, BoundConstants(c.get("K", 20000.0), c.get("Kprime", 20000.0)),
                   d.get("kind", "general"), d.get("reports", {}))


def least_modulus_above(log_target: float, start: int = 1) -> int:
    """Least valid modulus N >= start with log group_order(N) > log_target."""
    # group_order(N) < N^3 / 2, so smaller N cannot qualify
    lower = max(start, int(math.exp((log_target + math.log(2)) / 3)) if log_target < 2000 else start)
    if log_target >= 2000:
        raise PlanError(f"modulus with log order > {log_target:.1f} is beyond desk scale")
    N = max(1, lower)
    while True:
        if is_valid_modulus(N) and math.log(group_order(N)) > log_target:
            return N
        N += 1


def _first(seq: Iterable[int], pred, limit: int, what: str) -> int:
    for n in islice(seq, limit):
        if pred(n):
            return n
    raise PlanError(f"no element of the first {limit} terms satisfies {what}")


def build_general_plan(f, g, a_seq: Optional[Iterable[int]] = None, b_seq: Optional[Iterable[int]] = None,
                       omega: Optional[OmegaWord] = None, stages: int = 2,
                       constants: Optional[BoundConstants] = None, oracle: Optional[OracleSeries] = None,
                       search_limit: int = 100_000) -> ConstructionPlan:
    """Sequences m_i, N_i with the upper display at n_i and the lower display at n'_i.

    ``g`` may be any object with ``log(n)``; ``oracle`` is the certified
    growth of G_w used for the ratio g / gamma_{G_w}.
    """
    f = as_growth_fn(f)
    g = as_growth_fn(g) if isinstance(g, str) else g
    omega = omega or OmegaWord.parse("012")
    constants = constants or BoundConstants()
    oracle = oracle or gamma_oracle(omega, 4)
    if stages < 1:
        raise ValueError("need at least one stage")
    plan_stages = [Stage(1, 1, omega.letter(2), provenance={"rule": "first stage is G_{w,1}"})]
    a_list = list(islice(a_seq, search_limit)) if a_seq is not None else None
    b_list = list(islice(b_seq, search_limit)) if b_seq is not None else None
    for i in range(2, stages + 1):
        log_kernel = sum(s.kernel_log() for s in plan_stages)
        bs = b_list if b_list is not None else count(1)
        n_i = _first(bs, lambda n: compare(_log(g, n) - oracle_log(oracle, n), log_kernel) > 0,
                     search_limit, f"g(n)/gamma(n) > {math.exp(min(log_kernel, 700)):.4g} (stage {i})")
        m_prev = plan_stages[-1].m
        m_i = m_prev + 1
        while theta(m_i) <= n_i:
            m_i += 1
        d = constants.d(m_i)
        as_ = a_list if a_list is not None else count(max(1, f.domain_floor))

        def lower_ok(n):
            try:
                return f.log(n) > 0 and compare(f.phi(n), d) >= 0
            except ValueError:
                return False
        n_prime = _first(as_, lower_ok, search_limit, f"n/log f(n) >= d = 2^(m+1) K = {d:g} (stage {i})")
        N_i = least_modulus_above(float(n_prime))
        plan_stages.append(Stage(
            m_i, N_i, omega.letter(m_i + 1), n_i, n_prime,
            provenance={
                "n": "first b with g/gamma_oracle > product of earlier kernels",
                "m": "least m > previous with 2^m - 1 > n",
                "n_prime": f"first a with n/log f(n) >= 2^(m+1) K = {d:g}",
                "modulus": "least valid N with |PSL_2(Z/N)| > exp(n_prime)",
                "oracle": oracle.provenance(n_i),
            },
        ))
    plan = ConstructionPlan(omega, plan_stages, constants, "general")
    plan.reports["functions"] = {"f": _src(f), "g": _src(g)}
    return plan


# ---------------------------------------------------------------- large-gap plan


def primes_1mod4_between(log_lo: float, log_hi: float, limit: int = 10**7) -> Optional[int]:
    """Least prime p = 1 mod 4 with log_lo < log |PSL_2(p)| < log_hi, if any below ``limit``."""
    if log_hi <= log_lo:
        return None
    # |PSL_2(p)| = p(p^2-1)/2 < p^3/2
    start = max(5, int(math.exp((log_lo + math.log(2)) / 3)) - 1) if log_lo < 3 * math.log(limit) else limit
    p = sympy.nextprime(start - 1)
    while p < limit:
        if p % 4 == 1:
            lo = math.log(group_order(p))
            if lo >= log_hi:
                return None
            if lo > log_lo:
                return int(p)
        p = sympy.nextprime(p)
    return None


def choose_first_depth(f1, f2, g1, oracle: OracleSeries, n_hi: int = 4096, m_max: int = 40) -> int:
    """Least m with f1 > f2^3 and f1 > g1 past 2^m - 1, and g1 >= gamma_{G_w} where gamma is exact.

    Past the oracle's certified radius only an upper envelope of gamma is
    known, so g1 >= gamma cannot be certified there and is not required.
    """
    for m in range(1, m_max + 1):
        good = True
        for n in check_grid(theta(m) + 1, max(n_hi, theta(m) + 2)):
            l1, l2, lg = f1.log(n), f2.log(n), _log(g1, n)
            if not (compare(l1, 3 * l2) > 0 and compare(l1, lg) > 0):
                good = False
                break
            if n <= oracle.certified and compare(lg, oracle_log(oracle, n)) < 0:
                good = False
                break
        if good:
            return m
    raise PlanError("no first depth found: f1 > f2^3, f1 > g1 and g1 >= gamma fail on the checked range")


def build_main_plan(f1, f2, g1, g2, omega: Optional[OmegaWord] = None, stages: int = 2,
                    constants: Optional[BoundConstants] = None, oracle: Optional[OracleSeries] = None,
                    m_max: int = 40) -> ConstructionPlan:
    """Plan for the large-gap case: stage i takes a prime p = 1 mod 4 with L_{f2} < |PSL_2(p)| < U_{f1}."""
    from .calculus import admissibility_report, condition_check

    f1, f2 = as_growth_fn(f1), as_growth_fn(f2)
    g1 = as_growth_fn(g1) if isinstance(g1, str) else g1
    g2 = as_growth_fn(g2) if isinstance(g2, str) else g2
    omega = omega or OmegaWord.parse("012")
    constants = constants or BoundConstants()
    oracle = oracle or gamma_oracle(omega, 4)
    reports = {"functions": {"f1": f1.src, "f2": f2.src, "g1": _src(g1), "g2": _src(g2)}}
    for name, fn in (("f1", f1), ("f2", f2)):
        lo = max(4, fn.domain_floor)
        reports[f"admissible_{name}"] = admissibility_report(fn, lo, 10**6).to_dict()
    if isinstance(g1, GrowthFn):
        reports["condition_vi"] = condition_check(f1, f2, g1, "vi", 1.0, 2, 1e12).to_dict()
    m1 = choose_first_depth(f1, f2, g1, oracle)
    plan_stages = [Stage(m1, 1, omega.letter(m1 + 1), provenance={"rule": "first depth with f1 > f2^3, f1 > g1 > gamma"})]
    window_log = []
    for i in range(2, stages + 1):
        log_kernel = sum(s.kernel_log() for s in plan_stages)
        m_prev = plan_stages[-1].m
        chosen = None
        for m in range(m_prev + 1, m_max + 1):
            # some n <= theta(m) with g1/gamma >= L
            n_i = next((n for n in range(1, theta(m) + 1)
                        if compare(_log(g1, n) - oracle_log(oracle, n), log_kernel) >= 0), None)
            if n_i is None:
                continue
            if f1.log(theta(m)) / 3 <= log_kernel:
                continue
            try:
                lu = log_bound_U(f1, g1, m)
                ll_ = log_bound_L(f2, m, constants.Kprime)
            except (FStarError, ValueError) as e:
                window_log.append({"m": m, "error": str(e)})
                continue
            window_log.append({"m": m, "log_U": lu, "log_L": ll_})
            p = primes_1mod4_between(ll_, lu)
            if p is not None:
                chosen = (m, n_i, p, lu, ll_)
                break
        if chosen is None:
            reports["windows"] = window_log
            raise PlanError(f"gap too small for constructive search at stage {i} (depths up to {m_max})")
        m, n_i, p, lu, ll_ = chosen
        n_prime = f_star(f2, constants.d_prime(m))
        plan_stages.append(Stage(
            m, p, omega.letter(m + 1), n_i, int(math.ceil(n_prime)),
            provenance={"log_U": lu, "log_L": ll_, "rule": "least prime 1 mod 4 with L < |PSL_2(p)| < U",
                        "n_prime": "f2*(d'_m), where the lower bound meets f2"},
        ))
    reports["windows"] = window_log
    plan = ConstructionPlan(omega, plan_stages, constants, "main", reports)
    return plan


# ---------------------------------------------------------------- truncated growth


@dataclass(frozen=True)
class TruncatedSeries:
    series: GrowthSeries
    certificate: int
    oracle_depth: int
    stages_used: int

    def to_dict(self) -> dict:
        return self.series.to_dict([{"kind": "truncation", "exact_up_to": self.certificate,
                                     "oracle_depth": self.oracle_depth, "stages_used": self.stages_used}])


def oracle_depth_for(omega: OmegaWord, n: int) -> int:
    m = max(1, n.bit_length())
    while theta(m) < n:
        m += 1
    return certificate_depth(omega, m)


def truncated_gamma(plan: ConstructionPlan, t: int, n_max: int, cap: Optional[int] = None,
                    workers: int = 1) -> TruncatedSeries:
    """Ball series of the first t stages times a certified quotient of G_w."""
    cap = default_cap() if cap is None else cap
    t = min(t, len(plan.stages))
    M = oracle_depth_for(plan.omega, n_max)
    factors = [plan.stage_group(j) for j in range(t)] + [grig_group(plan.omega, M)]
    G = diagonal_product(factors, label=f"plan[{t}]x grig:{plan.omega.spec()}:depth={M}")
    s = ball_series(G, n_max, cap, workers)
    cert = n_max if t >= len(plan.stages) else min(n_max, theta(plan.stages[t].m))
    if s.truncated:
        cert = min(cert, s.n_max)
    return TruncatedSeries(s, cert, M, t)


# ---------------------------------------------------------------- verification


@dataclass
class StageCheck:
    stage: int
    display: str  # "upper" or "lower"
    n: int
    gamma_bound: Optional[int]
    log_target: float
    passed: bool
    provenance: str
    detail: dict = field(default_factory=dict)


@dataclass
class OscillationReport:
    checks: list
    certificates: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "certificates": self.certificates,
                "checks": [asdict(c) for c in self.checks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def verify_plan(plan: ConstructionPlan, f, g, cap: Optional[int] = None,
                oracle: Optional[OracleSeries] = None) -> OscillationReport:
    """Re-check both displays for every stage from scratch.

    upper, at n_i: gamma_Gamma(n_i) <= gamma_{G_w}(n_i) prod_{j<i}|N_j| < g(n_i).
    lower, at n'_i: gamma_Gamma(n'_i) >= gamma_{G_i}(n'_i) > f(n'_i).
    """
    f = as_growth_fn(f)
    g = as_growth_fn(g) if isinstance(g, str) else g
    cap = default_cap() if cap is None else cap
    oracle = oracle or gamma_oracle(plan.omega, 4)
    checks = []
    certs = {"oracle_certified_radius": oracle.certified, "constants": plan.constants.to_dict()}
    for j, st in enumerate(plan.stages):
        if st.n is not None:
            n = st.n
            kernel = plan.kernel_product(j)
            gam = oracle.value(n)
            bound = gam * kernel
            log_g = _log(g, n)
            ok_bound = compare(math.log(bound), log_g) < 0
            detail = {"kernel_product": kernel, "gamma_oracle": gam, "oracle": oracle.provenance(n)}
            # exact ball of the truncated product when it fits
            try:
                tr = truncated_gamma(plan, j, n, cap)
                if not tr.series.truncated and n <= tr.certificate:
                    exact = tr.series.at(n)
                    detail["gamma_truncated_exact"] = exact
                    ok_bound = ok_bound and exact <= bound
            except (CapExceeded, MemoryError) as e:  # limits are data here
                detail["truncated_error"] = str(e)
            checks.append(StageCheck(j + 1, "upper", n, bound, log_g, ok_bound,
                                     "exact-integers" if oracle.is_exact(n) else "envelope", detail))
        if st.n_prime is not None:
            n = st.n_prime
            log_f = f.log(n)
            G = plan.stage_group(j)
            target = math.floor(math.exp(log_f)) + 1 if log_f < 700 else None
            if target is None:
                checks.append(StageCheck(j + 1, "lower", n, None, log_f, False, "beyond-desk-scale"))
                continue
            spheres, complete, truncated = ball_spheres(G, n, cap, stop_at=target)
            size = sum(len(s) for s in spheres)
            ok = compare(math.log(size), log_f) > 0
            prov = "exact" if size < target else "exact-partial-ball"
            detail = {"stopped_early": size >= target and len(spheres) - 1 < n, "group": G.label}
            checks.append(StageCheck(j + 1, "lower", n, size, log_f, ok and not truncated, prov, detail))
    return OscillationReport(checks, certs)


# ---------------------------------------------------------------- D classes


@dataclass
class DClassReport:
    label: str  # D_less, D_greater, D_equal or unknown
    i: int
    modulus: int
    n_max: int
    series: tuple
    witness: Optional[int] = None
    beyond_window: str = ""
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def lambda_group(H: MarkedGroup, i: int, omega: OmegaWord, n_max: int) -> MarkedGroup:
    """F^i_w(H) times a quotient of G_w certified to radius n_max."""
    M = oracle_depth_for(omega, n_max)
    return diagonal_product([decorated_group(omega, i, H), grig_group(omega, M)],
                            label=f"Lambda[{omega.spec()},{i}]({H.label})")


def classify_D(H_modulus: Union[int, MarkedGroup], i: int, f1, f2, omega: Optional[OmegaWord] = None,
               n_max: int = 10, cap: Optional[int] = None, n_far: int = 10**6,
               oracle: Optional[OracleSeries] = None) -> DClassReport:
    """Classify H by the growth of Lambda = F^i_w(H) x G_w on an enumerated window.

    Past the window, gamma_Lambda(n) <= |H|^(2^i) gamma_{G_w}(n) (top regime,
    with the oracle envelope), so "for all n" claims are range-checked up to
    ``n_far`` against that bound.
    """
    f1, f2 = as_growth_fn(f1), as_growth_fn(f2)
    omega = omega or OmegaWord.parse("012")
    cap = default_cap() if cap is None else cap
    H = psl2_group(H_modulus) if isinstance(H_modulus, int) else H_modulus
    modulus = H_modulus if isinstance(H_modulus, int) else -1
    h_order = H.order
    oracle = oracle or gamma_oracle(omega, 4)
    th = theta(i)
    s = ball_series(lambda_group(H, i, omega, n_max), n_max, cap)
    ball = s.ball
    top = len(ball) - 1
    notes = []
    if s.truncated:
        notes.append(f"enumeration stopped at radius {top} (cap {cap})")
    # D_greater: f1(n)^(2/3) <= gamma(n) for some n > theta(i)
    for n in range(th + 1, top + 1):
        if compare(2 / 3 * f1.log(n), math.log(ball[n])) <= 0:
            return DClassReport("D_greater", i, modulus, top, ball, witness=n, notes=notes)

    def log_upper(n):
        lu = oracle_log(oracle, n)
        if h_order is not None:
            lu += (1 << i) * math.log(h_order)
        else:
            return math.inf
        # submultiplicative bound from the enumerated window
        best = min((n // a) * math.log(ball[a]) + math.log(ball[n % a]) for a in range(1, top + 1))
        return min(lu, best)

    far_grid = [n for n in check_grid(top + 1, n_far) if n > th] if n_far > top else []

    def holds_everywhere(pred_window, pred_far):
        if not all(pred_window(n) for n in range(th + 1, top + 1)):
            return False
        return all(pred_far(n) for n in far_grid)

    less = holds_everywhere(lambda n: compare(f2.log(n), math.log(ball[n])) > 0,
                            lambda n: compare(f2.log(n), log_upper(n)) > 0)
    if less and not s.truncated:
        return DClassReport("D_less", i, modulus, top, ball, beyond_window=f"range-checked to {n_far}", notes=notes)
    below_f1 = holds_everywhere(lambda n: compare(2 / 3 * f1.log(n), math.log(ball[n])) > 0,
                                lambda n: compare(2 / 3 * f1.log(n), log_upper(n)) > 0)
    witness = next((n for n in range(1, top + 1) if compare(f2.log(n), math.log(ball[n])) <= 0), None)
    if below_f1 and witness is not None and not s.truncated:
        return DClassReport("D_equal", i, modulus, top, ball, witness=witness,
                            beyond_window=f"range-checked to {n_far}", notes=notes)
    return DClassReport("unknown", i, modulus, top, ball, notes=notes)
