"""Exact ball growth of marked groups and the finite-radius growth inequalities."""
from __future__ import annotations

import csv
import heapq
from itertools import accumulate
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .grig import OmegaWord, certificate_depth, decorated_group, grig_group, theta
from .marked import CapExceeded, MarkedGroup, diagonal_product, evaluate
from .words import r_word_free, reduced_words, substitute

DEFAULT_CAP = 50_000_000


def default_cap() -> int:
    env = os.environ.get("GROWTHFORGE_CAP")
    if env:
        cap = int(float(env))
        if cap <= 0:
            raise ValueError("GROWTHFORGE_CAP must be positive")
        return cap
    return DEFAULT_CAP


@dataclass(frozen=True)
class GrowthSeries:
    """Cumulative ball sizes gamma(0..n_max).

    ``complete`` means the whole group was exhausted; ``truncated`` means the
    enumeration stopped early on the element cap, so ``ball`` is shorter than
    requested.
    """

    group_label: str
    ball: tuple[int, ...]
    complete: bool = False
    truncated: bool = False
    n_requested: Optional[int] = None
    provenance: str = "exact"

    @property
    def n_max(self) -> int:
        return len(self.ball) - 1

    @property
    def sphere(self) -> tuple[int, ...]:
        b = self.ball
        return (b[0],) + tuple(b[i] - b[i - 1] for i in range(1, len(b)))

    def __getitem__(self, n: int) -> int:
        return self.ball[n]

    def at(self, n: int) -> int:
        """gamma(n), extending a complete series by its final value."""
        if n < len(self.ball):
            return self.ball[n]
        if self.complete:
            return self.ball[-1]
        raise IndexError(f"radius {n} beyond enumerated range {self.n_max}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "ball", "sphere"])
        for n, (b, s) in enumerate(zip(self.ball, self.sphere)):
            w.writerow([n, b, s])
        return buf.getvalue()

    def to_dict(self, certificates: Sequence[dict] = ()) -> dict:
        return {
            "group_label": self.group_label,
            "n_max": self.n_max,
            "complete": self.complete,
            "truncated": self.truncated,
            "provenance": self.provenance,
            "series": [{"n": n, "ball": b, "sphere": s} for n, (b, s) in enumerate(zip(self.ball, self.sphere))],
            "certificates": list(certificates),
        }

    def to_json(self, certificates: Sequence[dict] = ()) -> str:
        return json.dumps(self.to_dict(certificates), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "GrowthSeries":
        ball = tuple(int(row["ball"]) for row in d["series"])
        return cls(d["group_label"], ball, bool(d.get("complete")), bool(d.get("truncated")),
                   provenance=d.get("provenance", "exact"))


def _expand_chunk(chunk, gens, mul):
    return [mul(x, s) for x in chunk for s in gens]


def ball_spheres(G: MarkedGroup, n_max: int, cap: int, workers: int = 1, stop_at: Optional[int] = None):
    """BFS spheres up to radius ``n_max``.

    Returns ``(spheres, complete, truncated)``. With ``workers > 1`` the frontier
    products are computed in a thread pool and merged in frontier order, so the
    result is identical to the serial run. ``stop_at`` ends the search once
    the ball holds at least that many elements.
    """
    seen = {G.identity}
    spheres = [[G.identity]]
    frontier = [G.identity]
    gens, mul = G.gens, G.mul
    complete = truncated = False
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for _ in range(n_max):
            if stop_at is not None and len(seen) >= stop_at:
                break
            if pool is not None and len(frontier) > 256:
                size = -(-len(frontier) // workers)
                chunks = [frontier[i:i + size] for i in range(0, len(frontier), size)]
                candidates = [y for part in pool.map(_expand_chunk, chunks, [gens] * len(chunks),
                                                     [mul] * len(chunks)) for y in part]
            else:
                candidates = [mul(x, s) for x in frontier for s in gens]
            nxt = []
            for y in candidates:
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
            if len(seen) > cap:
                truncated = True
                break
            if not nxt:
                complete = True
                break
            spheres.append(nxt)
            frontier = nxt
        else:
            # radius n_max reached; exhausted only if nothing lies beyond
            if stop_at is None or len(seen) < stop_at:
                complete = not any(mul(x, s) not in seen for x in frontier for s in gens)
    finally:
        if pool is not None:
            pool.shutdown()
    return spheres, complete, truncated


def ball_series(G: MarkedGroup, n_max: int, cap: Optional[int] = None, workers: int = 1) -> GrowthSeries:
    """Exact gamma_G(0..n_max); stops early (``truncated``) past ``cap`` elements."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    cap = default_cap() if cap is None else cap
    spheres, complete, truncated = ball_spheres(G, n_max, cap, workers)
    ball, total = [], 0
    for s in spheres:
        total += len(s)
        ball.append(total)
    if complete:
        ball += [total] * (n_max + 1 - len(ball))
    return GrowthSeries(G.label, tuple(ball), complete, truncated, n_max)


def diameter(G: MarkedGroup, cap: Optional[int] = None) -> int:
    cap = default_cap() if cap is None else cap
    spheres, complete, truncated = ball_spheres(G, cap, cap)
    if truncated or not complete:
        raise CapExceeded(cap)
    return len(spheres) - 1


def generator_action(G: MarkedGroup, cap: int) -> list[list[int]]:
    """Right action of each generator on the BFS-indexed elements of a finite G."""
    spheres, complete, truncated = ball_spheres(G, cap, cap)
    if truncated or not complete:
        raise CapExceeded(cap)
    elems = [x for sp in spheres for x in sp]
    index = {x: i for i, x in enumerate(elems)}
    return [[index[G.mul(x, g)] for x in elems] for g in G.gens]


def group_size(G: MarkedGroup, cap: Optional[int] = None) -> int:
    """Order of a finite marked group by exhaustive search.

    Diagonal products are searched over tuples of factor indices, which only
    needs each factor's generator action.
    """
    cap = default_cap() if cap is None else cap
    factors = G.meta.get("factors")
    if factors:
        actions = [generator_action(F, cap) for F in factors]
        start = (0,) * len(factors)
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for x in frontier:
                for j in range(4):
                    y = tuple(act[j][v] for act, v in zip(actions, x))
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            if len(seen) > cap:
                raise CapExceeded(cap)
            frontier = nxt
        return len(seen)
    spheres, complete, truncated = ball_spheres(G, cap, cap)
    if truncated or not complete:
        raise CapExceeded(cap)
    return sum(len(s) for s in spheres)


def _ball_or_raise(G: MarkedGroup, n: int, cap: int, workers: int = 1) -> GrowthSeries:
    s = ball_series(G, n, cap, workers)
    if s.truncated:
        raise CapExceeded(cap)
    return s


@dataclass(frozen=True)
class CoincidenceReport:
    n: int
    coincide: bool
    product_ball: int
    balls: tuple[int, int]
    first_difference: Optional[int] = None


def coincidence_report(G1: MarkedGroup, G2: MarkedGroup, n: int, cap: Optional[int] = None,
                       workers: int = 1) -> CoincidenceReport:
    """Compare radius-n balls through the diagonal product.

    The balls of G1 and G2 carry the same relations among words of length
    <= n exactly when the diagonal product has no larger ball than either
    factor, radius by radius.
    """
    cap = default_cap() if cap is None else cap
    P = diagonal_product([G1, G2])
    sp = _ball_or_raise(P, n, cap, workers)
    s1 = _ball_or_raise(G1, n, cap, workers)
    s2 = _ball_or_raise(G2, n, cap, workers)
    first = None
    for r in range(n + 1):
        if not (sp.at(r) == s1.at(r) == s2.at(r)):
            first = r
            break
    return CoincidenceReport(n, first is None, sp.at(n), (s1.at(n), s2.at(n)), first)


def balls_coincide(G1: MarkedGroup, G2: MarkedGroup, n: int, cap: Optional[int] = None,
                   workers: int = 1) -> bool:
    return coincidence_report(G1, G2, n, cap, workers).coincide


@dataclass(frozen=True)
class SubstitutionReport:
    H_label: str
    k: int
    n: int
    c_k: int
    gamma_H: int
    gamma_F_lower: int  # gamma of F^k at radius c_k*n, or the count where the search stopped
    holds: bool
    injective: bool
    max_image_length: int
    partial: bool = False


def sigma_composite(w, omega: OmegaWord, k: int):
    """sigma_{x_1}(sigma_{x_2}(... sigma_{x_k}(w))), the word placing w in the last leaf."""
    for i in range(k, 0, -1):
        w = substitute(w, "sigma", omega.letter(i))
    return w


def substituted_ball_lower(H: MarkedGroup, omega: OmegaWord, k: int, n: int,
                           cap: Optional[int] = None) -> SubstitutionReport:
    """Check gamma_H(n) <= gamma_{F^k(H)}(c_k n) with c_k = 2^(k+1) - 1.

    Two certificates: a direct count of the larger ball (stopping once it
    reaches gamma_H(n)), and an explicit injection sending a geodesic word
    for each element of B_H(n) through the iterated sigma substitution.
    """
    cap = default_cap() if cap is None else cap
    c_k = (1 << (k + 1)) - 1
    spheres, _, trunc = ball_spheres(H, n, cap)
    if trunc:
        return SubstitutionReport(H.label, k, n, c_k, -1, -1, False, False, 0, partial=True)
    # geodesic words for every element of B_H(n)
    words = {H.identity: ""}
    frontier = [H.identity]
    for _ in range(n):
        nxt = []
        for x in frontier:
            for z, g in zip("abcd", H.gens):
                y = H.mul(x, g)
                if y not in words:
                    words[y] = words[x] + z
                    nxt.append(y)
        frontier = nxt
    gamma_H = len(words)
    F = decorated_group(omega, k, H)
    fsp, _, ftrunc = ball_spheres(F, c_k * n, cap, stop_at=gamma_H)
    count = sum(len(s) for s in fsp)
    images = set()
    longest = 0
    for w in words.values():
        img = sigma_composite(w, omega, k)
        longest = max(longest, len(img))
        images.add(evaluate(img, F))
    injective = len(images) == gamma_H and longest <= c_k * n
    return SubstitutionReport(H.label, k, n, c_k, gamma_H, count, count >= gamma_H and injective,
                              injective, longest, partial=ftrunc)


def r_length(x: int = 0) -> int:
    """Length of r_x as a reduced word in the free product of four involutions."""
    return len(r_word_free(x))


def normal_ball_lower_series(H: MarkedGroup, x: int, conj_len: int, n_max: int,
                             cap: Optional[int] = None) -> GrowthSeries:
    """Lower bound for the normal growth of r_x in H.

    Dijkstra from the identity where each conjugate w r_x w^-1 (w reduced,
    |w| <= conj_len) is a step of weight 2|w| + |r_x|. Every element at
    weighted distance <= n is a product of conjugates whose free-product word
    has length <= n, so it is counted by the true normal ball.
    """
    cap = default_cap() if cap is None else cap
    raw_r = r_word_free(x).letters
    rlen = len(raw_r)
    r_val = evaluate(raw_r, H)
    steps = {}
    for w in reduced_words(conj_len):
        wv = evaluate(w, H)
        g = H.mul(H.mul(wv, r_val), H.inv(wv))
        weight = 2 * len(w) + rlen
        if g != H.identity and (g not in steps or steps[g] > weight):
            steps[g] = weight
    step_list = sorted(steps.items(), key=lambda t: (t[1], H.encode(t[0])))
    dist = {H.identity: 0}
    heap = [(0, H.encode(H.identity), H.identity)]
    done = set()
    truncated = False
    while heap:
        d, key, x0 = heapq.heappop(heap)
        if key in done or d > n_max:
            continue
        done.add(key)
        for g, wt in step_list:
            y = H.mul(x0, g)
            nd = d + wt
            if nd <= n_max and nd < dist.get(y, n_max + 1):
                dist[y] = nd
                heapq.heappush(heap, (nd, H.encode(y), y))
        if len(dist) > cap:
            truncated = True
            break
    counts = [0] * (n_max + 1)
    for v in dist.values():
        counts[v] += 1
    ball, total = [], 0
    for c in counts:
        total += c
        ball.append(total)
    return GrowthSeries(f"normal({H.label},r_{x},conj<={conj_len})", tuple(ball),
                        False, truncated, n_max, provenance="lower-bound")


@dataclass(frozen=True)
class TruncationReport:
    n: int
    product_ball: int
    max_factor_ball: int
    limit_ball: int
    kernel_product: int
    lower_ok: bool
    upper_ok: bool

    @property
    def holds(self) -> bool:
        return self.lower_ok and self.upper_ok


def gamma_truncation_bound(G_factors: Sequence[MarkedGroup], N_orders: Sequence[int],
                           G_limit: MarkedGroup, n: int, cap: Optional[int] = None) -> TruncationReport:
    """max_i gamma_{G_i}(n) <= gamma_product(n) <= gamma_limit(n) * prod N_orders."""
    cap = default_cap() if cap is None else cap
    prod = diagonal_product(list(G_factors)) if len(G_factors) > 1 else G_factors[0]
    gp = _ball_or_raise(prod, n, cap).at(n)
    gmax = max(_ball_or_raise(G, n, cap).at(n) for G in G_factors)
    gl = _ball_or_raise(G_limit, n, cap).at(n)
    kp = math.prod(N_orders)
    return TruncationReport(n, gp, gmax, gl, kp, gmax <= gp, gp <= gl * kp)


def exponent_series(s: GrowthSeries) -> list[tuple[int, float]]:
    """Points (n, log log gamma(n) / log n) for n >= 2 with gamma(n) >= 3."""
    out = []
    for n, b in enumerate(s.ball):
        if n >= 2 and b >= 3:
            out.append((n, math.log(math.log(b)) / math.log(n)))
    return out


@dataclass(frozen=True)
class ExpansionReport:
    N: int
    order: int
    diameter: int
    best_K: float
    range_checked: int
    partial: bool = False


def empirical_expansion(N: int, cap: Optional[int] = None) -> ExpansionReport:
    """Smallest K with gamma(n) >= exp(n/K) on 1..diameter for PSL_2(Z/N).

    Past the diameter gamma stays at |H|, so the same K covers every
    n < K log|H|. The inequality is strict for any K' > best_K.
    """
    from .psl2 import psl2_group

    G = psl2_group(N)
    cap = default_cap() if cap is None else cap
    spheres, _, truncated = ball_spheres(G, cap, cap)
    if truncated:
        return ExpansionReport(N, -1, -1, math.inf, len(spheres) - 1, partial=True)
    ball = list(accumulate(len(sp) for sp in spheres))
    diam = len(ball) - 1
    best = max((n / math.log(ball[n]) for n in range(1, diam + 1)), default=0.0)
    return ExpansionReport(N, ball[-1], diam, best, diam)


@dataclass(frozen=True)
class OracleSeries:
    """Certified growth of G_omega: exact up to ``certified``, envelope beyond."""

    omega: OmegaWord
    depth: int
    certified: int
    exact: tuple[int, ...]

    def value(self, n: int) -> int:
        if n <= self.certified:
            return self.exact[n]
        return _submult_envelope(self.exact, n)

    def is_exact(self, n: int) -> bool:
        return n <= self.certified

    def provenance(self, n: int) -> str:
        return "exact" if self.is_exact(n) else "envelope"

    def to_dict(self) -> dict:
        return {"omega": self.omega.spec(), "depth": self.depth, "certified_radius": self.certified,
                "series": list(self.exact)}


def _submult_envelope(exact: Sequence[int], n: int) -> int:
    """min over splits n = sum of parts <= len(exact)-1 of the product of exact values."""
    top = len(exact) - 1
    best = [1] + [0] * n
    for t in range(1, n + 1):
        best[t] = min(best[t - a] * exact[a] for a in range(1, min(t, top) + 1))
    return best[n]


def gamma_oracle(omega: OmegaWord, m: int, cap: Optional[int] = None, workers: int = 1) -> OracleSeries:
    """Exact gamma_{G_omega}(n) for n <= 2^m - 1 from the certified quotient depth."""
    M = certificate_depth(omega, m)
    radius = theta(m)
    s = ball_series(grig_group(omega, M), radius, cap, workers)
    if s.truncated:
        raise CapExceeded(cap or default_cap())
    return OracleSeries(omega, M, radius, tuple(s.at(n) for n in range(radius + 1)))


def check_submultiplicative(s: GrowthSeries) -> Optional[tuple[int, int]]:
    """First (m, n) with gamma(m+n) > gamma(m) gamma(n), or None."""
    b = s.ball
    for total in range(len(b)):
        for m in range(1, total // 2 + 1):
            if b[total] > b[m] * b[total - m]:
                return (m, total - m)
    return None
