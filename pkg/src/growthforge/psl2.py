"""PSL_2(Z/N) with the four-involution marking built from a square root of -1."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Optional, Union

import sympy
from sympy.ntheory import sqrt_mod
from sympy.ntheory.modular import crt

from .marked import CapExceeded, MarkedGroup, ball_elements, evaluate
from .words import r_word

Mat = tuple[int, int, int, int]  # row-major (p, q, r, s)


def canonical(m: Mat, N: int) -> Mat:
    """Reduce mod N and pick the lexicographically smaller of M and -M."""
    p, q, r, s = (v % N for v in m)
    neg = ((-p) % N, (-q) % N, (-r) % N, (-s) % N)
    return min((p, q, r, s), neg)


def _mat_mul(x: Mat, y: Mat, N: int) -> Mat:
    p, q, r, s = x
    P, Q, R, S = y
    return canonical((p * P + q * R, p * Q + q * S, r * P + s * R, r * Q + s * S), N)


def _mat_inv(x: Mat, N: int) -> Mat:
    p, q, r, s = x
    return canonical((s, -q, -r, p), N)


def _check_modulus(N: int) -> dict[int, int]:
    if N < 2 or N % 2 == 0:
        raise ValueError(f"no square root of -1 usable: modulus {N} must be odd and >= 2")
    fac = sympy.factorint(N)
    bad = [p for p in fac if p % 4 != 1]
    if bad:
        raise ValueError(f"no square root of -1 mod {N}: prime factor(s) {bad} are not 1 mod 4")
    return fac


def is_valid_modulus(N: int) -> bool:
    """True for N = 1 (trivial group) or odd N whose primes are all 1 mod 4."""
    if N == 1:
        return True
    try:
        _check_modulus(N)
    except ValueError:
        return False
    return True


def _sqrt_minus_one_prime_power(p: int, e: int) -> int:
    # Tonelli-Shanks root mod p, then Hensel lifting of x^2 + 1
    x = sqrt_mod(p - 1, p)
    mod = p
    for _ in range(1, e):
        mod *= p
        fx = x * x + 1
        x = (x - fx * pow(2 * x, -1, mod)) % mod
    assert (x * x + 1) % mod == 0
    return x


@lru_cache(maxsize=None)
def sqrt_minus_one(N: int) -> int:
    """Smallest i in [0, N) with i^2 = -1 mod N."""
    fac = _check_modulus(N)
    mods, residues = [], []
    for p, e in sorted(fac.items()):
        q = p**e
        x = _sqrt_minus_one_prime_power(p, e)
        mods.append(q)
        residues.append((x, q - x))
    best = None
    for choice in range(1 << len(mods)):
        rs = [residues[j][(choice >> j) & 1] for j in range(len(mods))]
        v = int(crt(mods, rs)[0]) % N
        if best is None or v < best:
            best = v
    return best


def group_order(N: int) -> int:
    """|SL_2(Z/N) / {+-1}| for odd N >= 1."""
    if N == 1:
        return 1
    if N % 2 == 0:
        raise ValueError("group_order is defined here for odd N only")
    order = Fraction(N**3, 2)
    for p in sympy.factorint(N):
        order *= Fraction(p * p - 1, p * p)
    assert order.denominator == 1
    return int(order)


def standard_generator_matrices(N: int) -> tuple[Mat, Mat, Mat, Mat]:
    i = sqrt_minus_one(N)
    if gcd(2, N) != 1:
        raise ValueError("N must be odd")
    quarter = pow(4, -1, N)
    a = canonical((i, i * quarter, 0, -i), N)
    b = canonical((0, i, i, 0), N)
    c = canonical((0, 1, -1, 0), N)
    d = canonical((i, 0, 0, -i), N)
    return a, b, c, d


def psl2_group(N: int, twist: int = 0) -> MarkedGroup:
    """PSL_2(Z/N) marked by the standard generators.

    ``twist`` re-marks the group by ``phi^x``: generator z is sent to the image
    of ``phi^x(z)``.
    """
    gens = standard_generator_matrices(N)
    if twist % 3:
        # phi: b -> c -> d -> b; generator z gets image of phi^x(z)
        a, b, c, d = gens
        cyc = [b, c, d]
        t = twist % 3
        gens = (a, cyc[t % 3], cyc[(1 + t) % 3], cyc[(2 + t) % 3])
    label = f"psl2:{N}" + (f":twist={twist % 3}" if twist % 3 else "")
    width = (N.bit_length() + 7) >> 3

    def encode(m: Mat) -> bytes:
        return b"".join(v.to_bytes(width, "big") for v in m)

    return MarkedGroup(
        label=label,
        gens=gens,
        identity=canonical((1, 0, 0, 1), N),
        mul=lambda x, y: _mat_mul(x, y, N),
        inv=lambda x: _mat_inv(x, N),
        encode=encode,
        order=group_order(N),
        meta={"modulus": N, "twist": twist % 3},
    )


def matrix_image(N: int, w) -> Mat:
    return evaluate(w, psl2_group(N))


# Exact identities among the standard generators.
MATRIX_IDENTITIES = {
    "(ad)^4": ("ad" * 4, (1, -1, 0, 1)),
    "r": (None, (-1, 2, 2, -5)),
    "(da)^4": ("da" * 4, (1, 1, 0, 1)),
    "c(ad)^4c": ("c" + "ad" * 4 + "c", (1, 0, 1, 1)),
}


def check_identities(N: int) -> dict:
    """Evaluate the displayed unipotent and commutator identities mod N."""
    G = psl2_group(N)
    checks = {}
    for name, (word, target) in MATRIX_IDENTITIES.items():
        if word is None:
            word = r_word(0).letters
        got = evaluate(word, G)
        want = canonical(target, N)
        checks[name] = {"ok": got == want, "image": list(got), "expected": list(want)}
    involutions = all(G.mul(g, g) == G.identity for g in G.gens)
    bcd = evaluate("bcd", G) == G.identity
    nontrivial = all(g != G.identity for g in G.gens)
    return {
        "N": N,
        "sqrt_minus_one": sqrt_minus_one(N),
        "generators": {z: list(g) for z, g in zip("abcd", G.gens)},
        "involutions": involutions,
        "bcd": bcd,
        "nontrivial": nontrivial,
        "identities": checks,
        "ok": involutions and bcd and all(c["ok"] for c in checks.values()),
    }


def closure(G: MarkedGroup, cap: int) -> list:
    return [x for s in ball_elements(G, cap, cap) for x in s]


def normal_closure_is_whole(N: int, seed, cap: int = 2_000_000) -> Union[bool, str]:
    """Whether the normal closure of ``seed``'s image is all of PSL_2(Z/N)."""
    G = psl2_group(N)
    target = group_order(N)
    if target > cap:
        return "cap"
    x0 = evaluate(seed, G)
    if x0 == G.identity:
        return target == 1
    # conjugacy orbit of x0 under the generators, then the subgroup it spans
    conj = {x0}
    stack = [x0]
    while stack:
        x = stack.pop()
        for g in G.gens:
            y = G.mul(G.mul(g, x), g)
            if y not in conj:
                conj.add(y)
                stack.append(y)
    conj_list = sorted(conj)
    sub = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for y in conj_list:
                z = G.mul(x, y)
                if z not in sub:
                    sub.add(z)
                    nxt.append(z)
                    if len(sub) > cap:
                        return "cap"
        frontier = nxt
    return len(sub) == target


def order_by_closure(N: int, cap: int = 2_000_000) -> Optional[int]:
    try:
        return len(closure(psl2_group(N), cap))
    except CapExceeded:
        return None


def valid_moduli(start: int = 1):
    """Odd moduli >= start all of whose prime factors are 1 mod 4."""
    N = max(start, 1)
    while True:
        if is_valid_modulus(N):
            yield N
        N += 1
