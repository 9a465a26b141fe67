"""Grigorchuk quotients G_{w,k} and decorated groups F^k_w(H).

Elements of F^k_w(H) are flattened into the permutational wreath product
``H wr Sym(leaves)``: a permutation of the 2^k leaves plus one H element per
leaf. Leaves are numbered left-to-right depth-first (leaf 0 is the all-left
path). The product is

    (p, h) * (p', h') = (p o p', [h[p'[l]] * h'[l] for l])

with ``(p o p')[l] = p[p'[l]]``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

from .marked import CapExceeded, MarkedGroup, ball_elements, trivial_group

# Row x of the generator table: whether the left child of B, C, D carries 'a'.
# x=0: B=(a,b) C=(a,c) D=(1,d); x=1: B=(a,b) C=(1,c) D=(a,d); x=2: B=(1,b) C=(a,c) D=(a,d)
GEN_TABLE = {
    0: {"b": True, "c": True, "d": False},
    1: {"b": True, "c": False, "d": True},
    2: {"b": False, "c": True, "d": True},
}


@dataclass(frozen=True)
class OmegaWord:
    """An eventually periodic word over {0,1,2}: ``prefix`` then ``period`` repeated."""

    prefix: tuple[int, ...] = ()
    period: tuple[int, ...] = (0, 1, 2)

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be nonempty")
        for x in self.prefix + self.period:
            if x not in (0, 1, 2):
                raise ValueError(f"omega letters must be 0, 1 or 2, got {x!r}")

    @classmethod
    def parse(cls, spec: str) -> "OmegaWord":
        """``"012"`` is (012)^inf; ``"01|1"`` is prefix 01 followed by 1^inf."""
        spec = spec.strip()
        if "|" in spec:
            pre, per = spec.split("|", 1)
        else:
            pre, per = "", spec
        if not re.fullmatch(r"[012]*", pre) or not re.fullmatch(r"[012]+", per):
            raise ValueError(f"bad omega spec {spec!r}")
        return cls(tuple(int(c) for c in pre), tuple(int(c) for c in per))

    def letter(self, i: int) -> int:
        """Letter x_i, 1-indexed."""
        if i < 1:
            raise IndexError("omega is indexed from 1")
        j = i - 1
        if j < len(self.prefix):
            return self.prefix[j]
        return self.period[(j - len(self.prefix)) % len(self.period)]

    def prefix_of(self, n: int) -> tuple[int, ...]:
        return tuple(self.letter(i) for i in range(1, n + 1))

    def shift(self, k: int = 1) -> "OmegaWord":
        """The word x_{k+1} x_{k+2} ..."""
        if k <= len(self.prefix):
            return OmegaWord(self.prefix[k:], self.period)
        j = (k - len(self.prefix)) % len(self.period)
        return OmegaWord((), self.period[j:] + self.period[:j])

    @property
    def is_stabilizing(self) -> bool:
        return len(set(self.period)) == 1

    def spec(self) -> str:
        per = "".join(map(str, self.period))
        if self.prefix:
            return "".join(map(str, self.prefix)) + "|" + per
        return per

    def __str__(self) -> str:
        return self.spec()


@dataclass(frozen=True)
class OmegaReport:
    stabilizing: bool
    run_bound: int


def omega_report(omega: OmegaWord, horizon: int = 64) -> OmegaReport:
    """Stabilization flag and the longest run of one letter.

    The run is measured over the prefix followed by enough copies of the
    period to cover ``horizon`` letters and two full periods.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    length = max(horizon, len(omega.prefix) + 2 * len(omega.period))
    letters = omega.prefix_of(length)
    best = run = 1
    for prev, cur in zip(letters, letters[1:]):
        run = run + 1 if cur == prev else 1
        best = max(best, run)
    if omega.is_stabilizing:
        best = max(best, horizon)
    return OmegaReport(omega.is_stabilizing, best)


def certificate_depth(omega: OmegaWord, m: int) -> int:
    """Depth M with G_{w,M} balls equal to G_w balls up to radius 2^m - 1.

    Contraction with bounded runs: if no letter
    repeats more than r times in a row, M = m + r + 2.
    """
    rep = omega_report(omega)
    if rep.stabilizing:
        raise ValueError("stabilizing omega has no finite certificate depth")
    return m + rep.run_bound + 2


def theta(m: int) -> int:
    """Coincidence radius 2^m - 1."""
    return (1 << m) - 1


class TreeAuto(NamedTuple):
    """Automorphism of the depth-k binary tree, stored as a leaf permutation."""

    depth: int
    perm: tuple[int, ...]

    @classmethod
    def identity(cls, depth: int) -> "TreeAuto":
        return cls(depth, tuple(range(1 << depth)))

    def __mul__(self, other: "TreeAuto") -> "TreeAuto":
        if self.depth != other.depth:
            raise ValueError("depth mismatch")
        p = self.perm
        return TreeAuto(self.depth, tuple(p[i] for i in other.perm))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.perm))

    def bits(self) -> tuple[int, ...]:
        """Swap bits, root first then left subtree then right subtree."""
        return _perm_to_bits(self.perm, self.depth)

    @classmethod
    def from_bits(cls, depth: int, bits: Sequence[int]) -> "TreeAuto":
        perm, rest = _bits_to_perm(tuple(bits), depth)
        if rest:
            raise ValueError("too many bits for depth")
        return cls(depth, perm)


def _perm_to_bits(perm: tuple[int, ...], depth: int) -> tuple[int, ...]:
    if depth == 0:
        return ()
    half = len(perm) >> 1
    swap = 1 if perm[0] >= half else 0
    left = tuple(v % half for v in perm[:half])
    right = tuple(v % half for v in perm[half:])
    return (swap,) + _perm_to_bits(left, depth - 1) + _perm_to_bits(right, depth - 1)


def _bits_to_perm(bits: tuple[int, ...], depth: int):
    if depth == 0:
        return (0,), bits
    swap, rest = bits[0], bits[1:]
    left, rest = _bits_to_perm(rest, depth - 1)
    right, rest = _bits_to_perm(rest, depth - 1)
    half = 1 << (depth - 1)
    lo = 0 if not swap else half
    hi = half - lo
    return tuple(lo + v for v in left) + tuple(hi + v for v in right), rest


class DecoratedElement(NamedTuple):
    perm: tuple[int, ...]
    leaves: tuple

    @property
    def depth(self) -> int:
        return len(self.perm).bit_length() - 1

    @property
    def tree(self) -> TreeAuto:
        return TreeAuto(self.depth, self.perm)

    @property
    def leaf_data(self) -> tuple:
        return self.leaves


def decorated_mul(x: DecoratedElement, y: DecoratedElement, hmul) -> DecoratedElement:
    if len(x.perm) != len(y.perm):
        raise ValueError("depth mismatch in decorated product")
    p, h = x
    q, g = y
    return DecoratedElement(
        tuple([p[i] for i in q]),
        tuple([hmul(h[q[l]], g[l]) for l in range(len(q))]),
    )


def decorated_inv(x: DecoratedElement, hinv) -> DecoratedElement:
    p, h = x
    q = [0] * len(p)
    for i, v in enumerate(p):
        q[v] = i
    return DecoratedElement(tuple(q), tuple([hinv(h[q[l]]) for l in range(len(q))]))


def forget_decoration(e: DecoratedElement) -> TreeAuto:
    return e.tree


def _gen_images(omega: OmegaWord, k: int, H: MarkedGroup) -> tuple[DecoratedElement, ...]:
    """Flattened images of a, b, c, d in F^k_w(H)."""
    if k == 0:
        return tuple(DecoratedElement((0,), (g,)) for g in H.gens)
    sub = _gen_images(omega.shift(1), k - 1, H)
    half = 1 << (k - 1)
    ident = tuple(range(half))
    e = H.identity
    one = (ident, (e,) * half)
    row = GEN_TABLE[omega.letter(1)]
    a_sub = sub[0]
    out = [
        DecoratedElement(tuple(range(half, 2 * half)) + tuple(range(half)), (e,) * (2 * half))
    ]
    for j, z in enumerate("bcd", start=1):
        left = a_sub if row[z] else one
        right = sub[j]
        perm = tuple(left[0]) + tuple(half + v for v in right[0])
        out.append(DecoratedElement(perm, tuple(left[1]) + tuple(right[1])))
    return tuple(out)


def generator_image(z: str, omega: OmegaWord, k: int, H: MarkedGroup) -> DecoratedElement:
    if k < 0:
        raise ValueError("k must be >= 0")
    return _gen_images(omega, k, H)["abcd".index(z)]


def decorated_group(omega: OmegaWord, k: int, H: Optional[MarkedGroup] = None,
                    label: Optional[str] = None) -> MarkedGroup:
    """F^k_w(H) as a marked group; H defaults to the trivial group (giving G_{w,k})."""
    if H is None:
        H = trivial_group()
    hmul, hinv, henc = H.mul, H.inv, H.encode
    n = 1 << k
    gens = _gen_images(omega, k, H)
    bits_width = ((n - 1) + 7) >> 3

    def mul(x, y):
        p, h = x
        q, g = y
        return DecoratedElement(tuple([p[i] for i in q]), tuple([hmul(h[q[l]], g[l]) for l in range(n)]))

    def inv(x):
        return decorated_inv(x, hinv)

    def encode(x):
        bits = _perm_to_bits(x.perm, k)
        head = int("".join(map(str, bits)) or "0", 2).to_bytes(max(bits_width, 1), "big")
        return head + b"".join(henc(v) for v in x.leaves)

    if label is None:
        if H.label == "trivial":
            label = f"grig:{omega.spec()}:depth={k}"
        else:
            label = f"F:{omega.spec()}:k={k}:H={H.label}"
    return MarkedGroup(
        label=label,
        gens=gens,
        identity=DecoratedElement(tuple(range(n)), (H.identity,) * n),
        mul=mul,
        inv=inv,
        encode=encode,
        meta={"omega": omega, "k": k, "H": H},
    )


def grig_group(omega: OmegaWord, k: int) -> MarkedGroup:
    """G_{w,k} = F^k_w(1), with elements reduced to bare leaf permutations.

    For k <= 8 an element is a 256-byte translation table whose first 2^k
    entries are the leaf permutation, so a product is one ``bytes.translate``.
    Deeper quotients use tuples.
    """
    full = decorated_group(omega, k)
    n = 1 << k
    width = max(1, (n - 1 + 7) >> 3)

    if k <= 8:
        tail = bytes(range(n, 256))

        def pack(perm):
            return bytes(perm) + tail

        def mul(p, q):
            return q.translate(p)

        def inv(p):
            q = bytearray(256)
            for i, v in enumerate(p):
                q[v] = i
            return bytes(q)

        def unpack(p):
            return tuple(p[:n])
    else:
        def pack(perm):
            return tuple(perm)

        def mul(p, q):
            return tuple([p[i] for i in q])

        def inv(p):
            q = [0] * n
            for i, v in enumerate(p):
                q[v] = i
            return tuple(q)

        unpack = pack

    def encode(p):
        bits = _perm_to_bits(unpack(p), k)
        return int("".join(map(str, bits)) or "0", 2).to_bytes(width, "big")

    return MarkedGroup(
        label=f"grig:{omega.spec()}:depth={k}",
        gens=tuple(pack(g.perm) for g in full.gens),
        identity=pack(range(n)),
        mul=mul,
        inv=inv,
        encode=encode,
        meta={"omega": omega, "k": k, "to_tree": lambda p: TreeAuto(k, unpack(p))},
    )


def tree_of(G: MarkedGroup, element) -> TreeAuto:
    """The TreeAuto behind an element of a ``grig_group``."""
    return G.meta["to_tree"](element)


@dataclass(frozen=True)
class KernelOutcome:
    order: Union[int, str]  # kernel order or "cap"
    group_order: Optional[int] = None
    expected: Optional[int] = None

    @property
    def matches(self) -> bool:
        return self.order == self.expected


def kernel_order(omega: OmegaWord, k: int, H: MarkedGroup, cap: int) -> KernelOutcome:
    """Size of the kernel of F^k_w(H) -> G_{w,k}, by full closure."""
    G = decorated_group(omega, k, H)
    h_order = H.order
    expected = h_order ** (1 << k) if h_order is not None else None
    try:
        elems = [x for s in ball_elements(G, cap, cap) for x in s]
    except CapExceeded:
        return KernelOutcome("cap", None, expected)
    ident = tuple(range(1 << k))
    ker = sum(1 for x in elems if x.perm == ident)
    return KernelOutcome(ker, len(elems), expected)


def leaf_orbit(omega: OmegaWord, k: int) -> set[int]:
    """Orbit of leaf 0 under the generators of G_{w,k}."""
    gens = [g.perm for g in _gen_images(omega, k, trivial_group())]
    orbit = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for g in gens:
            w = g[v]
            if w not in orbit:
                orbit.add(w)
                stack.append(w)
    return orbit
