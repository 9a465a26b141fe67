"""Marked groups: four involutions a, b, c, d with bcd = 1, and their diagonal products."""
from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Optional, Sequence

from .words import ALPHABET, _letters

Element = Hashable

RELATIONS = ("aa", "bb", "cc", "dd", "bcd")


class CapExceeded(RuntimeError):
    """An enumeration hit its element cap before finishing."""

    def __init__(self, cap: int, partial: Any = None):
        super().__init__(f"element cap {cap} exceeded")
        self.cap = cap
        self.partial = partial


@dataclass(frozen=True, eq=False)
class MarkedGroup:
    """A group given by images of the four generators.

    Elements must be hashable and canonical: two elements are equal in the
    group iff they compare equal in Python. ``encode`` maps them to bytes
    with the same property.
    """

    label: str
    gens: tuple  # images of a, b, c, d in that order
    identity: Element
    mul: Callable[[Element, Element], Element]
    inv: Callable[[Element], Element]
    encode: Optional[Callable[[Element], bytes]] = None
    order: Optional[int] = None  # known group order, if any
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.gens) != 4:
            raise ValueError("a marked group needs exactly four generator images")
        if self.encode is None:
            object.__setattr__(self, "encode", lambda x: repr(x).encode())

    def gen(self, z: str) -> Element:
        return self.gens[ALPHABET.index(z)]

    @property
    def gen_image(self) -> dict[str, Element]:
        return dict(zip(ALPHABET, self.gens))

    def __repr__(self) -> str:
        return f"MarkedGroup({self.label!r})"


@dataclass(frozen=True)
class MarkingReport:
    ok: bool
    failed_relation: Optional[str] = None


def verify_marking(H: MarkedGroup) -> MarkingReport:
    for rel in RELATIONS:
        if evaluate(rel, H) != H.identity:
            return MarkingReport(False, rel)
    return MarkingReport(True)


def evaluate(w, H: MarkedGroup) -> Element:
    """Left-to-right product of generator images."""
    g = dict(zip(ALPHABET, H.gens))
    x = H.identity
    mul = H.mul
    for ch in _letters(w):
        x = mul(x, g[ch])
    return x


def trivial_group() -> MarkedGroup:
    return MarkedGroup(
        label="trivial",
        gens=(0, 0, 0, 0),
        identity=0,
        mul=lambda x, y: 0,
        inv=lambda x: 0,
        encode=lambda x: b"",
        order=1,
    )


def _length_prefixed(chunks: Sequence[bytes]) -> bytes:
    return b"".join(struct.pack(">I", len(c)) + c for c in chunks)


def diagonal_product(factors: Sequence[MarkedGroup], label: Optional[str] = None) -> MarkedGroup:
    """Subgroup of the direct product generated by the diagonal generator tuples."""
    factors = tuple(factors)
    if not factors:
        raise ValueError("diagonal product of an empty family is undefined")
    muls = [F.mul for F in factors]
    invs = [F.inv for F in factors]
    encs = [F.encode for F in factors]
    n = len(factors)

    def mul(x, y):
        return tuple(muls[i](x[i], y[i]) for i in range(n))

    def inv(x):
        return tuple(invs[i](x[i]) for i in range(n))

    def encode(x):
        return _length_prefixed([encs[i](x[i]) for i in range(n)])

    gens = tuple(tuple(F.gens[j] for F in factors) for j in range(4))
    return MarkedGroup(
        label=label or "prod(" + ",".join(F.label for F in factors) + ")",
        gens=gens,
        identity=tuple(F.identity for F in factors),
        mul=mul,
        inv=inv,
        encode=encode,
        meta={"factors": factors},
    )


def ball_elements(G: MarkedGroup, n: int, cap: int) -> list[list[Element]]:
    """Spheres of radius 0..n as lists, in deterministic BFS order."""
    seen = {G.identity}
    spheres = [[G.identity]]
    frontier = [G.identity]
    mul = G.mul
    gens = G.gens
    for _ in range(n):
        nxt = []
        for x in frontier:
            for s in gens:
                y = mul(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise CapExceeded(cap, spheres)
        if not nxt:
            break
        spheres.append(nxt)
        frontier = nxt
    return spheres


@dataclass(frozen=True)
class FiberReport:
    n: int
    product_ball: int
    factor_balls: tuple[int, int]
    fibers: tuple[dict, dict]  # fiber size -> multiplicity, per projection
    surjective: tuple[bool, bool]
    outcome: str = "ok"  # or "cap"


def product_projection_fibers(G1: MarkedGroup, G2: MarkedGroup, n: int, cap: int) -> FiberReport:
    """Fiber sizes of both projections restricted to the radius-n product ball."""
    P = diagonal_product([G1, G2])
    try:
        ball = [x for sphere in ball_elements(P, n, cap) for x in sphere]
        b1 = {x for s in ball_elements(G1, n, cap) for x in s}
        b2 = {x for s in ball_elements(G2, n, cap) for x in s}
    except CapExceeded:
        return FiberReport(n, -1, (-1, -1), ({}, {}), (False, False), outcome="cap")
    c1 = Counter(x[0] for x in ball)
    c2 = Counter(x[1] for x in ball)
    return FiberReport(
        n=n,
        product_ball=len(ball),
        factor_balls=(len(b1), len(b2)),
        fibers=(dict(sorted(Counter(c1.values()).items())), dict(sorted(Counter(c2.values()).items()))),
        surjective=(set(c1) == b1, set(c2) == b2),
    )


def relabel(H: MarkedGroup, images: Sequence[str], label: Optional[str] = None) -> MarkedGroup:
    """Remark H with generator z sent to ``evaluate(images[z], H)``."""
    gens = tuple(evaluate(w, H) for w in images)
    return MarkedGroup(
        label=label or f"{H.label}[{','.join(images)}]",
        gens=gens,
        identity=H.identity,
        mul=H.mul,
        inv=H.inv,
        encode=H.encode,
        order=None,
        meta=dict(H.meta),
    )


def tabulate(H: MarkedGroup, cap: int = 200_000) -> MarkedGroup:
    """Re-encode a finite marked group as integers 0..|H|-1 with lookup tables.

    Element 0 is the identity; indices follow BFS order. Multiplication uses
    a full table for small groups and falls back to the original operation
    otherwise.
    """
    spheres = ball_elements(H, cap, cap)
    elems = [x for s in spheres for x in s]
    index = {x: i for i, x in enumerate(elems)}
    size = len(elems)
    inv_table = [index[H.inv(x)] for x in elems]
    if size <= 1200:
        table = [[index[H.mul(x, y)] for y in elems] for x in elems]

        def mul(i, j):
            return table[i][j]
    else:
        hmul = H.mul

        def mul(i, j):
            return index[hmul(elems[i], elems[j])]

    width = max(1, (size - 1).bit_length() + 7 >> 3)
    return MarkedGroup(
        label=H.label,
        gens=tuple(index[g] for g in H.gens),
        identity=0,
        mul=mul,
        inv=inv_table.__getitem__,
        encode=lambda i: i.to_bytes(width, "big"),
        order=size,
        meta={"elements": elems, "index": index, "source": H},
    )
