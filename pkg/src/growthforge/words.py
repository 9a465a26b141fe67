"""Words over the involutive alphabet {a, b, c, d}.

Two reductions are used throughout:

* ``GWord`` -- normal form in the free Grigorchuk group
  ``<a,b,c,d | a^2 = b^2 = c^2 = d^2 = bcd = 1>``, i.e. the free product of
  ``Z/2 = <a>`` with the Klein group ``{1, b, c, d}``.
* ``FWord`` -- the free product of four copies of ``Z/2``; only ``xx -> 1``
  cancels.

Both are stored as plain strings, so they serialize as themselves.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

ALPHABET = "abcd"

# Klein group product on {b, c, d}; None is the identity.
_KLEIN = {
    ("b", "b"): None, ("c", "c"): None, ("d", "d"): None,
    ("b", "c"): "d", ("c", "b"): "d",
    ("b", "d"): "c", ("d", "b"): "c",
    ("c", "d"): "b", ("d", "c"): "b",
}

# phi: a -> a, b -> c, c -> d, d -> b
_PHI = {"a": "a", "b": "c", "c": "d", "d": "b"}


def _check(letters: str) -> None:
    bad = set(letters) - set(ALPHABET)
    if bad:
        raise ValueError(f"letters outside {{a,b,c,d}}: {sorted(bad)}")


def _g_reduce(letters: str) -> str:
    stack: list[str] = []
    for x in letters:
        if stack:
            top = stack[-1]
            if x == "a":
                if top == "a":
                    stack.pop()
                    continue
            elif top != "a":
                prod = _KLEIN[(top, x)]
                if prod is None:
                    stack.pop()
                else:
                    stack[-1] = prod
                continue
        stack.append(x)
    return "".join(stack)


def _f_reduce(letters: str) -> str:
    stack: list[str] = []
    for x in letters:
        if stack and stack[-1] == x:
            stack.pop()
        else:
            stack.append(x)
    return "".join(stack)


WordLike = Union[str, "GWord", "FWord", Sequence[str]]


def _letters(w: WordLike) -> str:
    if isinstance(w, (GWord, FWord)):
        return w.letters
    if isinstance(w, str):
        return w
    return "".join(w)


@dataclass(frozen=True)
class GWord:
    """An element of the free Grigorchuk group, kept in normal form.

    Construct through :func:`normal_form` (or ``GWord.of``); the constructor
    trusts its input.
    """

    letters: str = ""

    @classmethod
    def of(cls, raw: WordLike) -> "GWord":
        return normal_form(raw)

    def __str__(self) -> str:
        return self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: WordLike) -> "GWord":
        return normal_form(self.letters + _letters(other))

    def inverse(self) -> "GWord":
        # every generator is an involution
        return GWord(self.letters[::-1])

    def is_identity(self) -> bool:
        return not self.letters


@dataclass(frozen=True)
class FWord:
    """A reduced word in the free product of four involutions."""

    letters: str = ""

    @classmethod
    def of(cls, raw: WordLike) -> "FWord":
        s = _letters(raw)
        _check(s)
        return cls(_f_reduce(s))

    def __str__(self) -> str:
        return self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: WordLike) -> "FWord":
        return FWord.of(self.letters + _letters(other))

    def inverse(self) -> "FWord":
        return FWord(self.letters[::-1])


def normal_form(raw: WordLike) -> GWord:
    s = _letters(raw)
    _check(s)
    return GWord(_g_reduce(s))


def twist(w: WordLike, x: int) -> GWord:
    """Apply ``phi**x`` letterwise (phi cycles b -> c -> d -> b)."""
    s = _letters(w)
    _check(s)
    for _ in range(x % 3):
        s = "".join(_PHI[ch] for ch in s)
    return normal_form(s)


def _twist_letter(ch: str, x: int) -> str:
    for _ in range(x % 3):
        ch = _PHI[ch]
    return ch


_SIGMA = {"a": "aca", "b": "b", "c": "c", "d": "d"}
_TAU = {"a": "c", "b": "a", "c": "a", "d": ""}


def substitution_table(kind: str, x: int) -> dict[str, str]:
    """Letter images of the twisted substitution ``phi^-x . s . phi^x``.

    The inverse twist is what makes ``sigma_x(eta)`` evaluate to
    ``(1; tau_x(eta), eta)`` in ``F_x(H)`` for the generator table
    of ``F_x``; see ``tests/test_grig.py::test_sigma_identity``.
    """
    if kind == "sigma":
        base = _SIGMA
    elif kind == "tau":
        base = _TAU
    else:
        raise ValueError(f"unknown substitution {kind!r}")
    table = {}
    for ch in ALPHABET:
        img = base[_twist_letter(ch, x)]
        table[ch] = "".join(_twist_letter(y, -x) for y in img)
    return table


def substitute(w: WordLike, kind: str, x: int = 0) -> GWord:
    s = _letters(w)
    _check(s)
    table = substitution_table(kind, x)
    return normal_form("".join(table[ch] for ch in s))


def commutator(u: WordLike, v: WordLike) -> str:
    """Raw expansion of ``[u, v] = u v u^-1 v^-1`` with ``w^-1 = reverse(w)``."""
    u, v = _letters(u), _letters(v)
    return u + v + u[::-1] + v[::-1]


def r_word_raw() -> str:
    """Unreduced 78-letter expansion of ``[c, [d, [b, (ad)^4]]]``."""
    return commutator("c", commutator("d", commutator("b", "ad" * 4)))


def r_word(x: int = 0) -> GWord:
    """The relator-like word ``r`` twisted for level letter ``x``.

    ``r_x = phi^{-x}(r)``: with this orientation ``(a phi^{-x}(d))^4`` is
    trivial in ``F_x(H)`` for every ``H``.
    """
    return twist(r_word_raw(), -x)


def r_word_free(x: int = 0) -> FWord:
    """``r_x`` reduced only in the free product of four involutions."""
    return FWord.of("".join(_twist_letter(ch, -x) for ch in r_word_raw()))


def eta_word(omega, k: int) -> GWord:
    """``w_k`` of the recursion ``w_0 = r_{x_{k+1}}``, ``w_{i+1} = sigma_{x_{k-i}}(w_i)``.

    ``omega`` only needs a ``letter(i)`` method (1-indexed).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    w = r_word(omega.letter(k + 1))
    for i in range(k):
        w = substitute(w, "sigma", omega.letter(k - i))
    return w


def eta_chain(omega, k: int) -> list[GWord]:
    """All intermediate words ``w_0 .. w_k`` of :func:`eta_word`."""
    w = r_word(omega.letter(k + 1))
    out = [w]
    for i in range(k):
        w = substitute(w, "sigma", omega.letter(k - i))
        out.append(w)
    return out


def reduced_words(max_len: int) -> Iterable[str]:
    """All F-reduced words of length <= max_len, shortlex order."""
    frontier = [""]
    for length in range(max_len + 1):
        yield from frontier
        if length < max_len:
            frontier = [u + x for u in frontier for x in ALPHABET if not u.endswith(x)]
