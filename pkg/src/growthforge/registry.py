"""Backend labels for marked groups.

    trivial
    psl2:<N>[:twist=<x>]
    grig:<omega>:depth=<k>
    F:<omega>:k=<k>:H=<label>
    prod(<label>,<label>,...)

``<omega>`` is ``012`` for (012)^inf or ``<prefix>|<period>``.
"""
from __future__ import annotations

import re

from .grig import OmegaWord, decorated_group, grig_group
from .marked import MarkedGroup, diagonal_product, trivial_group
from .psl2 import psl2_group


def _split_top(s: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts


def resolve(label: str) -> MarkedGroup:
    label = label.strip()
    if label == "trivial":
        return trivial_group()
    m = re.fullmatch(r"psl2:(\d+)(?::twist=([012]))?", label)
    if m:
        return psl2_group(int(m.group(1)), int(m.group(2) or 0))
    m = re.fullmatch(r"grig:([012|]+):depth=(\d+)", label)
    if m:
        return grig_group(OmegaWord.parse(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"F:([012|]+):k=(\d+):H=(.+)", label)
    if m:
        return decorated_group(OmegaWord.parse(m.group(1)), int(m.group(2)), resolve(m.group(3)))
    m = re.fullmatch(r"prod\((.*)\)", label)
    if m:
        return diagonal_product([resolve(p) for p in _split_top(m.group(1))], label=label)
    raise ValueError(f"unknown backend label {label!r}")
