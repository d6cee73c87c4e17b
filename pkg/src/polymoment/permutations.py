"""Permutations on ``{0, ..., n-1}`` stored as image tuples.

``p[i]`` is the image of ``i``.  Products follow the monodromy convention:
``product(g1, g2)`` applies ``g1`` first, matching continuation along the
first loop and then the second.  Text I/O uses 1-based cycle notation with
fixed points written out, e.g. ``(1)(2)(37)(4)(5)(6)(8)``.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

from .errors import ParseError

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_bijection(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def product(*perms: Perm) -> Perm:
    """Compose permutations left to right (the first argument acts first)."""
    if not perms:
        raise ValueError("product of no permutations")
    out = list(range(len(perms[0])))
    for g in perms:
        out = [g[x] for x in out]
    return tuple(out)


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def conjugate(p: Perm, relabel: Sequence[int]) -> Perm:
    """Express ``p`` in new labels, where ``relabel[old] = new``."""
    out = [0] * len(p)
    for old, img in enumerate(p):
        out[relabel[old]] = relabel[img]
    return tuple(out)


def cycles(p: Perm) -> list[tuple[int, ...]]:
    """Cycles including fixed points, each starting at its smallest element."""
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        j = p[start]
        while j != start:
            cyc.append(j)
            seen[j] = True
            j = p[j]
        out.append(tuple(cyc))
    return out


def cycle_type(p: Perm) -> tuple[int, ...]:
    return tuple(sorted((len(c) for c in cycles(p)), reverse=True))


def is_full_cycle(p: Perm) -> bool:
    return len(cycles(p)) == 1


def ramification(p: Perm) -> int:
    """``sum(len(C) - 1)`` over the cycles of ``p``."""
    return len(p) - len(cycles(p))


def from_cycles(cyc: Iterable[Sequence[int]], n: int) -> Perm:
    out = list(range(n))
    for c in cyc:
        for i, x in enumerate(c):
            out[x] = c[(i + 1) % len(c)]
    if not is_bijection(out):
        raise ParseError("cycles overlap")
    return tuple(out)


def format_cycles(p: Perm) -> str:
    sep = "" if len(p) < 10 else " "
    return "".join("(" + sep.join(str(x + 1) for x in c) + ")" for c in cycles(p))


_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, n: int | None = None) -> Perm:
    """Parse 1-based cycle notation; digits may be run together when n < 10."""
    text = text.strip()
    if not text or _CYCLE.sub("", text).strip():
        raise ParseError(f"bad cycle notation {text!r}")
    groups = []
    for body in _CYCLE.findall(text):
        body = body.strip()
        if not body:
            raise ParseError("empty cycle")
        if " " in body or "," in body:
            items = [int(t) for t in re.split(r"[ ,]+", body)]
        else:
            items = [int(ch) for ch in body]
        groups.append([x - 1 for x in items])
    size = n if n is not None else max(max(g) for g in groups) + 1
    if any(x < 0 or x >= size for g in groups for x in g):
        raise ParseError("cycle entry out of range")
    if sum(len(g) for g in groups) != len({x for g in groups for x in g}):
        raise ParseError("cycles overlap")
    return from_cycles(groups, size)
