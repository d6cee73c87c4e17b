"""Cacti: the colored plane trees encoding the monodromy of a polynomial.

Every branch ``i`` of ``P^{-1}`` gives a star (white vertex); every cycle
of a generator ``g_s`` gives a vertex of color ``s``; star ``i`` is joined
to the color-``s`` vertex whose cycle contains ``i``.  Only the incidence
structure is stored, indices are 0-based internally and 1-based in every
exported form.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import permutations as perms
from .continuation import (
    GUARD,
    MonodromyData,
    _base_margin,
    branches_at,
    loop_generator,
    monodromy,
)
from .errors import BasePointCollision, PathError, StructureError
from .polycore import Polynomial, scale_of

Vertex = tuple  # ("star", i) or ("vertex", color, cycle index)


def star(i: int) -> Vertex:
    return ("star", i)


@dataclass(frozen=True)
class Cactus:
    """Incidence tree of stars and colored vertices, with optional marks ``a``, ``b``."""

    n: int
    cycles: tuple[tuple[tuple[int, ...], ...], ...]
    values: tuple[complex, ...] = ()
    n_critical: int | None = None
    marks: tuple[tuple[str, Vertex], ...] = ()
    _owner: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        owner = []
        for s, cyc in enumerate(self.cycles):
            row = [-1] * self.n
            for j, c in enumerate(cyc):
                for i in c:
                    row[i] = j
            if -1 in row:
                raise StructureError(f"cycles of color {s + 1} do not cover all stars")
            owner.append(tuple(row))
        object.__setattr__(self, "_owner", tuple(owner))
        if self.n_critical is None:
            object.__setattr__(self, "n_critical", self.colors)
        self._check_tree()
        for name, v in self.marks:
            if v not in set(self.vertices()):
                raise StructureError(f"mark {name} is not a vertex")

    @classmethod
    def from_permutations(cls, generators: Sequence[perms.Perm], values: Sequence[complex] = (),
                          n_critical: int | None = None) -> Cactus:
        n = len(generators[0])
        return cls(n, tuple(tuple(perms.cycles(g)) for g in generators), tuple(values), n_critical)

    @property
    def colors(self) -> int:
        return len(self.cycles)

    def vertex_of(self, s: int, i: int) -> Vertex:
        """Vertex of color ``s`` on star ``i``."""
        return ("vertex", s, self._owner[s][i])

    def cycle(self, v: Vertex) -> tuple[int, ...]:
        return self.cycles[v[1]][v[2]]

    def vertices(self) -> list[Vertex]:
        out = [star(i) for i in range(self.n)]
        for s, cyc in enumerate(self.cycles):
            out.extend(("vertex", s, j) for j in range(len(cyc)))
        return out

    def colored_vertices(self, s: int) -> list[Vertex]:
        return [("vertex", s, j) for j in range(len(self.cycles[s]))]

    def edges(self) -> list[tuple[Vertex, Vertex]]:
        return [(star(i), self.vertex_of(s, i)) for i in range(self.n) for s in range(self.colors)]

    def neighbors(self, v: Vertex) -> list[Vertex]:
        if v[0] == "star":
            return [self.vertex_of(s, v[1]) for s in range(self.colors)]
        return [star(i) for i in self.cycle(v)]

    def mark(self, name: str) -> Vertex:
        for key, v in self.marks:
            if key == name:
                return v
        raise StructureError(f"mark {name} is missing")

    def with_marks(self, **marks: Vertex) -> Cactus:
        return Cactus(self.n, self.cycles, self.values, self.n_critical, tuple(sorted(marks.items())))

    def _check_tree(self) -> None:
        V = len(self.vertices())
        E = self.n * self.colors
        if V != E + 1:
            raise StructureError(f"incidence graph has {V} vertices and {E} edges; not a tree")
        seen = {star(0)}
        todo = [star(0)]
        while todo:
            v = todo.pop()
            for w in self.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        if len(seen) != V:
            raise StructureError("incidence graph is not connected")

    def name(self, v: Vertex) -> str:
        if v[0] == "star":
            return f"S{v[1] + 1}"
        cyc = self.cycle(v)
        sep = "" if self.n < 10 else " "
        return f"c{v[1] + 1}({sep.join(str(i + 1) for i in cyc)})"

    def to_dot(self) -> str:
        """Graphviz description; colors become node shapes, marks are drawn in red."""
        shapes = ["box", "diamond", "triangle", "hexagon", "pentagon", "octagon", "house", "invtriangle"]
        marked = {v: key for key, v in self.marks}
        lines = ["graph cactus {", '  node [fontsize=10];']
        for v in self.vertices():
            ident = self._dot_id(v)
            if v[0] == "star":
                attrs = f'shape=circle, label="{self.name(v)}"'
            else:
                shape = shapes[v[1] % len(shapes)]
                attrs = f'shape={shape}, label="{self.name(v)}"'
            if v in marked:
                attrs += f', color=red, penwidth=2, xlabel="{marked[v]}"'
            lines.append(f"  {ident} [{attrs}];")
        for u, w in self.edges():
            lines.append(f"  {self._dot_id(u)} -- {self._dot_id(w)};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def _dot_id(v: Vertex) -> str:
        if v[0] == "star":
            return f"s{v[1] + 1}"
        return f"v{v[1] + 1}_{v[2] + 1}"

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "colors": self.colors,
            "n_critical": self.n_critical,
            "values": [[v.real, v.imag] for v in self.values],
            "vertices": {str(s + 1): [self.name(v) for v in self.colored_vertices(s)]
                         for s in range(self.colors)},
            "marks": {key: self.name(v) for key, v in self.marks},
        }


def build_cactus(md: MonodromyData) -> Cactus:
    """Cactus of ``md``; raises StructureError when the incidence graph is not a tree."""
    return Cactus.from_permutations(md.generators, md.crit_values, md.n_critical)


# -- extension by the endpoint values --------------------------------------------


def _snap(v: complex, values: Sequence[complex]) -> int | None:
    radius = 1e-7 * scale_of(list(values) + [v])
    hits = [s for s, u in enumerate(values) if abs(u - v) <= radius]
    return hits[0] if hits else None


def _endpoint_vertex(P: Polynomial, md: MonodromyData, cx: Cactus, s: int, x: complex) -> Vertex:
    idx = branches_at(P, md, x)
    i = min(idx)
    v = cx.vertex_of(s, i)
    if set(cx.cycle(v)) != set(idx):
        raise StructureError(f"branches meeting {x} do not form one cycle of color {s + 1}")
    return v


def extend(P: Polynomial, md: MonodromyData, a: complex, b: complex) -> tuple[Cactus, MonodromyData]:
    """Adjoin ``P(a)``, ``P(b)`` as extra colors when regular and mark ``a``, ``b``."""
    a, b = complex(a), complex(b)
    if a == b:
        raise ValueError("endpoints must differ")
    values = list(md.crit_values)
    gens = list(md.generators)
    ends = []
    for x in (a, b):
        v = complex(P(x))
        s = _snap(v, values)
        if s is None:
            if abs(v - md.base) < GUARD * scale_of(values + [v]):
                raise BasePointCollision(f"base point {md.base} coincides with P({x}) = {v}")
            values.append(v)
            s = len(values) - 1
            gens.append(None)
        ends.append(s)
    if len(values) > len(md.crit_values):
        if _base_margin(md.base, values) <= 0.01:
            raise PathError("base star does not clear the endpoint values; recompute with avoid")
        for s in range(len(md.crit_values), len(values)):
            g = loop_generator(P, values, s, md.base, md.fiber)
            if g != perms.identity(md.degree):
                raise StructureError(f"loop around regular value {values[s]} is not trivial")
            gens[s] = g
    ext = MonodromyData(md.base, tuple(values), tuple(gens), md.fiber, md.n_critical)
    cx = build_cactus(ext)
    va = _endpoint_vertex(P, ext, cx, ends[0], a)
    vb = _endpoint_vertex(P, ext, cx, ends[1], b)
    return cx.with_marks(a=va, b=vb), ext


def extended_setup(P: Polynomial, a: complex, b: complex,
                   base_hint: complex | None = None) -> tuple[MonodromyData, Cactus, MonodromyData]:
    """Monodromy chosen clear of ``P(a)``, ``P(b)``, its extended cactus and extended data."""
    md = monodromy(P, base_hint, avoid=(complex(P(a)), complex(P(b))))
    cx, ext = extend(P, md, a, b)
    return md, cx, ext


# -- the path between the marks -----------------------------------------------------


@dataclass(frozen=True)
class PathAB:
    """Tree path from ``a`` to ``b`` with the coefficient matrix of the criterion.

    ``f`` has one row per color and one column per star; a star on the path
    gets -1 at the color of the vertex preceding it and +1 at the color of
    the vertex following it.
    """

    vertex_sequence: tuple[Vertex, ...]
    f: np.ndarray
    weights: dict[int, Fraction]
    skeleton_edges: tuple[int, ...]
    names: tuple[str, ...] = ()

    def rows(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self.f]

    def to_dict(self) -> dict:
        return {
            "vertex_sequence": list(self.names),
            "f": self.rows(),
            "weights": {str(s + 1): str(w) for s, w in self.weights.items()},
            "skeleton": [i + 1 for i in self.skeleton_edges],
            "length": len(self.skeleton_edges),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def format_rows(self) -> list[str]:
        """Each row as a signed combination of ``Q(P_i^{-1})`` terms (1-based)."""
        out = []
        for s, row in enumerate(self.f):
            terms = [(int(c), i) for i, c in enumerate(row) if c]
            if not terms:
                out.append(f"phi_{s + 1} = 0")
                continue
            text = ""
            for c, i in sorted(terms, key=lambda t: -t[0]):
                sign = "-" if c < 0 else "+"
                text += f" {sign} Q(P_{i + 1}^-1)"
            text = text.strip()
            if text.startswith("+ "):
                text = text[2:]
            out.append(f"phi_{s + 1} = {text}")
        return out


def tree_path(cx: Cactus, start: Vertex, end: Vertex) -> list[Vertex]:
    parent = {start: None}
    todo = deque([start])
    while todo:
        v = todo.popleft()
        if v == end:
            break
        for w in cx.neighbors(v):
            if w not in parent:
                parent[w] = v
                todo.append(w)
    if end not in parent:
        raise StructureError("marks are not connected")
    out = [end]
    while out[-1] != start:
        out.append(parent[out[-1]])
    return out[::-1]


def path_ab(cx: Cactus) -> PathAB:
    seq = tree_path(cx, cx.mark("a"), cx.mark("b"))
    f = np.zeros((cx.colors, cx.n), dtype=int)
    skel = []
    for pos, v in enumerate(seq):
        if v[0] != "star":
            continue
        before, after = seq[pos - 1], seq[pos + 1]
        f[before[1], v[1]] = -1
        f[after[1], v[1]] = 1
        skel.append(v[1])
    w = {s: Fraction(0) for s in range(cx.colors)}
    for pos, v in enumerate(seq):
        if v[0] == "vertex":
            w[v[1]] += Fraction(1, 2) if pos in (0, len(seq) - 1) else Fraction(1)
    return PathAB(tuple(seq), f, w, tuple(skel), tuple(cx.name(v) for v in seq))


def weights(p: PathAB) -> dict[int, Fraction]:
    return dict(p.weights)


def skeleton(p: PathAB) -> tuple[tuple[int, ...], int]:
    """Ordered stars crossed by the path and their number."""
    return p.skeleton_edges, len(p.skeleton_edges)


def skeleton_colors(p: PathAB) -> tuple[int, ...]:
    """Colors of the vertices of the skeleton, in path order."""
    return tuple(v[1] for v in p.vertex_sequence if v[0] == "vertex")
