"""Numerical analytic continuation of the branches of ``P^{-1}``.

The fiber ``P^{-1}(w)`` is tracked as ``w`` moves along a polyline, with an
Euler predictor, a Newton corrector and step halving whenever the corrected
points come too close relative to the fiber's own separation.  Monodromy
generators come from loops made of a radial segment from the base point,
a small counterclockwise circle around the critical value, and the radial
return.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import permutations as perms
from .errors import MatchError, PathError, PathTooClose, StructureError
from .polycore import Polynomial, critical_data, root_clusters, scale_of

GUARD = 1e-3
CIRCLE_VERTICES = 32
MIN_STEP = 1e-12


@dataclass(frozen=True)
class PathPlan:
    """Polyline in the value plane; ``refinement`` caps the step length."""

    waypoints: tuple[complex, ...]
    refinement: float | None = None

    def __post_init__(self):
        pts = tuple(complex(w) for w in self.waypoints)
        object.__setattr__(self, "waypoints", pts)
        if len(pts) < 2:
            raise PathError("a path needs at least two waypoints")
        for u, v in zip(pts, pts[1:]):
            if u == v:
                raise PathError("consecutive waypoints must be distinct")
        if self.refinement is not None and not self.refinement > 0:
            raise PathError("refinement must be positive")

    def reversed(self) -> PathPlan:
        return PathPlan(self.waypoints[::-1], self.refinement)

    def check_guard(self, values: Sequence[complex], radius: float) -> None:
        """Reject waypoints within ``radius`` of a value (the last one is exempt)."""
        for w in self.waypoints[:-1]:
            for v in values:
                if abs(w - v) < radius:
                    raise PathError(f"waypoint {w} within guard radius of {v}")


def _separation(z: np.ndarray) -> np.ndarray:
    if z.size < 2:
        return np.full(z.size, np.inf)
    z = np.asarray(z, dtype=complex)
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


def _newton(P, dP, z, target, tol=1e-13, maxit=8):
    for _ in range(maxit):
        d = dP(z)
        if np.any(d == 0):
            return z, False
        delta = (P(z) - target) / d
        z = z - delta
        if not np.all(np.isfinite(z)):
            return z, False
        if np.all(np.abs(delta) <= tol * (1.0 + np.abs(z))):
            return z, True
    return z, False


def _track_segment(P, dP, w0, w1, z, max_step, scale):
    dw = w1 - w0
    length = abs(dw)
    h = min(1.0, max_step / length)
    t = 0.0
    while t < 1.0:
        h = min(h, 1.0 - t)
        sep = _separation(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            pred = z + h * dw / dP(z)
        target = w1 if t + h >= 1.0 else w0 + (t + h) * dw
        zc, ok = _newton(P, dP, pred, target)
        if ok:
            move = np.abs(zc - z)
            corr = np.abs(zc - pred)
            ok = bool(
                np.all(move < 0.25 * sep)
                and np.all(4.0 * corr < sep)
                and np.all(_separation(zc) > 0)
            )
        if ok:
            z = zc
            t = 1.0 if target == w1 else t + h
            h = min(1.6 * h, max_step / length)
        else:
            h *= 0.5
            if h * length < MIN_STEP * scale:
                raise PathTooClose(
                    f"step control collapsed near w = {w0 + t * dw:.6g}; "
                    "fiber points cannot be kept apart"
                )
    return z


def track_fiber(P: Polynomial, path: PathPlan, start_fiber: Sequence[complex]) -> np.ndarray:
    """Continue every point of ``start_fiber`` along ``path``; index ``i`` stays branch ``i``."""
    z = np.array(start_fiber, dtype=complex)
    w0 = path.waypoints[0]
    scale = max(1.0, max(abs(w) for w in path.waypoints))
    resid = np.abs(P(z) - w0)
    if np.any(resid > 1e-8 * max(1.0, abs(w0), P.norm())):
        raise PathError("start fiber does not solve P(z) = first waypoint")
    dP = P.derivative()
    span = max(abs(b - a) for a, b in zip(path.waypoints, path.waypoints[1:]))
    max_step = path.refinement or max(span / 8.0, 1e-3 * scale)
    for a, b in zip(path.waypoints, path.waypoints[1:]):
        z = _track_segment(P, dP, a, b, z, max_step, scale)
    return z


def match_fibers(end: Sequence[complex], start: Sequence[complex]) -> perms.Perm:
    """Permutation sending index ``i`` to the start index nearest ``end[i]``."""
    end = np.asarray(end, dtype=complex)
    start = np.asarray(start, dtype=complex)
    sep = _separation(start)
    out = []
    for i, z in enumerate(end):
        d = np.abs(start - z)
        j = int(np.argmin(d))
        if d[j] >= 0.25 * sep[j]:
            raise MatchError(f"tracked point {i} is not close to any fiber point")
        out.append(j)
    if not perms.is_bijection(out):
        raise MatchError("fiber matching is not a bijection")
    return tuple(out)


# -- monodromy --------------------------------------------------------------------


@dataclass(frozen=True)
class MonodromyData:
    """Base point, ordered values with their loop generators, and the base fiber.

    The first ``n_critical`` values are the critical values of ``P``; any
    further values are regular values adjoined when extending the cactus.
    """

    base: complex
    crit_values: tuple[complex, ...]
    generators: tuple[perms.Perm, ...]
    fiber: tuple[complex, ...] = ()
    n_critical: int | None = None
    degree: int = field(init=False)

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "crit_values", tuple(complex(v) for v in self.crit_values))
        object.__setattr__(self, "fiber", tuple(complex(z) for z in self.fiber))
        if not gens:
            raise StructureError("monodromy data needs at least one generator")
        n = len(gens[0])
        object.__setattr__(self, "degree", n)
        if len(self.crit_values) != len(gens):
            raise StructureError("one generator per value is required")
        for g in gens:
            if len(g) != n or not perms.is_bijection(g):
                raise StructureError(f"generator {g} is not a bijection on {n} points")
        if not perms.is_full_cycle(perms.product(*gens)):
            raise StructureError("product of generators is not an n-cycle")
        if self.fiber and len(self.fiber) != n:
            raise StructureError("fiber size differs from the degree")
        if self.n_critical is None:
            object.__setattr__(self, "n_critical", len(gens))

    @property
    def infinity(self) -> perms.Perm:
        return perms.product(*self.generators)

    def to_dict(self) -> dict:
        return {
            "base": [self.base.real, self.base.imag],
            "crit_values": [[v.real, v.imag] for v in self.crit_values],
            "generators": [perms.format_cycles(g) for g in self.generators],
            "fiber": [[z.real, z.imag] for z in self.fiber],
            "n_critical": self.n_critical,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> MonodromyData:
        gens = tuple(perms.parse_cycles(g, len(d["fiber"]) or None) for g in d["generators"])
        return cls(
            base=complex(*d["base"]),
            crit_values=tuple(complex(*v) for v in d["crit_values"]),
            generators=gens,
            fiber=tuple(complex(*z) for z in d["fiber"]),
            n_critical=d.get("n_critical"),
        )


def _spacing(values: Sequence[complex], s: int) -> float:
    others = [abs(values[s] - v) for t, v in enumerate(values) if t != s]
    return min(others) if others else math.inf


def loop_radius(values: Sequence[complex], s: int, base: complex) -> float:
    scale = scale_of(values)
    return min(0.5 * _spacing(values, s), 0.1 * scale, 0.5 * abs(values[s] - base))


def _segment_distance(p: complex, a: complex, b: complex) -> float:
    d = b - a
    t = ((p - a) * d.conjugate()).real / abs(d) ** 2
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * d))


def _base_margin(c: complex, values: Sequence[complex]) -> float:
    """Smallest clearance of the radial star from ``c``, relative to spacing."""
    scale = scale_of(values)
    if any(abs(c - v) < GUARD * scale for v in values):
        return -1.0
    margin = math.inf
    for s, v in enumerate(values):
        for t, u in enumerate(values):
            if s != t:
                margin = min(margin, _segment_distance(u, c, v) / max(_spacing(values, t), 1e-300))
    return margin


def choose_base(values: Sequence[complex], hint: complex | None = None) -> complex:
    """Exterior base point whose radial segments to ``values`` stay clear.

    The first candidate is ``2*max|v| + 1 + i*spread/2``; further candidates
    rotate it about the centroid.  A hint is used as is if its margin is
    acceptable.
    """
    values = list(values)
    if hint is not None and _base_margin(hint, values) > 0.1:
        return complex(hint)
    big = max([0.0] + [abs(v) for v in values])
    spread = max([0.0] + [abs(u - v) for u in values for v in values])
    c0 = 2 * big + 1 + 1j * spread / 2
    centroid = complex(np.mean(values)) if values else 0j
    best, best_margin = c0, -math.inf
    for k in range(24):
        c = centroid + (c0 - centroid) * cmath.exp(1j * math.pi * k / 12 * (1 if k % 2 else -1))
        m = _base_margin(c, values)
        if m > 0.1:
            return c
        if m > best_margin:
            best, best_margin = c, m
    if best_margin <= 0:
        raise PathError("no admissible base point found")
    return best


def _angular_order(values: Sequence[complex], base: complex) -> list[int]:
    centroid = complex(np.mean(values))
    ref = centroid - base
    return sorted(range(len(values)), key=lambda s: cmath.phase((values[s] - base) / ref))


def loop_plan(values: Sequence[complex], s: int, base: complex) -> PathPlan:
    """Radial segment, counterclockwise circle around ``values[s]``, return."""
    v = values[s]
    r = loop_radius(values, s, base)
    u = (v - base) / abs(v - base)
    start = v - r * u
    circle = [v - r * u * cmath.exp(2j * math.pi * j / CIRCLE_VERTICES) for j in range(1, CIRCLE_VERTICES)]
    return PathPlan((base, start, *circle, start, base))


def base_fiber(P: Polynomial, c: complex) -> tuple[complex, ...]:
    clusters = root_clusters(P - c)
    if any(m > 1 for _, m in clusters):
        raise PathError(f"base point {c} is a critical value")
    return tuple(z for z, _ in clusters)


def loop_generator(P: Polynomial, values: Sequence[complex], s: int, base: complex,
                   fiber: Sequence[complex]) -> perms.Perm:
    end = track_fiber(P, loop_plan(values, s, base), fiber)
    return match_fibers(end, fiber)


def monodromy(P: Polynomial, base_hint: complex | None = None,
              avoid: Iterable[complex] = ()) -> MonodromyData:
    """Monodromy generators of ``P`` around its finite critical values.

    ``avoid`` lists further values (typically ``P(a)``, ``P(b)``) that the base
    point and its radial star must keep clear of.  Branches are renumbered so
    that the product of the generators is ``i -> i + 1 (mod n)``.
    """
    n = P.degree
    if n is None or n < 2:
        raise StructureError("monodromy needs degree >= 2")
    cd = critical_data(P)
    crit = list(cd.values)
    extra = []
    for v in map(complex, avoid):
        if all(abs(v - u) > 1e-7 * scale_of(crit + [v]) for u in crit + extra):
            extra.append(v)
    base = choose_base(crit + extra, base_hint)
    order = _angular_order(crit, base)
    crit = [crit[s] for s in order]
    star = crit + extra
    fiber = base_fiber(P, base)
    gens = [loop_generator(P, star, s, base, fiber) for s in range(len(crit))]
    g_inf = perms.product(*gens)
    if not perms.is_full_cycle(g_inf):
        raise StructureError("tracked generators do not multiply to an n-cycle")
    # label branch t by the t-th iterate of g_inf starting from fiber point 0
    relabel = [0] * n
    x = 0
    for t in range(n):
        relabel[x] = t
        x = g_inf[x]
    gens = [perms.conjugate(g, relabel) for g in gens]
    new_fiber = [0j] * n
    for old, new in enumerate(relabel):
        new_fiber[new] = fiber[old]
    return MonodromyData(base=base, crit_values=tuple(crit), generators=tuple(gens),
                         fiber=tuple(new_fiber), n_critical=len(crit))


def infinity_loop(P: Polynomial, md: MonodromyData) -> perms.Perm:
    """Permutation from a counterclockwise circle enclosing every value."""
    centroid = complex(np.mean(md.crit_values))
    radius = abs(md.base - centroid)
    if any(abs(v - centroid) >= 0.95 * radius for v in md.crit_values):
        raise PathError("base point is not exterior enough for a single big loop")
    start = md.base - centroid
    pts = [centroid + start * cmath.exp(2j * math.pi * j / 128) for j in range(129)]
    pts[-1] = md.base
    end = track_fiber(P, PathPlan(tuple(pts)), md.fiber)
    return match_fibers(end, md.fiber)


# -- branches meeting a point ---------------------------------------------------


def _snap_value(v: complex, values: Sequence[complex]) -> int | None:
    radius = 1e-7 * scale_of(values)
    for s, u in enumerate(values):
        if abs(v - u) <= radius:
            return s
    return None


def point_multiplicity(P: Polynomial, x: complex) -> int:
    clusters = root_clusters(P - P(x))
    z, m = min(clusters, key=lambda zm: abs(zm[0] - x))
    return m


def branches_at(P: Polynomial, md: MonodromyData, x: complex) -> frozenset[int]:
    """Indices of branches whose continuation from the base toward ``P(x)`` ends at ``x``."""
    v = complex(P(x))
    values = list(md.crit_values)
    s = _snap_value(v, values)
    mult = point_multiplicity(P, x)
    fiber = np.array(md.fiber)
    c = md.base
    if s is None:
        if mult > 1:
            raise StructureError(f"{x} is critical but P({x}) is not among the values")
        end = track_fiber(P, PathPlan((c, v)), fiber)
        d = np.abs(end - x)
        i = int(np.argmin(d))
        if np.sort(d)[1] < 4 * d[i] if d.size > 1 else False:
            raise MatchError(f"ambiguous branch at regular point {x}")
        return frozenset([i])
    v = values[s]
    rho = loop_radius(values, s, c)
    u = (c - v) / abs(c - v)
    z = fiber
    w_prev = c
    for _ in range(6):
        w = v + rho * u
        z = track_fiber(P, PathPlan((w_prev, w)), z)
        w_prev = w
        d = np.abs(z - x)
        idx = np.argsort(d)
        near = d[idx[mult - 1]]
        far = d[idx[mult]] if mult < d.size else math.inf
        if near < 0.5 * far:
            return frozenset(int(i) for i in idx[:mult])
        rho *= 0.1
    raise MatchError(f"could not isolate the {mult} branches meeting {x}")


# -- alignment with the canonical numbering at infinity ----------------------------


def alignment_radius(md: MonodromyData) -> float:
    big = max(abs(v) for v in md.crit_values)
    return 4.0 * (2.0 * big + 2.0 * abs(md.base) + 1.0)


def infinity_alignment(P: Polynomial, md: MonodromyData, R: float | None = None,
                       return_values: bool = False):
    """Map each base branch index to its canonical index at infinity.

    The fiber is tracked from the base point to the real point ``R`` and
    matched against the Puiseux branches ``sum_k v_k eps^{jk} R^{-k/n}``.
    """
    from .errors import RadiusError
    from .series import branch_series, inverse_puiseux

    n = P.degree
    R = R or alignment_radius(md)
    tracked = track_fiber(P, PathPlan((md.base, R)), md.fiber)
    K = 2 * n + 16
    while True:
        inv = inverse_puiseux(P, K)
        try:
            series_vals = np.array([branch_series(inv, j, R) for j in range(n)])
            break
        except RadiusError:
            if K > 4000:
                raise
            K *= 2
    sigma = []
    for i, z in enumerate(tracked):
        d = np.abs(series_vals - z)
        order = np.argsort(d)
        if n > 1 and d[order[1]] < 2.0 * d[order[0]]:
            raise MatchError(f"branch {i} matches two Puiseux branches")
        sigma.append(int(order[0]))
    if not perms.is_bijection(sigma):
        raise MatchError("alignment is not a bijection")
    sigma = tuple(sigma)
    if return_values:
        return sigma, tracked, series_vals
    return sigma
