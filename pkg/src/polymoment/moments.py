"""Moments ``∫_a^b P^i q dz`` and the branch-relation tests equivalent to them.

Moments are computed exactly over Gaussian dyadic rationals (every binary64
input is one), so cancellation in high powers of ``P`` cannot fake a
nonzero value.  The criterion evaluates, at sample points reached by
continuation from the base point, the combinations ``sum_i f_{s,i} Q(P_i^{-1})``
read off the path between the marks in the extended cactus.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _exact
from .continuation import MonodromyData, PathPlan, _segment_distance, branches_at, loop_radius, track_fiber
from .polycore import Polynomial, scale_of

MOMENT_TOL = 1e-9
CRITERION_TOL = 1e-8
SEGMENT_SAMPLES = 257


def default_count(P: Polynomial, Q: Polynomial | None = None) -> int:
    m = Q.degree if Q is not None and Q.degree is not None else 0
    return 2 * ((P.degree or 0) + m) + 8


def moment(P: Polynomial, q: Polynomial, a: complex, b: complex, i: int) -> complex:
    """``∫_a^b P^i q dz`` evaluated exactly from the antiderivative."""
    if i < 0:
        raise ValueError("moment index must be non-negative")
    p = _exact.DyadicPoly.from_polynomial(P)
    acc = _exact.DyadicPoly.from_polynomial(q)
    for _ in range(i):
        acc = acc * p
    return _exact.integral(acc, a, b)


def _exact_sequence(P: Polynomial, integrand: _exact.DyadicPoly, a, b, M: int) -> list[complex]:
    p = _exact.DyadicPoly.from_polynomial(P)
    out = []
    acc = integrand
    for i in range(M + 1):
        out.append(_exact.integral(acc, a, b))
        if i < M:
            acc = acc * p
    return out


def _log_sup(poly: Polynomial, a: complex, b: complex) -> float:
    if poly.is_zero():
        return -math.inf
    t = np.linspace(0.0, 1.0, SEGMENT_SAMPLES)
    vals = np.abs(poly(a + t * (b - a)))
    top = float(vals.max())
    return math.log(top) if top > 0 else -math.inf


@dataclass(frozen=True)
class MomentReport:
    """Moments ``m_0 .. m_M`` with the scale each one is judged against."""

    M: int
    values: tuple[complex, ...]
    log_scales: tuple[float, ...]
    tol: float = MOMENT_TOL

    @property
    def max_abs(self) -> float:
        return max(abs(v) for v in self.values)

    @property
    def first_nonzero(self) -> int | None:
        for i, (v, ls) in enumerate(zip(self.values, self.log_scales)):
            if v == 0:
                continue
            if not math.log(abs(v)) <= math.log(self.tol) + ls:
                return i
        return None

    @property
    def vanishes(self) -> bool:
        return self.first_nonzero is None

    @property
    def verdict(self) -> str:
        i = self.first_nonzero
        return "VANISHES" if i is None else f"NONZERO({i})"

    def to_dict(self) -> dict:
        return {
            "M": self.M,
            "values": [[v.real, v.imag] for v in self.values],
            "max_abs": self.max_abs,
            "verdict": "VANISHES" if self.vanishes else "NONZERO",
            "first_nonzero": self.first_nonzero,
            "tol": self.tol,
        }


def _scales(P: Polynomial, q: Polynomial, a, b, M: int) -> tuple[float, ...]:
    lp = _log_sup(P, a, b)
    lq = _log_sup(q, a, b)
    length = abs(complex(b) - complex(a))
    log_length = math.log(length) if length > 0 else -math.inf
    out = []
    for i in range(M + 1):
        lg = i * lp + lq if i else lq
        out.append(log_length + max(0.0, lg))
    return tuple(out)


def moment_sequence(P: Polynomial, q: Polynomial, a: complex, b: complex, M: int | None = None,
                    tol: float = MOMENT_TOL) -> MomentReport:
    """All moments up to ``M``; each is judged against ``|b-a| max(1, sup|P|^i sup|q|)``.

    The sups are taken over samples of the segment and the comparison is
    done on logarithms, so large powers cannot overflow.
    """
    if M is None:
        M = default_count(P, q)
    if M < 0:
        raise ValueError("M must be non-negative")
    vals = _exact_sequence(P, _exact.DyadicPoly.from_polynomial(q), a, b, M)
    return MomentReport(M, tuple(vals), _scales(P, q, a, b, M), tol)


def h_coefficients(P: Polynomial, Q: Polynomial, a: complex, b: complex, M: int) -> list[complex]:
    """``∫_a^b P^i Q P' dz`` for ``i = 0..M``; the generating function is ``-sum m_i t^{-(i+1)}``."""
    integrand = _exact.DyadicPoly.from_polynomial(Q) * _exact.DyadicPoly.from_polynomial(P).derivative()
    return _exact_sequence(P, integrand, a, b, M)


def h_report(P: Polynomial, Q: Polynomial, a, b, M: int, tol: float = MOMENT_TOL) -> MomentReport:
    vals = h_coefficients(P, Q, a, b, M)
    return MomentReport(M, tuple(vals), _scales(P, Q * P.derivative(), a, b, M), tol)


# -- evaluating branch relations at sample points ---------------------------------


def sample_points(md: MonodromyData, samples: int) -> list[complex]:
    """Ring around the centroid of the values, nudged out of small discs around them."""
    values = list(md.crit_values)
    centroid = complex(np.mean(values))
    spread = max(abs(v - centroid) for v in values)
    radius = 1.5 * max(spread, 0.5 * scale_of(values))
    spacing = min([abs(u - v) for i, u in enumerate(values) for v in values[i + 1 :]] or [radius])
    keep_out = 0.1 * spacing
    out = []
    for j in range(samples):
        theta = 2 * math.pi * j / samples + 0.37
        for _ in range(50):
            z = centroid + radius * cmath.exp(1j * theta)
            if all(abs(z - v) > keep_out for v in values) and abs(z - md.base) > 0:
                break
            theta += 0.05
        out.append(z)
    return out


def _route(md: MonodromyData, z: complex) -> PathPlan:
    values = list(md.crit_values)
    c = md.base
    pts = [c]
    for s, v in enumerate(values):
        r = loop_radius(values, s, c)
        if _segment_distance(v, c, z) < 0.5 * r and abs(z - v) > 0.5 * r:
            d = (z - c) / abs(z - c)
            apex = v + 1j * d * r
            pts.append(apex)
    pts.append(z)
    return PathPlan(tuple(pts))


def fiber_at(P: Polynomial, md: MonodromyData, z: complex) -> np.ndarray:
    """Fiber over ``z`` continued from the base fiber, branch numbering preserved."""
    return track_fiber(P, _route(md, z), md.fiber)


@dataclass(frozen=True)
class CriterionReport:
    """Largest relative residual of each row over the sample points."""

    residuals: tuple[float, ...]
    samples: tuple[complex, ...]
    endpoint_residual: float
    tol: float = CRITERION_TOL
    extra: dict = field(default_factory=dict)

    @property
    def row_pass(self) -> tuple[bool, ...]:
        return tuple(r <= self.tol for r in self.residuals)

    @property
    def passed(self) -> bool:
        return all(self.row_pass) and self.endpoint_residual <= self.tol

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict:
        return {
            "residuals": list(self.residuals),
            "row_pass": list(self.row_pass),
            "samples": [[z.real, z.imag] for z in self.samples],
            "endpoint_residual": self.endpoint_residual,
            "tol": self.tol,
            "verdict": self.verdict,
            **self.extra,
        }


def _normalized(Q: Polynomial, a: complex, b: complex) -> tuple[Polynomial, float]:
    Qn = Q - complex(Q(a))
    return Qn, abs(complex(Qn(b))) / max(1.0, Q.norm())


def criterion_residuals(P: Polynomial, Q: Polynomial, a: complex, b: complex, path, md: MonodromyData,
                        samples: int = 8, tol: float = CRITERION_TOL) -> CriterionReport:
    """Residuals of ``sum_i f_{s,i} Q(P_i^{-1}(z))`` at ``samples`` points.

    ``Q`` is shifted so that ``Q(a) = 0``; ``|Q(b)|`` after the shift is
    reported as the endpoint residual and is part of the verdict.  ``md``
    must be the extended data the path was built from.
    """
    Qn, end_res = _normalized(Q, a, b)
    f = np.asarray(path.f, dtype=float)
    if f.shape != (len(md.crit_values), md.degree):
        raise ValueError("path matrix does not match the monodromy data")
    pts = sample_points(md, samples)
    worst = np.zeros(f.shape[0])
    for z in pts:
        vals = Qn(fiber_at(P, md, z))
        size = max(1.0, float(np.abs(vals).max()))
        worst = np.maximum(worst, np.abs(f @ vals) / size)
    return CriterionReport(tuple(float(w) for w in worst), tuple(pts), end_res, tol)


def necessary_residuals(P: Polynomial, Q: Polynomial, a: complex, b: complex, md: MonodromyData,
                        samples: int = 8, tol: float = CRITERION_TOL) -> CriterionReport:
    """Mean of ``Q`` over the branches meeting ``a`` against those meeting ``b``.

    With ``P(a) = P(b)`` the two means must agree (one residual); otherwise
    each mean must vanish on its own (two residuals).
    """
    Qn, end_res = _normalized(Q, a, b)
    A = sorted(branches_at(P, md, a))
    B = sorted(branches_at(P, md, b))
    same = abs(complex(P(a)) - complex(P(b))) <= 1e-9 * scale_of([P(a), P(b)])
    pts = sample_points(md, samples)
    worst = np.zeros(1 if same else 2)
    for z in pts:
        vals = Qn(fiber_at(P, md, z))
        size = max(1.0, float(np.abs(vals).max()))
        ma = vals[A].mean()
        mb = vals[B].mean()
        r = [abs(ma - mb)] if same else [abs(ma), abs(mb)]
        worst = np.maximum(worst, np.array(r) / size)
    extra = {"case": "equal_values" if same else "distinct_values",
             "branches_a": [i + 1 for i in A], "branches_b": [i + 1 for i in B]}
    return CriterionReport(tuple(float(w) for w in worst), tuple(pts), end_res, tol, extra)
