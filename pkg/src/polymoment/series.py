"""Puiseux expansions at infinity of ``P^{-1}`` and ``Q∘P^{-1}``.

With ``t = z^{-1/n}`` (principal root) the canonical branch is
``y = t^{-1} Y(t)`` where ``Y`` solves ``sum_j p_j t^{n-j} Y^j = 1``.  The
series ``Y`` is found by Newton iteration on truncated power series, so
``v_k`` is the coefficient of ``t^{k+1}`` in ``Y``.  Branch ``j`` of the
canonical numbering multiplies ``v_k`` by ``eps^{jk}``, ``eps = exp(2 pi i/n)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegreeError, RadiusError
from .polycore import Polynomial

VANISH_TOL = 1e-8
ANGLE_TOL = 1e-9
MAX_BOUND_BITS = 10**7


@dataclass(frozen=True)
class PuiseuxExpansion:
    """Coefficients ``c_start .. c_K`` of ``sum_k c_k eps^{jk} z^{-k/n}``."""

    ramification: int
    start: int
    coeffs: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if self.ramification < 1:
            raise DegreeError("ramification must be positive")
        if not self.coeffs or self.coeffs[0] == 0:
            raise ValueError("leading coefficient of a Puiseux expansion must be nonzero")

    @property
    def K(self) -> int:
        return self.start + len(self.coeffs) - 1

    def indices(self) -> range:
        return range(self.start, self.K + 1)

    def coeff(self, k: int) -> complex:
        if k < self.start:
            return 0j
        if k > self.K:
            raise IndexError(f"coefficient {k} is beyond the truncation depth {self.K}")
        return self.coeffs[k - self.start]

    def array(self) -> np.ndarray:
        return np.array(self.coeffs)

    def to_dict(self) -> dict:
        return {
            "ramification": self.ramification,
            "start": self.start,
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> PuiseuxExpansion:
        return cls(d["ramification"], d["start"], tuple(complex(*c) for c in d["coeffs"]))


# -- truncated power series in t ----------------------------------------------------


def _mul(x: np.ndarray, y: np.ndarray, N: int) -> np.ndarray:
    return np.convolve(x[:N], y[:N])[:N]


def _reciprocal(x: np.ndarray, N: int) -> np.ndarray:
    out = np.zeros(N, dtype=complex)
    out[0] = 1.0 / x[0]
    for k in range(1, N):
        upper = min(k, len(x) - 1)
        out[k] = -np.dot(x[1 : upper + 1], out[k - 1 :: -1][:upper]) / x[0]
    return out


def _pad(x: np.ndarray, N: int) -> np.ndarray:
    out = np.zeros(N, dtype=complex)
    out[: min(N, len(x))] = x[:N]
    return out


def _horner_t(coeffs: np.ndarray, deg: int, Y: np.ndarray, N: int, with_derivative: bool):
    """``sum_j c_j t^{deg-j} Y^j`` (and its ``Y`` derivative) modulo ``t^N``."""
    acc = _pad(np.array([coeffs[deg]]), N)
    dacc = np.zeros(N, dtype=complex)
    for j in range(deg - 1, -1, -1):
        if with_derivative:
            dacc = _mul(dacc, Y, N) + acc
        acc = _mul(acc, Y, N)
        if deg - j < N:
            acc[deg - j] += coeffs[j]
    return acc, dacc


def inverse_puiseux(P: Polynomial, K: int) -> PuiseuxExpansion:
    """Coefficients ``v_{-1} .. v_K`` of the canonical branch of ``P^{-1}`` at infinity."""
    n = P.degree
    if n is None or n < 1:
        raise DegreeError("inverse expansion needs degree >= 1")
    if K < -1:
        raise ValueError("K must be at least -1")
    p = P.coeffs
    N = K + 2
    Y = np.zeros(1, dtype=complex)
    Y[0] = cmath.exp(-cmath.log(p[n]) / n)
    prec = 1
    while prec < N:
        prec = min(2 * prec, N)
        Yp = _pad(Y, prec)
        F, dF = _horner_t(p, n, Yp, prec, True)
        F[0] -= 1.0
        Y = Yp - _mul(F, _reciprocal(dF, prec), prec)
    # one more pass cleans rounding left by the final doubling step
    F, dF = _horner_t(p, n, Y, N, True)
    F[0] -= 1.0
    Y = Y - _mul(F, _reciprocal(dF, N), N)
    return PuiseuxExpansion(n, -1, tuple(Y[:N]))


def recomposition_residual(P: Polynomial, inv: PuiseuxExpansion, relative: bool = True) -> np.ndarray:
    """Coefficients of ``t^n (P(series) - z)`` through the exactly determined order.

    With ``relative`` each coefficient is divided by the same coefficient of
    the expression evaluated on absolute values, since the series
    coefficients themselves grow geometrically.
    """
    n = P.degree
    N = len(inv.coeffs)
    F, _ = _horner_t(P.coeffs, n, inv.array(), N, False)
    F[0] -= 1.0
    if not relative:
        return F
    size, _ = _horner_t(np.abs(P.coeffs), n, np.abs(inv.array()), N, False)
    return np.abs(F) / np.maximum(size.real, np.finfo(float).tiny)


def compose_puiseux(Q: Polynomial, inv: PuiseuxExpansion, K: int | None = None) -> PuiseuxExpansion:
    """Coefficients ``u_{-m} .. u_K`` of ``Q`` applied to the canonical branch.

    Without ``K`` the result runs as deep as ``inv`` determines it exactly,
    which is ``inv.K + 1 - m``.
    """
    m = Q.degree
    if m is None:
        raise DegreeError("Q must be nonzero")
    N = len(inv.coeffs)
    depth = inv.K + 1 - m
    if K is None:
        K = depth
    if K > depth:
        raise ValueError(f"inverse expansion is too short: depth {depth} < requested {K}")
    G, _ = _horner_t(Q.coeffs, m, inv.array(), N, False)
    return PuiseuxExpansion(inv.ramification, -m, tuple(G[: K + m + 1]))


def composed_expansion(P: Polynomial, Q: Polynomial, K: int) -> PuiseuxExpansion:
    """``u_{-m} .. u_K`` of ``Q∘P^{-1}``, computing the inverse series deep enough."""
    m = Q.degree
    if m is None:
        raise DegreeError("Q must be nonzero")
    return compose_puiseux(Q, inverse_puiseux(P, K + max(m, 1)), K)


def default_depth(n: int, m: int) -> int:
    return 2 * (m + n) + 8


def root_of_unity(n: int, k: int) -> complex:
    return cmath.exp(2j * math.pi * (k % n) / n)


def _terms(exp: PuiseuxExpansion, j: int, z: complex) -> np.ndarray:
    n = exp.ramification
    w = cmath.exp(-cmath.log(z) / n)
    ks = np.arange(exp.start, exp.K + 1)
    phase = np.exp(2j * math.pi * ((j * ks) % n) / n)
    return exp.array() * phase * w ** ks


def branch_series(exp: PuiseuxExpansion, j: int, z: complex, tol: float = 1e-10) -> complex:
    """Evaluate canonical branch ``j`` at ``z`` with the principal ``z^{1/n}``.

    Raises RadiusError when the last ``n`` terms are not below
    ``tol * max(1, |value|)``.
    """
    if z == 0:
        raise RadiusError("series at infinity cannot be evaluated at 0")
    terms = _terms(exp, j, complex(z))
    value = complex(terms.sum())
    tail = np.abs(terms[-exp.ramification :]).max()
    if tail > tol * max(1.0, abs(value)):
        raise RadiusError(f"|z| = {abs(z):.4g} is inside the validity radius of the truncated series")
    return value


def validity_radius(exp: PuiseuxExpansion, tol: float = 1e-10) -> float:
    """Smallest positive real radius (up to a factor 1.01) accepted by :func:`branch_series`."""

    def ok(r):
        try:
            branch_series(exp, 0, r, tol)
            return True
        except RadiusError:
            return False

    hi = 1.0
    while not ok(hi):
        hi *= 2.0
        if hi > 1e300:
            return math.inf
    lo = hi / 2.0
    if hi == 1.0:
        return 1.0
    while hi / lo > 1.01:
        mid = math.sqrt(hi * lo)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


# -- vanishing tests ---------------------------------------------------------------


def coefficient_tolerance(exp: PuiseuxExpansion) -> float:
    return VANISH_TOL * max(1.0, float(np.abs(exp.array()).max()))


@dataclass(frozen=True)
class RowCheck:
    violations: tuple[int, ...]
    vanishing_classes: tuple[int, ...]
    K: int

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"violations": list(self.violations), "vanishing_classes": list(self.vanishing_classes),
                "K": self.K, "passed": self.passed}


def vanishing_row_check(f_row: Sequence[complex], u: PuiseuxExpansion) -> RowCheck:
    """Test that ``u_k = 0`` or ``F(eps^k) = 0`` for every available ``k``.

    ``F(x) = sum_j f_j x^j`` with ``f_row`` in canonical numbering.
    """
    n = u.ramification
    f = np.asarray(f_row, dtype=complex)
    if f.size != n:
        raise ValueError(f"row has {f.size} entries, expected {n}")
    if not np.any(f):
        raise ValueError("row is identically zero")
    tol_u = coefficient_tolerance(u)
    tol_f = VANISH_TOL * max(1.0, float(np.abs(f).max()))
    powers = np.arange(n)
    F = {r: complex(np.dot(f, np.exp(2j * math.pi * ((r * powers) % n) / n))) for r in range(n)}
    violations = []
    nonzero_class = [False] * n
    for k in u.indices():
        if abs(u.coeff(k)) > tol_u:
            nonzero_class[k % n] = True
            if abs(F[k % n]) > tol_f:
                violations.append(k)
    classes = tuple(r for r in range(n) if not nonzero_class[r])
    return RowCheck(tuple(violations), classes, u.K)


@dataclass(frozen=True)
class GcdReport:
    violations: tuple[int, ...]
    K: int

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"violations": list(self.violations), "K": self.K, "passed": self.passed}


def gcd_vanishing_report(u: PuiseuxExpansion) -> GcdReport:
    """Indices coprime to ``n`` whose coefficient does not vanish."""
    n = u.ramification
    tol = coefficient_tolerance(u)
    bad = tuple(k for k in u.indices() if math.gcd(k, n) == 1 and abs(u.coeff(k)) > tol)
    return GcdReport(bad, u.K)


# -- circle sets -------------------------------------------------------------------


class Arrangement(str, Enum):
    DISJOINTED = "DISJOINTED"
    ALMOST_DISJOINTED = "ALMOST_DISJOINTED"
    NEITHER = "NEITHER"


def arrangement(n: int, A: Sequence[int], B: Sequence[int]) -> Arrangement:
    """Mutual position of ``{eps^a}`` and ``{eps^b}`` on the unit circle.

    Disjointed means the labels of the sorted points form at most two
    circular runs.  Almost disjointed means exactly one shared point and,
    reading around the circle from it, all remaining points of one set come
    before all remaining points of the other.
    """
    A = {a % n for a in A}
    B = {b % n for b in B}
    if not A or not B:
        raise ValueError("both sets must be nonempty")
    common = A & B
    if not common:
        labels = ["A" if r in A else "B" for r in range(n) if r in A or r in B]
        changes = sum(1 for x, y in zip(labels, labels[1:] + labels[:1]) if x != y)
        return Arrangement.DISJOINTED if changes <= 2 else Arrangement.NEITHER
    if len(common) == 1:
        (s1,) = common
        seq = []
        for step in range(1, n):
            r = (s1 + step) % n
            if r in A:
                seq.append("A")
            elif r in B:
                seq.append("B")
        changes = sum(1 for x, y in zip(seq, seq[1:]) if x != y)
        if changes <= 1:
            return Arrangement.ALMOST_DISJOINTED
    return Arrangement.NEITHER


@dataclass(frozen=True)
class CircleSets:
    n: int
    indices_a: tuple[int, ...]
    indices_b: tuple[int, ...]
    verdict: Arrangement

    @property
    def Va(self) -> tuple[complex, ...]:
        return tuple(root_of_unity(self.n, k) for k in self.indices_a)

    @property
    def Vb(self) -> tuple[complex, ...]:
        return tuple(root_of_unity(self.n, k) for k in self.indices_b)

    def mass_centers(self) -> tuple[complex, complex]:
        return complex(np.mean(self.Va)), complex(np.mean(self.Vb))

    def to_dict(self) -> dict:
        ca, cb = self.mass_centers()
        return {
            "n": self.n,
            "indices_a": list(self.indices_a),
            "indices_b": list(self.indices_b),
            "verdict": self.verdict.value,
            "mass_center_a": [ca.real, ca.imag],
            "mass_center_b": [cb.real, cb.imag],
        }


def circle_sets(P: Polynomial, md, align: Sequence[int], a: complex, b: complex) -> CircleSets:
    """Canonical indices of the branches meeting ``a`` and ``b`` and their arrangement."""
    from .continuation import branches_at

    if a == b:
        raise ValueError("a and b must differ")
    ia = tuple(sorted(align[i] for i in branches_at(P, md, a)))
    ib = tuple(sorted(align[i] for i in branches_at(P, md, b)))
    n = P.degree
    return CircleSets(n, ia, ib, arrangement(n, ia, ib))


# -- bound on the number of coefficients --------------------------------------------


def truncation_bound(n: int, m: int) -> int:
    """``floor((m/n)^(n!)) + 1`` as an exact integer.

    The algebraic function ``y = Q(P^{-1}(z))`` satisfies an equation
    ``y^N + a_1(z) y^{N-1} + ... + a_N(z) = 0`` with ``N <= n!`` and
    ``deg a_j <= (m/n)^j``; this many leading coefficients of the expansion
    therefore determine whether it vanishes.  The floor makes the value 1
    whenever ``m < n``.
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    base = Fraction(m, n)
    if base == 0:
        return 1
    e = math.factorial(n) if n <= 20 else None
    if base < 1:
        return 1
    bits = (e if e is not None else math.inf) * math.log2(base)
    if bits > MAX_BOUND_BITS:
        raise OverflowError(f"bound has about {bits:.3g} bits; too large to materialize")
    return base.numerator**e // base.denominator**e + 1
