"""Right divisors in the composition algebra and the composition certificates.

A right divisor of ``P`` of degree ``d`` is normalized monic with ``W(0) = 0``.
If ``P = P̃∘W`` with ``deg P̃ = r``, the top ``d`` coefficients of ``P`` are
those of ``lead(P̃) W^r``, so ``W`` is the polynomial part of an ``r``-th root
of ``P`` at infinity; ``P̃`` then comes from the ``W``-adic digits and is
accepted only if ``P̃∘W`` reproduces ``P``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegreeError, SolverError
from .polycore import Polynomial, chebyshev, critical_data, scale_of

RECONSTRUCTION_TOL = 1e-8
ENDPOINT_TOL = 1e-8
INDEPENDENCE_TOL = 1e-9
CONDITION_LIMIT = 1e12
T6_FIT_TOL = 1e-7


def _root_series(s: np.ndarray, alpha: float, K: int) -> np.ndarray:
    """First ``K`` coefficients of ``(1 + s_1 x + s_2 x^2 + ...)^alpha``."""
    h = np.zeros(K, dtype=complex)
    h[0] = 1.0
    for k in range(1, K):
        acc = 0j
        for j in range(1, min(k, len(s) - 1) + 1):
            acc += (alpha * j - (k - j)) * s[j] * h[k - j]
        h[k] = acc / k
    return h


def w_adic(Q: Polynomial, W: Polynomial) -> list[Polynomial]:
    """Digits ``c_i`` with ``Q = sum c_i W^i`` and ``deg c_i < deg W``."""
    if W.degree is None or W.degree < 1:
        raise DegreeError("W must have degree >= 1")
    digits = []
    rest = Q
    while not rest.is_zero():
        rest, r = rest.divmod(W)
        digits.append(r)
    return digits


def polynomial_in(Q: Polynomial, W: Polynomial, tol: float = RECONSTRUCTION_TOL) -> Polynomial | None:
    """``Q̃`` with ``Q = Q̃∘W`` if the constant parts of the digits rebuild ``Q``."""
    if Q.is_zero():
        return Polynomial()
    Qt = Polynomial([d.coeff(0) for d in w_adic(Q, W)])
    if (Qt.compose(W) - Q).norm() <= tol * Q.norm():
        return Qt
    return None


def candidate_divisor(P: Polynomial, d: int) -> Polynomial:
    """Monic ``W`` of degree ``d`` with ``W(0)=0`` matching the top of ``P``."""
    n = P.degree
    r = n // d
    c = P.monic().coeffs
    s = c[::-1][: d + 1]  # s[j] = coefficient of z^{n-j}
    h = _root_series(s, 1.0 / r, d)
    coeffs = np.zeros(d + 1, dtype=complex)
    for k in range(d):
        coeffs[d - k] = h[k]
    return Polynomial(coeffs)


def right_divisors(P: Polynomial) -> list[tuple[Polynomial, Polynomial]]:
    """``(W, P̃)`` with ``P = P̃∘W`` for every divisor ``d > 1`` of ``n`` that admits one."""
    n = P.degree
    if n is None or n < 2:
        raise DegreeError("right divisors need degree >= 2")
    out = []
    for d in range(2, n + 1):
        if n % d:
            continue
        W = candidate_divisor(P, d)
        Pt = polynomial_in(P, W)
        if Pt is not None:
            out.append((W, Pt))
    return out


def is_decomposable(P: Polynomial) -> bool:
    return any(W.degree < P.degree for W, _ in right_divisors(P))


def linear_relation(W1: Polynomial, W2: Polynomial, tol: float = 1e-8) -> tuple[complex, complex] | None:
    """``(alpha, beta)`` with ``W1 = alpha W2 + beta`` if such a relation holds."""
    if W1.degree != W2.degree or W1.degree is None:
        return None
    alpha = W1.lead / W2.lead
    beta = W1.coeff(0) - alpha * W2.coeff(0)
    if (W1 - (W2 * alpha + beta)).norm() <= tol * max(1.0, W1.norm()):
        return alpha, beta
    return None


def common_right_divisor(P: Polynomial, Q: Polynomial):
    """Largest-degree ``W`` dividing both: ``(W, P̃, Q̃)`` or None."""
    if Q.is_zero():
        raise ValueError("Q must be nonzero")
    for W, Pt in sorted(right_divisors(P), key=lambda t: -t[0].degree):
        Qt = polynomial_in(Q, W)
        if Qt is not None:
            return W, Pt, Qt
    return None


def endpoints_agree(W: Polynomial, a: complex, b: complex, tol: float = ENDPOINT_TOL) -> bool:
    wa, wb = complex(W(a)), complex(W(b))
    return abs(wa - wb) <= tol * max(1.0, abs(wa), abs(wb))


# -- certificates --------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    P_outer: Polynomial
    Q_outer: Polynomial
    W: Polynomial
    endpoints_agree: bool


@dataclass(frozen=True)
class CompositionCertificate:
    kind: str  # CONDITION_2, CONDITION_3 or NONE
    witnesses: tuple[Witness, ...] = ()
    residual: float | None = None
    degenerate: bool = False
    rank_deficient: bool = False

    @property
    def found(self) -> bool:
        return self.kind != "NONE"

    def to_dict(self) -> dict:
        from .polycore import format_polynomial

        return {
            "kind": self.kind,
            "degenerate": self.degenerate,
            "residual": self.residual,
            "rank_deficient": self.rank_deficient,
            "witnesses": [
                {"P_outer": format_polynomial(w.P_outer), "Q_outer": format_polynomial(w.Q_outer),
                 "W": format_polynomial(w.W), "endpoints_agree": w.endpoints_agree}
                for w in self.witnesses
            ],
        }


def condition_2(P: Polynomial, Q: Polynomial, a: complex, b: complex) -> CompositionCertificate:
    """Single right divisor ``W`` with ``W(a) = W(b)`` of which ``Q`` is a polynomial."""
    Q = Q - complex(Q(a))
    divs = sorted(right_divisors(P), key=lambda t: -t[0].degree)
    if Q.is_zero():
        W, Pt = divs[0]
        w = Witness(Pt, Polynomial(), W, endpoints_agree(W, a, b))
        return CompositionCertificate("CONDITION_2", (w,), 0.0, degenerate=True)
    for W, Pt in divs:
        if not endpoints_agree(W, a, b):
            continue
        Qt = polynomial_in(Q, W)
        if Qt is not None:
            res = (Qt.compose(W) - Q).norm() / Q.norm()
            return CompositionCertificate("CONDITION_2", (Witness(Pt, Qt, W, True),), res)
    return CompositionCertificate("NONE")


def _vec(p: Polynomial, size: int) -> np.ndarray:
    v = np.zeros(size, dtype=complex)
    c = p.coeffs
    v[: len(c)] = c
    return v


def condition_3(P: Polynomial, Q: Polynomial, a: complex, b: complex) -> CompositionCertificate:
    """``Q`` as a sum of ``Q̃_j∘W_j`` over right divisors with ``W_j(a) = W_j(b)``.

    Columns ``W_j^i`` (``i deg W_j <= deg Q``) are taken in order of
    increasing ``deg W_j``, dropping any that is numerically dependent on
    those already kept, and the coefficients come from a QR least-squares
    solve.  The constant term goes to the first summand.
    """
    Q = Q - complex(Q(a))
    divs = [(W, Pt) for W, Pt in right_divisors(P) if endpoints_agree(W, a, b)]
    divs.sort(key=lambda t: t[0].degree)
    if Q.is_zero():
        if not divs:
            return CompositionCertificate("NONE")
        W, Pt = divs[0]
        return CompositionCertificate("CONDITION_3", (Witness(Pt, Polynomial(), W, True),), 0.0, degenerate=True)
    if not divs:
        return CompositionCertificate("NONE")
    m = Q.degree
    size = m + 1
    cols = [np.eye(size, dtype=complex)[0]]
    labels = [(-1, 0)]
    basis = [cols[0] / np.linalg.norm(cols[0])]
    dropped = False
    for j, (W, _) in enumerate(divs):
        Wi = Polynomial([1])
        for i in range(1, m // W.degree + 1):
            Wi = Wi * W
            v = _vec(Wi, size)
            w = v.copy()
            for e in basis:
                w -= np.vdot(e, w) * e
            if np.linalg.norm(w) <= INDEPENDENCE_TOL * np.linalg.norm(v):
                dropped = True
                continue
            basis.append(w / np.linalg.norm(w))
            cols.append(v)
            labels.append((j, i))
    A = np.array(cols).T
    rhs = _vec(Q, size)
    if not np.all(np.isfinite(A)):
        raise SolverError("non-finite entries in the coefficient matrix")
    qmat, rmat = np.linalg.qr(A)
    diag = np.abs(np.diag(rmat))
    cond = diag.max() / diag.min() if diag.min() > 0 else math.inf
    if cond > CONDITION_LIMIT:
        raise SolverError(f"coefficient matrix condition estimate {cond:.3g} exceeds {CONDITION_LIMIT:g}")
    x = np.linalg.solve(rmat, qmat.conj().T @ rhs)
    residual = float(np.linalg.norm(A @ x - rhs) / np.linalg.norm(rhs))
    if residual > RECONSTRUCTION_TOL:
        return CompositionCertificate("NONE", residual=residual, rank_deficient=dropped)
    digits = [dict() for _ in divs]
    for (j, i), coef in zip(labels, x):
        digits[max(j, 0)][i] = digits[max(j, 0)].get(i, 0) + coef
    witnesses = []
    for (W, Pt), dg in zip(divs, digits):
        if not dg or all(abs(c) == 0 for c in dg.values()):
            continue
        Qt = Polynomial([dg.get(i, 0) for i in range(max(dg) + 1)])
        if Qt.is_zero():
            continue
        witnesses.append(Witness(Pt, Qt, W, True))
    return CompositionCertificate("CONDITION_3", tuple(witnesses), residual, rank_deficient=dropped)


# -- definiteness --------------------------------------------------------------

REASONS = {
    "regular-endpoint": "an endpoint is not a critical point of P",
    "prime-power-degree": "deg P is a prime power",
    "indecomposable": "P has no proper right divisor",
    "simple-weight-reduction": "a color has weight 1 on the path and every reduction is definite",
    "single-critical-fiber-point": "P(a)=P(b) and no other point over it is critical",
    "one-critical-point-per-value": "P(a)=P(b) and every other critical value has a single critical point over it",
    "degree-below-ten": "deg P < 10 and the exceptional configuration is absent",
    "chebyshev-six": "P is linearly equivalent to T6 with a, b at -sqrt(3)/2, sqrt(3)/2",
}


def is_prime_power(n: int) -> bool:
    if n < 2:
        return False
    p = next(k for k in range(2, n + 1) if n % k == 0)
    while n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class DefinitenessVerdict:
    verdict: str  # DEFINITE, EXCEPTIONAL_T6 or UNKNOWN
    reasons: tuple[str, ...] = ()
    trail: tuple[dict, ...] = ()
    L1: Polynomial | None = None
    L2: Polynomial | None = None
    fit_error: float | None = None
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        from .polycore import format_polynomial

        d = {
            "verdict": self.verdict,
            "reasons": [{"tag": r, "statement": REASONS[r]} for r in self.reasons],
            "trail": list(self.trail),
            "notes": list(self.notes),
        }
        if self.L1 is not None:
            d["L1"] = format_polynomial(self.L1)
            d["L2"] = format_polynomial(self.L2)
            d["fit_error"] = self.fit_error
        return d


def _is_critical(P: Polynomial, x: complex) -> bool:
    pts = critical_data(P).points
    return any(abs(z - x) <= 1e-6 * (1.0 + abs(x)) for z, _ in pts)


def _same_value(P: Polynomial, a: complex, b: complex) -> bool:
    pa, pb = complex(P(a)), complex(P(b))
    return abs(pa - pb) <= 1e-7 * scale_of([pa, pb])


def _fiber_condition(P: Polynomial, a: complex, b: complex) -> bool:
    """Every critical point over ``P(a)`` other than ``a``, ``b`` is absent."""
    cd = critical_data(P)
    v = complex(P(a))
    radius = 1e-7 * scale_of(cd.values)
    near = 1e-6 * max(1.0, abs(a), abs(b))
    for (z, _), pv in zip(cd.points, cd.point_values):
        if abs(pv - v) <= radius and abs(z - a) > near and abs(z - b) > near:
            return False
    return True


def _single_points_condition(P: Polynomial, a: complex) -> bool:
    cd = critical_data(P)
    v = complex(P(a))
    radius = 1e-7 * scale_of(cd.values)
    for c in cd.values:
        if abs(c - v) <= radius:
            continue
        if len(cd.points_over(c)) != 1:
            return False
    return True


def chebyshev_six_fit(P: Polynomial, a: complex, b: complex) -> tuple[Polynomial, Polynomial, float] | None:
    """Linear ``L1``, ``L2`` with ``L2∘P∘L1 = T6`` and ``L1(-sqrt3/2)=a``, ``L1(sqrt3/2)=b``."""
    if P.degree != 6:
        return None
    r = math.sqrt(3) / 2
    L1 = Polynomial([(a + b) / 2, (b - a) / (2 * r)])
    values = critical_data(P).values
    if len(values) != 2:
        return None
    T6 = chebyshev(6)
    best = None
    for cx, cy in (values, values[::-1]):
        # L2(cx) = -1, L2(cy) = 1
        g = 2 / (cy - cx)
        L2 = Polynomial([-1 - g * cx, g])
        err = (L2.compose(P.compose(L1)) - T6).norm()
        if best is None or err < best[2]:
            best = (L1, L2, err)
    if best[2] <= T6_FIT_TOL:
        return best
    return None


def classify(P: Polynomial, a: complex, b: complex, md=None, cactus=None, path=None,
             _depth: int = 0) -> DefinitenessVerdict:
    """Decide from machine-checked sufficient conditions whether ``(P, a, b)`` is definite.

    Definite means that every ``q != 0`` with vanishing moments satisfies the
    single composition condition.  The path and cactus are computed when
    not supplied.
    """
    n = P.degree
    if n is None or n < 1:
        raise DegreeError("P must be nonconstant")
    a, b = complex(a), complex(b)
    if a == b:
        raise ValueError("endpoints must differ")
    if n == 1:
        return DefinitenessVerdict("DEFINITE", notes=("linear P: only q = 0 has vanishing moments",))
    if not _is_critical(P, a) or not _is_critical(P, b):
        return DefinitenessVerdict("DEFINITE", ("regular-endpoint",))
    if is_prime_power(n):
        return DefinitenessVerdict("DEFINITE", ("prime-power-degree",))
    divs = right_divisors(P)
    if all(W.degree == n for W, _ in divs):
        return DefinitenessVerdict("DEFINITE", ("indecomposable",))
    if path is None:
        from .cactus import extended_setup, path_ab

        _, cactus, _ = extended_setup(P, a, b)
        path = path_ab(cactus)
    wts = path.weights
    if any(w == 1 for w in wts.values()):
        trail = []
        ok = True
        for W, Pt in divs:
            if endpoints_agree(W, a, b):
                continue
            wa, wb = complex(W(a)), complex(W(b))
            sub = classify(Pt, wa, wb, _depth=_depth + 1) if Pt.degree > 1 else DefinitenessVerdict("DEFINITE")
            trail.append({"W_degree": W.degree, "W(a)": [wa.real, wa.imag], "W(b)": [wb.real, wb.imag],
                          "verdict": sub.verdict})
            if sub.verdict != "DEFINITE":
                ok = False
        if ok:
            return DefinitenessVerdict("DEFINITE", ("simple-weight-reduction",), tuple(trail))
    if _same_value(P, a, b):
        if _fiber_condition(P, a, b):
            return DefinitenessVerdict("DEFINITE", ("single-critical-fiber-point",))
        if _single_points_condition(P, a):
            return DefinitenessVerdict("DEFINITE", ("one-critical-point-per-value",))
    if n < 10:
        # n < 10 and not a prime power leaves n = 6
        colors = {v[1] for v in path.vertex_sequence if v[0] == "vertex"}
        if len(path.skeleton_edges) == 4 and len(colors) == 2:
            fit = chebyshev_six_fit(P, a, b)
            if fit is not None:
                L1, L2, err = fit
                return DefinitenessVerdict("EXCEPTIONAL_T6", ("chebyshev-six",), L1=L1, L2=L2, fit_error=err)
            return DefinitenessVerdict(
                "UNKNOWN", notes=("two-colored skeleton of length 4 but no linear fit to T6 was found",))
        return DefinitenessVerdict("DEFINITE", ("degree-below-ten",))
    return DefinitenessVerdict("UNKNOWN")


def reduce(P: Polynomial, Q: Polynomial, a: complex, b: complex) -> list[dict]:
    """Repeated change of variable ``z -> W(z)`` along common right divisors.

    Each step records the divisor and the new endpoints; the walk stops when
    ``W(a) = W(b)`` (the single composition condition) or no common divisor
    is left.
    """
    from .polycore import format_polynomial

    trail = []
    a, b = complex(a), complex(b)
    while P.degree is not None and P.degree >= 2 and not Q.is_constant():
        found = common_right_divisor(P, Q)
        if found is None or found[0].degree == 1:
            break
        W, Pt, Qt = found
        wa, wb = complex(W(a)), complex(W(b))
        agree = endpoints_agree(W, a, b)
        trail.append({"W": format_polynomial(W), "P_outer": format_polynomial(Pt), "Q_outer": format_polynomial(Qt),
                      "a": [wa.real, wa.imag], "b": [wb.real, wb.imag], "endpoints_agree": agree})
        if agree:
            break
        P, Q, a, b = Pt, Qt, wa, wb
    return trail
