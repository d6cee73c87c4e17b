"""Seeded instance generators shared by the test modules."""

from __future__ import annotations

import math

import numpy as np

from polymoment.polycore import Polynomial, chebyshev, roots

SQRT3_2 = math.sqrt(3) / 2


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_poly(g: np.random.Generator, degree: int, complex_coeffs: bool = True) -> Polynomial:
    re = g.uniform(-1, 1, degree + 1)
    im = g.uniform(-1, 1, degree + 1) if complex_coeffs else np.zeros(degree + 1)
    c = re + 1j * im
    c[-1] = c[-1] / abs(c[-1]) if abs(c[-1]) > 0.2 else 1.0
    return Polynomial(c)


def random_point(g: np.random.Generator, radius: float = 1.0) -> complex:
    return complex(g.uniform(-radius, radius), g.uniform(-radius, radius))


def second_preimage(W: Polynomial, a: complex) -> complex:
    """A root of ``W - W(a)`` other than ``a``, the farthest one from ``a``."""
    others = roots(W - complex(W(a)))
    return max(others, key=lambda z: abs(z - a))


def t6_instance():
    P = chebyshev(6)
    q = chebyshev(2).derivative() + chebyshev(3).derivative()
    return P, q, -SQRT3_2, SQRT3_2


def condition_2_instance(g: np.random.Generator):
    """``P = P̃∘W``, ``Q = Q̃∘W``, ``W(a) = W(b)``; orthogonal with ``q = Q'``."""
    dw = int(g.integers(2, 5))
    W = random_poly(g, dw)
    Pt = random_poly(g, int(g.integers(1, 5)))
    Qt = random_poly(g, int(g.integers(1, 5)))
    a = random_point(g)
    b = second_preimage(W, a)
    P = Pt.compose(W)
    Q = Qt.compose(W)
    return P, Q.derivative(), a, b


def condition_3_instance(g: np.random.Generator):
    """Linear change of ``T6`` with ``Q = Q̃_2∘T2 + Q̃_3∘T3`` at ``∓sqrt(3)/2``."""
    alpha = complex(g.uniform(0.5, 1.5), g.uniform(-0.5, 0.5))
    beta = random_point(g)
    L1 = Polynomial([beta, alpha])  # z -> alpha z + beta
    L1_inv = Polynomial([-beta / alpha, 1 / alpha])
    gamma = complex(g.uniform(0.5, 1.5), g.uniform(-0.5, 0.5))
    P = (chebyshev(6) * gamma + random_point(g)).compose(L1_inv)
    Q2 = random_poly(g, int(g.integers(1, 3)))
    Q3 = random_poly(g, 1)
    Q = (Q2.compose(chebyshev(2)) + Q3.compose(chebyshev(3))).compose(L1_inv)
    a = complex(L1(-SQRT3_2))
    b = complex(L1(SQRT3_2))
    return P, Q.derivative(), a, b


def random_instance(g: np.random.Generator):
    """Generic ``(P, q, a, b)``: non-orthogonal with probability one."""
    P = random_poly(g, int(g.integers(3, 6)))
    q = random_poly(g, int(g.integers(0, 4)))
    return P, q, random_point(g), random_point(g)


def equal_value_endpoints(g: np.random.Generator, P: Polynomial):
    a = random_point(g)
    return a, second_preimage(P, a)


def balanced_instance(g: np.random.Generator):
    """Non-orthogonal with ``m_0 = 0``: ``Q = R (z-a)(z-b)``, so ``Q(a) = Q(b)``."""
    P = random_poly(g, int(g.integers(3, 6)))
    a, b = random_point(g), random_point(g)
    Q = random_poly(g, int(g.integers(0, 3))) * Polynomial.from_roots([a, b])
    return P, Q.derivative(), a, b


def near_miss_instance(g: np.random.Generator):
    """Common right divisor ``W`` but ``W(a) != W(b)``."""
    W = random_poly(g, 2)
    P = random_poly(g, 2).compose(W)
    Q = random_poly(g, 2).compose(W)
    return P, Q.derivative(), random_point(g), random_point(g)


def chebyshev_critical_pair(g: np.random.Generator, same_parity: bool):
    """Linear change of ``T_n`` with ``a, b`` two of its critical points.

    The critical point ``cos(k pi / n)`` lies over ``(-1)^k``; equal parity of
    the two indices gives ``P(a) = P(b)``.
    """
    n = int(g.integers(4, 9))
    while True:
        k1, k2 = (int(k) for k in g.choice(np.arange(1, n), size=2, replace=False))
        if ((k1 - k2) % 2 == 0) == same_parity:
            break
    alpha = complex(g.uniform(0.5, 1.5), g.uniform(-0.5, 0.5))
    beta = random_point(g, 0.5)
    L1_inv = Polynomial([-beta / alpha, 1 / alpha])
    P = chebyshev(n).compose(L1_inv)
    a = alpha * math.cos(k1 * math.pi / n) + beta
    b = alpha * math.cos(k2 * math.pi / n) + beta
    return P, a, b
