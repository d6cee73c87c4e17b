"""Exact polynomial arithmetic over Gaussian dyadic rationals.

Every binary64 complex number is ``(x + iy) / 2^e`` for integers ``x, y, e``;
products, derivatives and integrals of such polynomials stay exact when
carried out on Python integers.  Only the final result is rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .polycore import Polynomial


def _dyadic(v: float) -> tuple[int, int]:
    num, den = float(v).as_integer_ratio()
    return num, den.bit_length() - 1


def to_dyadic(c: complex) -> tuple[int, int, int]:
    """``(x, y, e)`` with ``c == (x + iy) / 2^e`` exactly."""
    xr, er = _dyadic(c.real)
    xi, ei = _dyadic(c.imag)
    e = max(er, ei)
    return xr << (e - er), xi << (e - ei), e


@dataclass(frozen=True)
class DyadicPoly:
    """Coefficients ``(re[k] + i im[k]) / 2^e``, lowest degree first."""

    re: tuple[int, ...]
    im: tuple[int, ...]
    e: int

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> DyadicPoly:
        parts = [to_dyadic(complex(c)) for c in p.coeffs]
        e = max([0] + [t[2] for t in parts])
        re = tuple(x << (e - ee) for x, _, ee in parts)
        im = tuple(y << (e - ee) for _, y, ee in parts)
        return cls(re, im, e)

    @property
    def is_zero(self) -> bool:
        return not any(self.re) and not any(self.im)

    @property
    def is_real(self) -> bool:
        return not any(self.im)

    def __mul__(self, other: DyadicPoly) -> DyadicPoly:
        if not self.re or not other.re:
            return DyadicPoly((), (), 0)
        n = len(self.re) + len(other.re) - 1
        re = [0] * n
        im = [0] * n
        real = self.is_real and other.is_real
        for i, (a, b) in enumerate(zip(self.re, self.im)):
            if a == 0 and b == 0:
                continue
            for j, (c, d) in enumerate(zip(other.re, other.im)):
                if real:
                    re[i + j] += a * c
                else:
                    re[i + j] += a * c - b * d
                    im[i + j] += a * d + b * c
        return DyadicPoly(tuple(re), tuple(im), self.e + other.e)

    def derivative(self) -> DyadicPoly:
        return DyadicPoly(tuple(k * x for k, x in enumerate(self.re))[1:],
                          tuple(k * y for k, y in enumerate(self.im))[1:], self.e)


def _horner(G_re, G_im, x, y, e):
    """``sum_j G_j (x+iy)^j / 2^{e j}`` as ``(X, Y)`` over ``2^{e N}``."""
    N = len(G_re) - 1
    X, Y = G_re[N], G_im[N]
    for j in range(N - 1, -1, -1):
        X, Y = X * x - Y * y, X * y + Y * x
        shift = e * (N - j)
        X += G_re[j] << shift
        Y += G_im[j] << shift
    return X, Y, e * N


def _to_float(num: int, den: int) -> float:
    try:
        return num / den
    except OverflowError:
        return math.copysign(math.inf, num)


def integral(p: DyadicPoly, a: complex, b: complex) -> complex:
    """``∫_a^b p(z) dz`` computed exactly, then rounded once."""
    if p.is_zero:
        return 0j
    N = len(p.re)
    L = math.lcm(*range(1, N + 1))
    G_re = [0] + [x * (L // (k + 1)) for k, x in enumerate(p.re)]
    G_im = [0] + [y * (L // (k + 1)) for k, y in enumerate(p.im)]
    Xb, Yb, Eb = _horner(G_re, G_im, *to_dyadic(complex(b)))
    Xa, Ya, Ea = _horner(G_re, G_im, *to_dyadic(complex(a)))
    E = max(Ea, Eb)
    X = (Xb << (E - Eb)) - (Xa << (E - Ea))
    Y = (Yb << (E - Eb)) - (Ya << (E - Ea))
    den = L << (E + p.e)
    return complex(_to_float(X, den), _to_float(Y, den))
