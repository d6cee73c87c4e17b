"""Dense complex univariate polynomials.

Coefficients are stored lowest degree first in an immutable ``complex128``
array.  Trailing coefficients with ``|c| <= 1e-12 * max|c|`` are dropped on
construction, so the degree reflects the significant part only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import get_settings
from .errors import ConvergenceError, DegreeError, ParseError

ZERO_THRESHOLD = 1e-12
CLUSTER_RADIUS = 1e-7
# a root of multiplicity m is only resolved to about eps^(1/m); wider groups
# are merged when the refined center is a numerical root of p, ..., p^(m-1)
WIDE_CLUSTER_RADIUS = 1e-3
MULTIPLE_ROOT_TOL = 1e-11


class Polynomial:
    """Immutable polynomial with complex coefficients, ``coeffs[i]`` of ``z**i``."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex] | complex = ()):
        arr = np.array(coeffs, dtype=complex).ravel()
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("polynomial coefficients must be finite")
        if arr.size:
            big = np.max(np.abs(arr))
            if big == 0.0:
                arr = arr[:0]
            else:
                keep = np.nonzero(np.abs(arr) > ZERO_THRESHOLD * big)[0]
                arr = arr[: keep[-1] + 1]
        arr.flags.writeable = False
        self._c = arr

    # -- construction helpers ------------------------------------------------

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> Polynomial:
        out = np.zeros(k + 1, dtype=complex)
        out[k] = c
        return cls(out)

    @classmethod
    def constant(cls, c: complex) -> Polynomial:
        return cls([c])

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead: complex = 1.0) -> Polynomial:
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p

    # -- basic properties ----------------------------------------------------

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int | None:
        """Degree, or ``None`` for the zero polynomial."""
        return None if self._c.size == 0 else self._c.size - 1

    @property
    def lead(self) -> complex:
        return complex(self._c[-1]) if self._c.size else 0j

    def is_zero(self) -> bool:
        return self._c.size == 0

    def is_constant(self) -> bool:
        return self._c.size <= 1

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self._c.imag) <= tol * max(1.0, self.norm())))

    def norm(self) -> float:
        """Max-abs coefficient norm."""
        return float(np.max(np.abs(self._c))) if self._c.size else 0.0

    def coeff(self, k: int) -> complex:
        return complex(self._c[k]) if 0 <= k < self._c.size else 0j

    # -- evaluation and calculus -----------------------------------------------

    def __call__(self, z):
        """Horner evaluation; accepts scalars or numpy arrays."""
        if isinstance(z, np.ndarray):
            out = np.zeros(z.shape, dtype=complex)
            for c in self._c[::-1]:
                out = out * z + c
            return out
        acc = 0j
        for c in self._c[::-1]:
            acc = acc * z + c
        return acc

    def derivative(self) -> Polynomial:
        if self._c.size <= 1:
            return Polynomial()
        return Polynomial(self._c[1:] * np.arange(1, self._c.size))

    def antiderivative(self, basepoint: complex = 0.0) -> Polynomial:
        """Antiderivative ``Q`` with ``Q(basepoint) == 0``."""
        if self.is_zero():
            return Polynomial()
        out = np.zeros(self._c.size + 1, dtype=complex)
        out[1:] = self._c / np.arange(1, self._c.size + 1)
        q = Polynomial(out)
        return q - q(basepoint)

    def compose(self, inner: Polynomial) -> Polynomial:
        """``self(inner(z))`` by Horner's scheme in polynomial arithmetic."""
        acc = Polynomial()
        for c in self._c[::-1]:
            acc = acc * inner + complex(c)
        return acc

    def monic(self) -> Polynomial:
        if self.is_zero():
            raise DegreeError("the zero polynomial has no leading coefficient")
        return self / self.lead

    def divmod(self, divisor: Polynomial) -> tuple[Polynomial, Polynomial]:
        """Euclidean division ``self = quotient * divisor + remainder``."""
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        num = self._c.astype(complex).copy()
        den = divisor.coeffs
        dd = den.size - 1
        if num.size - 1 < dd:
            return Polynomial(), self
        quot = np.zeros(num.size - dd, dtype=complex)
        for k in range(num.size - 1, dd - 1, -1):
            c = num[k] / den[-1]
            quot[k - dd] = c
            num[k - dd : k + 1] -= c * den
        return Polynomial(quot), Polynomial(num[:dd])

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return Polynomial([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(self._c.size, other._c.size)
        out = np.zeros(n, dtype=complex)
        out[: self._c.size] += self._c
        out[: other._c.size] += other._c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if self.is_zero() or other.is_zero():
                return Polynomial()
            return Polynomial(np.convolve(self._c, other._c))
        if isinstance(other, (int, float, complex, np.number)):
            return Polynomial(self._c * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return Polynomial(self._c / other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Polynomial([1.0])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def close_to(self, other: Polynomial, tol: float = 1e-9) -> bool:
        """Coefficientwise comparison relative to ``max(1, norms)``."""
        scale = max(1.0, self.norm(), other.norm())
        return (self - other).norm() <= tol * scale

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"

    def __str__(self):
        return format_polynomial(self)


# -- module-level operations --------------------------------------------------


def evaluate(p: Polynomial, z):
    return p(z)


def derivative(p: Polynomial) -> Polynomial:
    return p.derivative()


def antiderivative(p: Polynomial, basepoint: complex = 0.0) -> Polynomial:
    return p.antiderivative(basepoint)


def compose(outer: Polynomial, inner: Polynomial) -> Polynomial:
    return outer.compose(inner)


def chebyshev(n: int) -> Polynomial:
    """Chebyshev polynomial of the first kind, ``T_n(cos t) = cos(n t)``."""
    if n < 0:
        raise ValueError("chebyshev index must be non-negative")
    prev, cur = Polynomial([1.0]), Polynomial([0.0, 1.0])
    if n == 0:
        return prev
    two_z = Polynomial([0.0, 2.0])
    for _ in range(n - 1):
        prev, cur = cur, two_z * cur - prev
    return cur


# -- roots -------------------------------------------------------------------


def _aberth(a: np.ndarray, rng: np.random.Generator, maxiter: int) -> np.ndarray:
    """Aberth-Ehrlich iteration for the monic coefficient vector ``a``."""
    n = a.size - 1
    center = -a[n - 1] / n
    shifted = Polynomial(a).compose(Polynomial([center, 1.0])).coeffs
    radius = max(
        (abs(shifted[n - k]) ** (1.0 / k) for k in range(1, n + 1)), default=1.0
    )
    if radius == 0.0:
        return np.full(n, center, dtype=complex)
    angles = 2 * np.pi * np.arange(n) / n + 0.4 + 0.1 * rng.random(n)
    z = center + radius * np.exp(1j * angles)

    rev = a[::-1]
    drev = (a[1:] * np.arange(1, n + 1))[::-1]
    absrev = np.abs(rev)
    eps = np.finfo(float).eps
    active = np.ones(n, dtype=bool)
    for _ in range(maxiter):
        pz = np.polyval(rev, z)
        bound = np.polyval(absrev, np.abs(z))
        active &= np.abs(pz) > 8 * eps * bound
        if not active.any():
            return z
        dpz = np.polyval(drev, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.sum(1.0 / diff, axis=1)
            ratio = pz / dpz
            w = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(w)
        w[bad] = 1e-3 * (1.0 + np.abs(z[bad]))
        step = np.where(active, w, 0.0)
        z = z - step
        small = np.abs(step) <= 4 * eps * (1.0 + np.abs(z))
        active &= ~small
    pz = np.polyval(rev, z)
    bound = np.polyval(absrev, np.abs(z))
    if np.any(np.abs(pz) > 1e3 * eps * bound):
        raise ConvergenceError("Aberth iteration stalled before convergence")
    return z


def _newton_polish(p: Polynomial, dp: Polynomial, z: complex, steps: int = 3) -> complex:
    best, best_res = z, abs(p(z))
    for _ in range(steps):
        d = dp(best)
        if d == 0:
            break
        cand = best - p(best) / d
        res = abs(p(cand))
        if res >= best_res:
            break
        best, best_res = cand, res
    return best


def _extended_polish(p: Polynomial, m: int, z: complex) -> complex:
    import mpmath

    digits = get_settings().extended_digits
    with mpmath.workdps(digits):
        coeffs = [mpmath.mpc(c.real, c.imag) for c in p.coeffs[::-1]]
        f = lambda x: mpmath.polyval(coeffs, x, derivative=False)  # noqa: E731
        try:
            root = mpmath.findroot(f, mpmath.mpc(z.real, z.imag), solver="muller")
        except (ValueError, ZeroDivisionError):
            return z
        if m > 1 or abs(complex(root) - z) > 1e-6 * (1 + abs(z)):
            return z
        return complex(root)


def root_clusters(p: Polynomial, maxiter: int = 1000) -> list[tuple[complex, int]]:
    """Distinct roots of ``p`` with multiplicities, in deterministic order.

    Approximations from the simultaneous iteration that lie within
    ``1e-7 * (1 + |z|)`` of each other are merged; a merged cluster of size
    ``m`` is refined by Newton steps on the ``(m-1)``-th derivative.
    """
    n = p.degree
    if n is None or n < 1:
        raise DegreeError("roots require a polynomial of degree >= 1")
    settings = get_settings()
    # zero roots are split off exactly
    c = p.coeffs
    nz = int(np.argmax(np.abs(c) > 0))
    clusters: list[tuple[complex, int]] = []
    rest = Polynomial(c[nz:])
    if rest.degree:
        a = rest.coeffs / rest.lead
        z = _aberth(a, np.random.default_rng(settings.seed), maxiter)
        dp = rest.derivative()
        z = np.array([_newton_polish(rest, dp, complex(x)) for x in z])
        clusters = _cluster(z)
        clusters = [(_refine_cluster(rest, ctr, m), m) for ctr, m in clusters]
        clusters = _merge_multiple(rest, clusters)
        if settings.precision == "extended":
            clusters = [(_extended_polish(rest, m, ctr), m) for ctr, m in clusters]
    if nz:
        clusters.append((0j, nz))
        clusters = _merge_close(clusters)
    clusters = [(complex(z), m) for z, m in clusters]
    return sorted(clusters, key=lambda cm: _order_key(cm[0]))


def _cluster(z: np.ndarray) -> list[tuple[complex, int]]:
    n = z.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= CLUSTER_RADIUS * (1.0 + max(abs(z[i]), abs(z[j]))):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [(complex(np.mean(z[idx])), len(idx)) for idx in groups.values()]


def _is_multiple_root(p: Polynomial, z: complex, m: int) -> bool:
    q = p
    for _ in range(m):
        size = float(np.sum(np.abs(q.coeffs) * abs(z) ** np.arange(q.coeffs.size)))
        if abs(q(z)) > MULTIPLE_ROOT_TOL * size:
            return False
        q = q.derivative()
    return True


def _merge_multiple(p: Polynomial, clusters):
    """Join clusters within the wide radius whose merged center passes the derivative test.

    Each connected group is first tried as a whole (the weighted centroid of
    an m-fold root's approximations is accurate, since their sum is fixed by
    a coefficient); failing that, it is left as it was.
    """
    clusters = list(clusters)
    n = len(clusters)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            zi, zj = clusters[i][0], clusters[j][0]
            if abs(zi - zj) <= WIDE_CLUSTER_RADIUS * (1.0 + max(abs(zi), abs(zj))):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for idx in groups.values():
        if len(idx) == 1:
            out.append(clusters[idx[0]])
            continue
        m = sum(clusters[i][1] for i in idx)
        ctr = sum(clusters[i][0] * clusters[i][1] for i in idx) / m
        ctr = _refine_cluster(p, ctr, m, WIDE_CLUSTER_RADIUS)
        if _is_multiple_root(p, ctr, m):
            out.append((ctr, m))
        else:
            out.extend(clusters[i] for i in idx)
    return out


def _merge_close(clusters):
    z = np.array([c for c, _ in clusters])
    merged = []
    used = [False] * len(clusters)
    for i, (ci, mi) in enumerate(clusters):
        if used[i]:
            continue
        total, weight = ci * mi, mi
        for j in range(i + 1, len(clusters)):
            if not used[j] and abs(z[i] - z[j]) <= CLUSTER_RADIUS * (1 + abs(z[i])):
                used[j] = True
                total += clusters[j][0] * clusters[j][1]
                weight += clusters[j][1]
        merged.append((total / weight, weight))
    return merged


def _refine_cluster(p: Polynomial, z: complex, m: int, radius: float = 10 * CLUSTER_RADIUS) -> complex:
    if m == 1:
        return z
    q = p
    for _ in range(m - 1):
        q = q.derivative()
    cand = _newton_polish(q, q.derivative(), z, steps=8)
    if abs(cand - z) <= radius * (1 + abs(z)):
        return cand
    return z


def _order_key(z: complex, tol: float = 1e-9) -> tuple[float, float]:
    return (round(z.real / tol) * tol, round(z.imag / tol) * tol)


def roots(p: Polynomial) -> list[complex]:
    """All roots of ``p`` repeated by multiplicity, ordered by rounded (re, im)."""
    out = []
    for z, m in root_clusters(p):
        out.extend([z] * m)
    return out


# -- critical data --------------------------------------------------------------


@dataclass(frozen=True)
class CriticalData:
    """Critical points and the distinct critical values.

    ``points`` pairs each critical point with its multiplicity as a root of
    ``p'`` (so the local degree of ``p`` there is ``multiplicity + 1``);
    ``point_values[i]`` is the entry of ``values`` that point ``i`` maps to.
    """

    points: tuple[tuple[complex, int], ...]
    values: tuple[complex, ...]
    point_values: tuple[complex, ...] = ()

    def points_over(self, value: complex) -> list[tuple[complex, int]]:
        return [pt for pt, v in zip(self.points, self.point_values) if v == value]


def value_cluster_radius(values: Sequence[complex]) -> float:
    scale = max([1.0] + [abs(v) for v in values])
    return CLUSTER_RADIUS * scale


def critical_data(p: Polynomial) -> CriticalData:
    if p.degree is None or p.degree < 2:
        raise DegreeError("critical data requires degree >= 2")
    pts = root_clusters(p.derivative())
    raw = [complex(p(z)) for z, _ in pts]
    if p.is_real():
        # values of a real polynomial at real points carry only rounding in the imaginary part
        raw = [complex(v.real, 0.0) if abs(v.imag) <= 1e-14 * max(1.0, abs(v)) else v for v in raw]
    radius = value_cluster_radius(raw)
    values: list[complex] = []
    for v in raw:
        if not any(abs(v - u) <= radius for u in values):
            values.append(v)
    # snap each point value to its cluster representative
    snapped = tuple(min(values, key=lambda u: abs(u - v)) for v in raw)
    values.sort(key=_order_key)
    return CriticalData(points=tuple(pts), values=tuple(values), point_values=snapped)


def scale_of(values: Sequence[complex]) -> float:
    """Characteristic size ``max(1, max|v|)`` of a value set."""
    return max([1.0] + [abs(v) for v in values])


# -- text format ---------------------------------------------------------------


def _format_number(c: complex) -> str:
    re, im = c.real, c.imag
    fmt = lambda x: repr(float(x)) if x != int(x) or abs(x) > 1e15 else str(int(x))  # noqa: E731
    if im == 0:
        return fmt(re)
    sign = "+" if im >= 0 else "-"
    return f"{fmt(re)}{sign}{fmt(abs(im))}i"


def format_polynomial(p: Polynomial) -> str:
    """Canonical text: comma-separated coefficients, lowest degree first."""
    if p.is_zero():
        return "0"
    return ",".join(_format_number(complex(c)) for c in p.coeffs)


def parse_complex(text: str) -> complex:
    """Parse ``re``, ``re+imi`` or ``imi`` (``j`` also accepted)."""
    t = text.strip().replace(" ", "").replace("I", "i").replace("j", "i")
    if not t:
        raise ParseError("empty coefficient")
    if t.endswith("i"):
        body = t[:-1]
        if body in ("", "+", "-"):
            body += "1"
        # split at the last sign that is not an exponent sign or leading
        cut = None
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "eE":
                cut = k
                break
        try:
            if cut is None:
                return complex(0.0, float(body))
            return complex(float(body[:cut]), float(body[cut:]))
        except ValueError as exc:
            raise ParseError(f"bad complex literal {text!r}") from exc
    try:
        return complex(float(t), 0.0)
    except ValueError as exc:
        raise ParseError(f"bad coefficient {text!r}") from exc


def parse_polynomial(text: str) -> Polynomial:
    """Parse the canonical coefficient list or a ``chebyshev:N`` preset."""
    t = text.strip()
    if t.lower().startswith("chebyshev:"):
        arg = t.split(":", 1)[1]
        if not arg.isdigit():
            raise ParseError(f"bad chebyshev preset {text!r}")
        return chebyshev(int(arg))
    if not t:
        raise ParseError("empty polynomial")
    return Polynomial([parse_complex(part) for part in t.split(",")])

