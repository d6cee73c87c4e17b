"""Polynomials orthogonal to all powers of a polynomial on a segment."""

from .polycore import (
    CriticalData,
    Polynomial,
    antiderivative,
    chebyshev,
    compose,
    critical_data,
    derivative,
    evaluate,
    parse_polynomial,
    roots,
)

__all__ = [
    "CriticalData",
    "Polynomial",
    "antiderivative",
    "chebyshev",
    "compose",
    "critical_data",
    "derivative",
    "evaluate",
    "parse_polynomial",
    "roots",
]
