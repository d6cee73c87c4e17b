import pytest

from polymoment import config
from polymoment.errors import ConvergenceError, MomentProblemError, ParseError
from polymoment.polycore import Polynomial, root_clusters


def test_configure_validates():
    with pytest.raises(ValueError):
        config.configure(precision="quad")
    assert config.get_settings().precision == "double"


def test_extended_precision_polish():
    try:
        config.configure(precision="extended")
        clusters = root_clusters(Polynomial.from_roots([0.5, 0.5, -1 + 1j]))
    finally:
        config.configure(precision="double")
    z, m = max(clusters, key=lambda t: t[1])
    assert m == 2 and abs(z - 0.5) < 1e-14


def test_error_hierarchy():
    assert issubclass(ParseError, ValueError) and issubclass(ParseError, MomentProblemError)
    assert issubclass(ConvergenceError, ArithmeticError)
