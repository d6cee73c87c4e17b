import pytest
from hypothesis import given, strategies as st

from polymoment import permutations as perms
from polymoment.errors import ParseError

perm = st.integers(1, 9).flatmap(lambda n: st.permutations(range(n))).map(tuple)


def test_product_applies_first_argument_first():
    a = perms.from_cycles([(0, 1)], 3)
    b = perms.from_cycles([(1, 2)], 3)
    # 0 -a-> 1 -b-> 2
    assert perms.product(a, b)[0] == 2


def test_cycle_notation_round_trip():
    g = perms.parse_cycles("(1238)(4)(57)(6)", 8)
    assert perms.format_cycles(g) == "(1238)(4)(57)(6)"
    assert perms.cycle_type(g) == (4, 2, 1, 1)
    assert perms.ramification(g) == 4


def test_wide_notation():
    g = perms.parse_cycles("(1 10)(2 3)", 10)
    assert g[0] == 9 and g[9] == 0
    assert perms.format_cycles(g).startswith("(1 10)")


@pytest.mark.parametrize("bad", ["", "(12", "(1)(1)", "(9)", "()"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        perms.parse_cycles(bad, 3)


@given(perm)
def test_inverse(p):
    assert perms.product(p, perms.inverse(p)) == perms.identity(len(p))


@given(perm, perm.map(lambda p: p))
def test_conjugation_preserves_cycle_type(p, q):
    if len(p) != len(q):
        return
    assert perms.cycle_type(perms.conjugate(p, q)) == perms.cycle_type(p)


@given(perm)
def test_format_parse_round_trip(p):
    assert perms.parse_cycles(perms.format_cycles(p), len(p)) == p
