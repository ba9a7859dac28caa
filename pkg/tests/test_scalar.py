from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from higgsdt.ratfun import RFRing
from higgsdt.scalar import NumericField, ScalarError, SymbolicField, Tower, adams


def test_rational_sum():
    assert Fraction(1, 2) + Fraction(1, 3) == Fraction(5, 6)


def test_v_squared_is_q(sym):
    assert sym.v() * sym.v() == sym.q()


@given(st.integers(-20, 20), st.integers(-20, 20))
def test_tower_norm_identity(a, b):
    v = RFRing(NumericField(3)).v()
    levels = [a + b * v ** k for k in (1, 2, 3)]
    conj = [a - b * v ** k for k in (1, 2, 3)]
    prod = Tower(levels) * Tower(conj)
    for k, x in enumerate(prod.levels, start=1):
        assert x == a * a - b * b * 3 ** k


def test_adams_on_v(sym):
    assert adams(sym.v(), 2) == sym.v() ** 2


def test_adams_on_weil_parameter():
    ring = RFRing(SymbolicField(1))
    a1 = ring.gen("a1")
    assert adams(1 / (1 - a1), 2) == 1 / (1 - a1 ** 2)


def test_tower_adams_reindexes():
    t = Tower([1, 2, 3, 4])
    assert t.adams(2).levels == (2, 4)
    assert t.adams(3).levels == (3,)


def test_tower_adams_beyond_depth():
    with pytest.raises(ScalarError):
        Tower([1, 2]).adams(3)


def test_tower_mixed_depth_keeps_common_prefix():
    assert (Tower([1, 2, 3]) + Tower([10, 20])).levels == (11, 22)


def test_adams_fixes_rationals():
    assert adams(Fraction(3, 7), 5) == Fraction(3, 7)


def test_numeric_field_needs_prime_power():
    with pytest.raises((ValueError, ScalarError)):
        NumericField(6)
