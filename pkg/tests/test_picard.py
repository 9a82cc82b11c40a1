from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from schottky4 import picard
from schottky4.errors import SpaceMismatchError, ValidationError
from schottky4.picard import DivisorClass, IGUSA, PARTIAL, VORONOI


def test_class_of_schottky():
    assert picard.class_of_schottky(PARTIAL).coeffs() == (8, -1, 0)
    assert picard.class_of_schottky(IGUSA).coeffs() == (8, -1, 0)
    assert picard.class_of_schottky(VORONOI).coeffs() == (8, -1, -4)
    assert str(picard.class_of_schottky(VORONOI)) == "8L - D - 4E"


def test_pullback():
    assert picard.pullback(picard.D(IGUSA)) == picard.D(VORONOI) + 4 * picard.E()
    assert picard.pullback(8 * picard.L(IGUSA) - picard.D(IGUSA)) == picard.class_of_schottky(VORONOI)
    assert picard.pullback(DivisorClass(IGUSA)).is_zero()
    with pytest.raises(SpaceMismatchError):
        picard.pullback(picard.L(VORONOI))


@pytest.mark.parametrize("space", picard.SPACES)
def test_divisor_of_F_is_8L(space):
    assert picard.divisor_of_F(space) == 8 * picard.L(space)


def test_arithmetic_and_errors():
    L = picard.L(IGUSA)
    assert (L + (-1) * L).is_zero()
    assert picard.add(L, L) == picard.scale(2, L)
    assert picard.equal(L, L)
    with pytest.raises(SpaceMismatchError):
        picard.equal(L, picard.L(VORONOI))
    with pytest.raises(SpaceMismatchError):
        L + picard.L(PARTIAL)
    with pytest.raises(ValidationError):
        DivisorClass(IGUSA, 0, 0, 1)
    with pytest.raises(ValidationError):
        DivisorClass(IGUSA, 0.5)
    with pytest.raises(ValidationError):
        DivisorClass("satake")
    assert str(DivisorClass(VORONOI, Fraction(1, 2), -3, 0)) == "1/2L - 3D"
    assert str(DivisorClass(IGUSA)) == "0"


fractions = st.fractions(max_denominator=50)


@given(fractions, fractions, fractions, fractions, fractions)
def test_pullback_linear(a, b, c, d, q):
    x, y = DivisorClass(IGUSA, a, b), DivisorClass(IGUSA, c, d)
    assert picard.pullback(x + q * y) == picard.pullback(x) + q * picard.pullback(y)
