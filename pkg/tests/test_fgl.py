from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from adams_calc.fgl import (
    BSeries,
    fgl_iterated_sum,
    fgl_k_series,
    fgl_law,
    fgl_sum,
    k_series_is_endomorphism,
    morphism_holds,
)


def test_unit_axiom():
    x = BSeries.x(6)
    assert fgl_sum(x, BSeries.make({}, 6)) == x


def test_k_series_examples():
    assert str(fgl_k_series(2, 6)) == "2*x + b*x^2"
    assert str(fgl_k_series(3, 6)) == "3*x + 3*b*x^2 + b^2*x^3"
    assert str(fgl_law(4)) == "x + y + b*x*y"


def test_morphism_example():
    assert morphism_holds(3, 6)


@pytest.mark.parametrize("k", [2, 3, 5, 7])
def test_morphism_at_order_ten(k):
    assert morphism_holds(k, 10)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 6])
def test_k_series_matches_iterated_sum(k):
    assert fgl_iterated_sum(k, 8) == fgl_k_series(k, 8)


@pytest.mark.parametrize("k", [-1, 2, 3, 5])
def test_k_series_is_endomorphism(k):
    assert k_series_is_endomorphism(k, 7)


@given(st.integers(-3, 5).filter(bool), st.integers(-3, 5).filter(bool))
def test_k_series_composition(k, l):
    order = 7
    composed = fgl_k_series(k, order).substitute(fgl_k_series(l, order))
    assert composed == fgl_k_series(k * l, order)


def test_law_is_associative_and_commutative():
    order = 6
    x, y = BSeries.x(order), BSeries.y(order)
    assert fgl_sum(x, y) == fgl_sum(y, x)
    # associativity via the one-variable specialisation y = 2x, z = -x
    two_x, minus_x = x.scale(2), x.scale(-1)
    assert fgl_sum(fgl_sum(x, two_x), minus_x) == fgl_sum(x, fgl_sum(two_x, minus_x))


def test_homogeneity_and_psi():
    law = fgl_law(8)
    assert law.is_homogeneous()
    assert law.psi(4) == law.scale(4)
    assert fgl_k_series(3, 8).psi(2) == fgl_k_series(3, 8).scale(2)
    assert not (law + BSeries.const(1, 8)).is_homogeneous()


def test_substitute_rejects_constant_terms():
    with pytest.raises(ValueError):
        fgl_k_series(2, 4).substitute(BSeries.const(Fraction(1), 4))
