from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import hilbert_by_counting

from pnkunits.algebra import (
    AlgebraElement,
    GeneratorSpec,
    IncompatibleAlgebraError,
    KunnethAlgebra,
    euler_characteristic,
    hilbert_series,
    multiply,
    power,
)
from pnkunits.cyclotomic import zeta

MIXED = KunnethAlgebra.truncated([("y", 2, 3), ("a", 1, 2), ("b", 3, 2), ("z", 4, 2)])


@st.composite
def algebras(draw):
    n = draw(st.integers(1, 5))
    specs = []
    for i in range(n):
        d = draw(st.integers(1, 4))
        r = 2 if d % 2 else draw(st.integers(2, 4))
        specs.append((f"g{i}", d, r))
    return KunnethAlgebra.truncated(specs)


@st.composite
def elements(draw, alg, homogeneous_degree=None):
    monos = list(alg.basis()) if homogeneous_degree is None else list(alg.monomials_of_degree(homogeneous_degree))
    if not monos:
        return alg.zero()
    chosen = draw(st.lists(st.sampled_from(monos), max_size=4, unique=True))
    coeffs = draw(st.lists(st.integers(-3, 3), min_size=len(chosen), max_size=len(chosen)))
    return AlgebraElement(alg, dict(zip(chosen, coeffs)))


@st.composite
def algebra_with_homogeneous_pair(draw):
    alg = draw(algebras())
    d1 = draw(st.integers(0, alg.top_degree))
    d2 = draw(st.integers(0, alg.top_degree))
    return alg, d1, d2, draw(elements(alg, d1)), draw(elements(alg, d2))


def test_generator_validation():
    with pytest.raises(ValueError):
        GeneratorSpec("a", 3, 3, "A")
    with pytest.raises(ValueError):
        GeneratorSpec("a", 0, 2, "A")
    with pytest.raises(ValueError):
        KunnethAlgebra.truncated([("a", 2, 2), ("a", 2, 2)])


def test_truncation_and_odd_squares():
    y, a, b, z = MIXED.gens()
    assert power(y, 2) != MIXED.zero()
    assert power(y, 3) == MIXED.zero()
    assert multiply(a, a) == MIXED.zero()
    assert multiply(z, z) == MIXED.zero()


def test_koszul_sign():
    y, a, b, z = MIXED.gens()
    assert multiply(a, b) == -multiply(b, a)
    assert multiply(a, y) == multiply(y, a)
    assert multiply(multiply(b, y), a) == -multiply(a, multiply(y, b))


def test_hilbert_and_euler():
    assert hilbert_series(MIXED) == hilbert_by_counting(MIXED)
    k3 = KunnethAlgebra.truncated([("y", 2, 2)])
    assert hilbert_series(k3) == [1, 0, 1]
    assert euler_characteristic(k3) == 2
    torus = KunnethAlgebra.truncated([("t1", 1, 2), ("t2", 1, 2)])
    assert euler_characteristic(torus) == 0


def test_dimension_and_top():
    assert MIXED.dimension == 3 * 2 * 2 * 2
    assert MIXED.top_degree == 4 + 1 + 3 + 4
    assert MIXED.monomial_degree(MIXED.top_monomial) == MIXED.top_degree
    for i in range(MIXED.dimension):
        assert MIXED.monomial_index(MIXED.monomial_from_index(i)) == i


def test_cross_algebra_operations_rejected():
    other = KunnethAlgebra.truncated([("y", 2, 3)])
    with pytest.raises(IncompatibleAlgebraError):
        multiply(MIXED.gen("y"), other.gen("y"))


def test_string_form():
    y, a, b, z = MIXED.gens()
    e = multiply(y, y) * zeta(4) + a
    assert "y²" in str(e)
    assert str(MIXED.zero()) == "0"
    assert str(MIXED.one()) == "1"


@settings(max_examples=80)
@given(algebra_with_homogeneous_pair())
def test_graded_commutativity(data):
    alg, d1, d2, a, b = data
    sign = -1 if (d1 * d2) % 2 else 1
    assert multiply(a, b) == sign * multiply(b, a)


@settings(max_examples=60)
@given(st.data())
def test_associativity_and_distributivity(data):
    alg = data.draw(algebras())
    a, b, c = (data.draw(elements(alg)) for _ in range(3))
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))
    assert multiply(a, b + c) == multiply(a, b) + multiply(a, c)


@settings(max_examples=40)
@given(algebras())
def test_hilbert_series_matches_counting(alg):
    assert hilbert_series(alg) == hilbert_by_counting(alg)
    assert sum(hilbert_series(alg)) == alg.dimension


@settings(max_examples=40)
@given(st.data())
def test_power_matches_repeated_multiplication(data):
    alg = data.draw(algebras())
    a = data.draw(elements(alg))
    m = data.draw(st.integers(0, 4))
    expected = alg.one()
    for _ in range(m):
        expected = multiply(expected, a)
    assert power(a, m) == expected
