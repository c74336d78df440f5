from __future__ import annotations

import pytest
from sympy import QQ

from dgmanifold.algebra import AlgebraMorphism
from dgmanifold.algebra import Derivation
from dgmanifold.algebra import FunctionAlgebra
from dgmanifold.algebra import identity_morphism
from dgmanifold.errors import NotMaterializableError
from dgmanifold.scalars import ScalarRing


@pytest.fixture
def algebra() -> FunctionAlgebra:
    return FunctionAlgebra(ScalarRing(0), ["a", "b", "c"], [-1, -1, -2])


def test_odd_generators_anticommute(algebra: FunctionAlgebra) -> None:
    a, b = algebra.gen("a"), algebra.gen("b")
    assert b * a == -(a * b)
    assert a * a == 0
    assert algebra.monomial([1, 0]) == -algebra.monomial([0, 1])


def test_even_generator_powers(algebra: FunctionAlgebra) -> None:
    c = algebra.gen("c")
    assert (c**3).terms == {(2, 2, 2): QQ(1)}
    assert (c**3).degree() == -6


def test_monomials(algebra: FunctionAlgebra) -> None:
    assert algebra.monomials(-2) == [(0, 1), (2,)]
    assert algebra.basis(-2) == ("a·b", "c")
    assert algebra.basis(0) == ("1",)
    assert algebra.basis(1) == ()


def test_affine_not_materializable() -> None:
    algebra = FunctionAlgebra(ScalarRing(1), ["e"], [-1])

    with pytest.raises(NotMaterializableError):
        algebra.monomials(-1)


def test_degree_and_twist(algebra: FunctionAlgebra) -> None:
    a, c = algebra.gen("a"), algebra.gen("c")
    mixed = a + c
    assert mixed.twist() == -a + c
    assert mixed.components() == {-2: c, -1: a}

    with pytest.raises(ValueError, match="not homogeneous"):
        mixed.degree()


def test_leibniz(algebra: FunctionAlgebra) -> None:
    """An odd derivation picks up a sign passing an odd factor."""
    a, b = algebra.gen("a"), algebra.gen("b")
    x = Derivation.coordinate(algebra, 1)
    assert x.degree == 1
    assert x(a * b) == -a
    assert x(b * a) == a


def test_odd_derivation_square(algebra: FunctionAlgebra) -> None:
    q = Derivation(algebra, 1, {0: algebra.one})
    assert q.square_is_zero()
    assert q.commutator(q).is_zero()


def test_commutator_with_base() -> None:
    algebra = FunctionAlgebra(ScalarRing(1), ["e"], [-1])
    d = Derivation.base_coordinate(algebra, 0)
    m = Derivation(algebra, 1, {0: algebra.coordinate(0)})
    bracket = d.commutator(m)
    assert bracket.degree == 1
    assert bracket.value(0) == algebra.one


def test_scale_and_sum(algebra: FunctionAlgebra) -> None:
    x = Derivation.coordinate(algebra, 0)
    y = x.scale(algebra.gen("c"))
    assert y.degree == -1
    assert y(algebra.gen("a")) == algebra.gen("c")
    assert (x - x).is_zero()

    with pytest.raises(ValueError, match="different degrees"):
        x + y


def test_evaluate() -> None:
    ring = ScalarRing(1)
    algebra = FunctionAlgebra(ring, ["e"], [-1])
    element = algebra.gen("e") * ring.gen(0)
    assert element.evaluate([2]).terms == {(0,): QQ(2)}


def test_morphism(algebra: FunctionAlgebra) -> None:
    a, b, c = (algebra.gen(n) for n in "abc")
    swap = AlgebraMorphism(algebra, algebra, [], [b, a, c + a * b])
    assert swap(a * b) == -(a * b)
    assert (swap @ swap)(c) == c
    assert identity_morphism(algebra)(c * a) == c * a

    with pytest.raises(ValueError, match="wrong degree"):
        AlgebraMorphism(algebra, algebra, [], [c, b, c])


def test_intertwines(algebra: FunctionAlgebra) -> None:
    q = Derivation(algebra, 1, {0: algebra.one})
    assert identity_morphism(algebra).intertwines(q, q)
    other = Derivation(algebra, 1, {1: algebra.one})
    assert not identity_morphism(algebra).intertwines(q, other)
