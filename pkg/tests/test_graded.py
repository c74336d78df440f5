from __future__ import annotations

import pytest
from sympy import QQ

from dgmanifold.errors import NotChainMapError
from dgmanifold.graded import ChainMap
from dgmanifold.graded import FiniteComplex
from dgmanifold.graded import GradedMap
from dgmanifold.graded import GradedVectorSpace
from dgmanifold.graded import check_chain_map
from dgmanifold.graded import cohomology_at_degree
from dgmanifold.graded import cohomology_dimensions
from dgmanifold.graded import is_acyclic
from dgmanifold.graded import is_quasi_isomorphism
from dgmanifold.linalg import Matrix


@pytest.fixture
def space() -> GradedVectorSpace:
    return GradedVectorSpace.from_labels({"a": 1, "b": 2, "c": 2})


def test_space(space: GradedVectorSpace) -> None:
    assert space.degrees == [1, 2]
    assert space.labels(2) == ("b", "c")
    assert space.dim(3) == 0
    assert space.index("c") == 1
    assert len(space) == 3
    assert list(space) == ["a", "b", "c"]


def test_repeated_label() -> None:
    with pytest.raises(ValueError, match="two degrees"):
        GradedVectorSpace({0: ["a"], 1: ["a"]})


def test_dual_shift(space: GradedVectorSpace) -> None:
    assert space.dual().degree_map == {"a*": -1, "b*": -2, "c*": -2}
    assert space.dual().dual() == space
    assert space.shift(1).degree("a[1]") == 0


def test_symmetric_power() -> None:
    """Odd generators appear at most once in a monomial."""
    space = GradedVectorSpace.from_labels({"a": 1, "b": 2})
    assert space.symmetric_power(2).degree_map == {"a·b": 3, "b·b": 4}
    assert space.symmetric_power(0).degree_map == {"1": 0}


def test_tensor_space(space: GradedVectorSpace) -> None:
    other = GradedVectorSpace.from_labels({"x": -1})
    assert space.tensor(other).degree_map == {"a⊗x": 0, "b⊗x": 1, "c⊗x": 1}


def test_map_from_images(space: GradedVectorSpace) -> None:
    f = GradedMap.from_images(space, space, 1, {"a": {"b": 2, "c": "1/2"}})
    assert f.image("a") == {"b": QQ(2), "c": QQ(1, 2)}
    assert f.image("b") == {}
    assert (f @ f).is_zero()
    assert (f - f).is_zero()

    with pytest.raises(ValueError, match="wrong degree"):
        GradedMap.from_images(space, space, 1, {"a": {"a": 1}})


def test_map_shift_by(space: GradedVectorSpace) -> None:
    """An odd map picks up a sign under an odd shift only."""
    f = GradedMap.from_images(space, space, 1, {"a": {"b": 2, "c": "1/2"}})
    odd = f.shift_by(1)
    assert odd.source == space.shift(1)
    assert odd.image("a[1]") == {"b[1]": QQ(-2), "c[1]": QQ(-1, 2)}
    assert f.shift_by(2).image("a[2]") == {"b[2]": QQ(2), "c[2]": QQ(1, 2)}


def _arrow() -> FiniteComplex:
    """``x -> y`` with ``z`` beside ``y`` in degree 1."""
    space = GradedVectorSpace({0: ["x"], 1: ["y", "z"]})
    d = GradedMap.from_images(space, space, 1, {"x": {"y": 1}})
    return FiniteComplex(space, d)


def test_square_zero_enforced() -> None:
    space = GradedVectorSpace({0: ["x"], 1: ["y"], 2: ["z"]})
    d = GradedMap.from_images(space, space, 1, {"x": {"y": 1}, "y": {"z": 1}})

    with pytest.raises(ValueError, match="d o d"):
        FiniteComplex(space, d)


def test_cohomology_representatives() -> None:
    h = cohomology_at_degree(_arrow(), 1)
    assert h.dimension == 1
    assert h.representatives == [{"z": QQ(1)}]
    assert cohomology_dimensions(_arrow(), (-1, 2)) == {-1: 0, 0: 0, 1: 1, 2: 0}


def test_dual_complex() -> None:
    """Dualizing mirrors the cohomology dimensions."""
    dual = _arrow().dual()
    assert cohomology_dimensions(dual, (-2, 1)) == {-2: 0, -1: 1, 0: 0, 1: 0}


def test_shift_complex() -> None:
    assert cohomology_dimensions(_arrow().shift(1), (-1, 1)) == {-1: 0, 0: 1, 1: 0}


def test_tensor_complex() -> None:
    """Tensoring with an acyclic complex is acyclic."""
    spaces = [(0, ["p"]), (1, ["q"])]
    acyclic = FiniteComplex.from_sequence(spaces, [Matrix.identity(1)])
    assert is_acyclic(acyclic, (-1, 2))
    assert is_acyclic(acyclic.tensor(_arrow()), (-1, 3))
    square = _arrow().tensor(_arrow())
    assert cohomology_dimensions(square, (0, 2)) == {0: 0, 1: 0, 2: 1}


def test_quasi_isomorphism() -> None:
    c = _arrow()
    identity = ChainMap.from_graded_map(c, c, GradedMap.identity(c.space))
    assert is_quasi_isomorphism(identity, (-1, 2))

    def zero(k: int) -> Matrix:
        return Matrix.zeros(c.space.dim(k), c.space.dim(k))

    assert not is_quasi_isomorphism(ChainMap(c, c, zero), (-1, 2))


def test_not_chain_map() -> None:
    c = _arrow()

    def component(k: int) -> Matrix:
        if k == 0:
            return Matrix.identity(1)

        return Matrix.zeros(c.space.dim(k), c.space.dim(k))

    with pytest.raises(NotChainMapError):
        check_chain_map(ChainMap(c, c, component), range(-1, 2))
