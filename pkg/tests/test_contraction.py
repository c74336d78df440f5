from __future__ import annotations

import random

import pytest
from sympy import QQ

from dgmanifold.contraction import build_contraction
from dgmanifold.contraction import check_exact
from dgmanifold.contraction import contraction_of_complex
from dgmanifold.errors import NotExactError
from dgmanifold.generate import random_exact_sequence
from dgmanifold.graded import FiniteComplex
from dgmanifold.linalg import Matrix


def test_short_exact() -> None:
    """``0 -> Q -> Q^2 -> Q -> 0`` splits and satisfies every identity."""
    maps = [Matrix.from_dense([[1], [0]]), Matrix.from_dense([[0, 1]])]
    data = build_contraction(maps)
    assert data.dims == [1, 2, 1]
    assert data.verify()
    assert [name for name, _ in data.identities()] == [
        "η0∘η1=0",
        "η0∘δ0=id",
        "δ0∘η0+η1∘δ1=id",
        "δ1∘η1+η2∘δ2=id",
    ]
    assert data.projector(1) == Matrix.from_dense([[1, 0], [0, 0]])
    assert data.projector(2) == Matrix.identity(1)


def test_not_exact() -> None:
    maps = [Matrix.from_dense([[1], [0]]), Matrix.zeros(1, 2)]

    with pytest.raises(NotExactError) as info:
        build_contraction(maps)

    assert (info.value.position, info.value.defect) == (1, 1)


def test_not_a_complex() -> None:
    maps = [Matrix.from_dense([[1], [0]]), Matrix.from_dense([[1, 0]])]

    with pytest.raises(ValueError, match="compose to 0"):
        check_exact([1, 2, 1], maps)


def test_empty_needs_dims() -> None:
    with pytest.raises(ValueError, match="dims"):
        build_contraction([])

    assert build_contraction([], [0]).verify()


@pytest.mark.parametrize("seed", range(50))
def test_random_exact(seed: int) -> None:
    rng = random.Random(seed)
    dims, maps = random_exact_sequence(rng, rng.randint(2, 5))
    data = build_contraction(maps, dims)
    assert data.verify()

    for i in range(1, data.length):
        p = data.projector(i)
        assert p @ p == p


def test_of_complex() -> None:
    complex = FiniteComplex.from_sequence(
        [(-1, ["x"]), (0, ["y"])], [Matrix.from_dense([[3]])]
    )
    data = contraction_of_complex(complex)
    assert data.etas == [Matrix.from_dense([[QQ(1, 3)]])]
