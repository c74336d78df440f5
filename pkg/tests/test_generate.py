from __future__ import annotations

import random

import pytest

from dgmanifold.atiyah import AffineConnection
from dgmanifold.atiyah import atiyah_cocycle
from dgmanifold.atiyah import compare_classes
from dgmanifold.bundle import CurvedBundle
from dgmanifold.generate import random_bundle
from dgmanifold.generate import random_connection
from dgmanifold.generate import random_fibration
from dgmanifold.generate import random_fibre_connection
from dgmanifold.morphism import classify_morphism
from dgmanifold.tensors import VectorFieldModule


def test_seed_is_deterministic() -> None:
    first = random_bundle(random.Random(7), amplitude=3, rank=4)
    second = random_bundle(random.Random(7), amplitude=3, rank=4)
    assert first.labels == second.labels
    assert first.q == second.q


@pytest.mark.parametrize("seed", range(8))
def test_connections_share_a_class(seed: int, quadratic: CurvedBundle) -> None:
    """The Atiyah class does not depend on the connection."""
    vf = VectorFieldModule(quadratic)
    flat = atiyah_cocycle(AffineConnection.flat(vf))
    other = atiyah_cocycle(random_connection(random.Random(seed), vf))
    assert compare_classes(other.tensor, flat.tensor, flat.module).cohomologous


@pytest.mark.parametrize("seed", range(5))
def test_fibre_connection_square_zero(seed: int) -> None:
    rng = random.Random(seed)
    bundle = random_bundle(rng, amplitude=2, dimension=1)
    vf = VectorFieldModule(bundle, random_fibre_connection(rng, bundle))
    assert vf.square_is_zero()


@pytest.mark.parametrize("seed", range(5))
def test_random_fibration_classifies(seed: int) -> None:
    morphism = random_fibration(random.Random(seed), amplitude=2)
    assert morphism.validate().passed
    result = classify_morphism(morphism)
    assert result.is_fibration
    assert result.is_linear
    assert result.is_acyclic_linear_fibration
