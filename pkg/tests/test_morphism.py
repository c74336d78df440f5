from __future__ import annotations

import pytest
from sympy import QQ

from dgmanifold.bundle import CurvedBundle
from dgmanifold.errors import MorphismError
from dgmanifold.errors import NotClassicalError
from dgmanifold.errors import StructureError
from dgmanifold.morphism import Classification
from dgmanifold.morphism import LinftyMorphism
from dgmanifold.morphism import check_classical
from dgmanifold.morphism import classify_morphism
from dgmanifold.morphism import pairing

from .conftest import make_bundle


@pytest.fixture()
def projection() -> LinftyMorphism:
    """A matched pair mapped to the zero bundle."""
    source = make_bundle({"u": 1, "v": 2}, {1: {"u": {"v": 1}}})
    target = make_bundle({}, amplitude=2)
    return LinftyMorphism(source, target)


def _checks(classification: Classification) -> dict[str, bool]:
    return {c.name: c.passed for c in classification.checks}


def test_identity(quadratic: CurvedBundle) -> None:
    identity = LinftyMorphism.identity(quadratic)
    assert identity.validate().passed
    result = classify_morphism(identity)
    assert result.passed
    assert result.is_acyclic_linear_fibration
    assert result.scope == "relative to the supplied classical loci"


def test_projection(projection: LinftyMorphism) -> None:
    result = classify_morphism(projection)
    assert _checks(result) == {
        "structure": True,
        "f is a submersion": True,
        "φ₁ degreewise surjective": True,
        "f respects the correspondence": True,
        "tangent map is a quasi-isomorphism": True,
    }
    assert result.is_acyclic_linear_fibration


def test_non_submersive() -> None:
    """A constant base map is never a submersion, even with ``phi_1`` onto."""
    source = make_bundle({"e": 1}, amplitude=1, dimension=1)
    target = make_bundle({"e": 1}, amplitude=1, dimension=1)
    morphism = LinftyMorphism(source, target, [0], {1: {"e": {"e": 1}}})
    result = classify_morphism(morphism, [["0"]], [["0"]])
    checks = _checks(result)
    assert checks["f is a submersion"] is False
    assert checks["φ₁ degreewise surjective"] is True
    assert not result.is_fibration
    assert "Jacobian rank deficient" in result.checks[1].detail


def test_not_compatible(linear_pair: CurvedBundle) -> None:
    morphism = LinftyMorphism(linear_pair, linear_pair, taylor={1: {"e1": {"e1": 1}}})
    failures = [r.name for r in morphism.validate().failures]
    assert failures == ["φ∘λ=μ∘φ in arity 1"]
    result = classify_morphism(morphism)
    assert not result.passed
    assert not result.is_fibration


def test_wrong_degree(linear_pair: CurvedBundle) -> None:
    morphism = LinftyMorphism(linear_pair, linear_pair, taylor={1: {"e1": {"e2": 1}}})
    assert [r.name for r in morphism.validate().failures] == ["degree of φ1"]

    with pytest.raises(StructureError):
        morphism.pullback


def test_unknown_label(linear_pair: CurvedBundle) -> None:
    with pytest.raises(MorphismError, match="unknown target label"):
        LinftyMorphism(linear_pair, linear_pair, taylor={1: {"e1": {"z": 1}}})


def test_base_map_size(zero_line: CurvedBundle) -> None:
    target = make_bundle({"e": 1}, amplitude=1, dimension=2)

    with pytest.raises(MorphismError, match="components"):
        LinftyMorphism(zero_line, target, [0])


def test_compose(quadratic: CurvedBundle) -> None:
    identity = LinftyMorphism.identity(quadratic)
    twice = identity @ identity
    assert twice.taylor == identity.taylor


def test_not_classical_points(curvature_line: CurvedBundle) -> None:
    with pytest.raises(NotClassicalError):
        check_classical(curvature_line, [()])

    with pytest.raises(MorphismError, match="coordinates"):
        check_classical(curvature_line, [(QQ(0),)])


def test_pairing() -> None:
    assert pairing(None, 2, 2) == [(0, 0), (1, 1)]
    assert pairing([(0, 1), (1, 0)], 2, 2) == [(0, 1), (1, 0)]

    with pytest.raises(MorphismError, match="bijection"):
        pairing([(0, 0), (1, 0)], 2, 2)

    with pytest.raises(MorphismError, match="different sizes"):
        pairing(None, 1, 2)


def test_unmatched_loci(curvature_line: CurvedBundle, zero_line: CurvedBundle) -> None:
    """A classical point with no classical partner is not a weak equivalence."""
    morphism = LinftyMorphism(zero_line, curvature_line, taylor={1: {"e": {"e": 1}}})
    result = classify_morphism(morphism)
    assert _checks(result)["classical loci in bijection"] is False
    assert not result.is_weak_equivalence
