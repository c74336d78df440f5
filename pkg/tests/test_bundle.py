from __future__ import annotations

import random

import pytest
from sympy import QQ

from dgmanifold.bundle import CurvedBundle
from dgmanifold.bundle import tangent_complex_at
from dgmanifold.bundle import validate_structure
from dgmanifold.errors import NotClassicalError
from dgmanifold.errors import StructureError
from dgmanifold.generate import mutate
from dgmanifold.generate import random_bundle
from dgmanifold.graded import cohomology_dimensions
from dgmanifold.graded import is_acyclic

from .conftest import make_bundle


def _names(bundle: CurvedBundle) -> dict[str, bool]:
    return {r.name: r.passed for r in validate_structure(bundle).relations}


def test_curvature_line(curvature_line: CurvedBundle) -> None:
    """A single curvature term in amplitude 1 has nothing to compose with."""
    report = validate_structure(curvature_line)
    assert report.passed
    assert curvature_line.curvature() == {"e": QQ(1)}
    assert not curvature_line.is_classical(())


def test_linear_pair(linear_pair: CurvedBundle) -> None:
    assert _names(linear_pair) == {
        "grading": True,
        "degree of λ1": True,
        "λₙ=0 for n≥b": True,
        "λ₁(λ₀)=0": True,
        "λ₂(λ₀,x)+λ₁²(x)=0": True,
    }
    assert linear_pair.is_linear()


def test_broken_curvature() -> None:
    bundle = make_bundle({"e1": 1, "e2": 2}, {0: {"": {"e1": 1}}, 1: {"e1": {"e2": 1}}})
    report = validate_structure(bundle)
    assert [r.name for r in report.failures] == ["λ₁(λ₀)=0"]

    with pytest.raises(StructureError, match="λ₁\\(λ₀\\)=0"):
        report.raise_for_failure()


def test_wrong_degree() -> None:
    bundle = make_bundle({"a": 1, "b": 1}, {1: {"a": {"b": 1}}})
    names = _names(bundle)
    assert names["degree of λ1"] is False
    assert "λ₁(λ₀)=0" not in names


def test_arity_bound() -> None:
    """``lambda_n`` must vanish from arity ``b`` on."""
    bundle = make_bundle({"a": 1, "c": 2}, {2: {"a,a": {"c": 1}}}, amplitude=2)
    assert _names(bundle)["λₙ=0 for n≥b"] is False


def test_grading() -> None:
    bundle = make_bundle({"a": 1, "c": 3}, amplitude=2)
    assert _names(bundle)["grading"] is False


def test_inputs_are_sorted(quadratic: CurvedBundle) -> None:
    assert quadratic.lambda_entry(2, ["b", "a"], "c") == QQ(1)

    with pytest.raises(ValueError, match="unknown fibre label"):
        quadratic.sort_inputs(["z"])


def test_quadratic_q(quadratic: CurvedBundle) -> None:
    algebra = quadratic.algebra
    a, b = algebra.gen("a"), algebra.gen("b")
    assert quadratic.q(algebra.gen("c")) == a * b
    assert quadratic.q.square_is_zero()
    assert validate_structure(quadratic).passed


def test_from_generators_round_trip(quadratic: CurvedBundle) -> None:
    values = {
        quadratic.algebra.names[k]: v for k, v in quadratic.q.values.items()
    }
    rebuilt = CurvedBundle.from_generators(
        quadratic.ring, quadratic.fibre, values, quadratic.amplitude
    )
    assert rebuilt.lambdas == quadratic.lambdas


def test_direct_sum(linear_pair: CurvedBundle, quadratic: CurvedBundle) -> None:
    total = linear_pair.direct_sum(quadratic)
    assert total.amplitude == 3
    assert total.labels == ("a", "b", "e1", "e2", "c")
    assert validate_structure(total).passed


@pytest.mark.parametrize("seed", range(100))
def test_random_bundles_valid(seed: int) -> None:
    rng = random.Random(seed)
    bundle = random_bundle(rng, dimension=seed % 2)
    report = validate_structure(bundle)
    assert report.passed, report.failures


@pytest.mark.parametrize("seed", range(100))
def test_mutations_fail(seed: int) -> None:
    """Each mutation breaks the relation it names."""
    rng = random.Random(seed)
    bundle = random_bundle(rng, amplitude=2 + seed % 2, rank=4)
    mutation = mutate(rng, bundle)
    report = validate_structure(mutation.bundle)
    assert mutation.relation in [r.name for r in report.failures]


def test_tangent_complex_quadratic(quadratic: CurvedBundle) -> None:
    complex = tangent_complex_at(quadratic)
    assert cohomology_dimensions(complex, (0, 3)) == {0: 0, 1: 2, 2: 0, 3: 1}


def test_tangent_complex_linear_pair(linear_pair: CurvedBundle) -> None:
    assert is_acyclic(tangent_complex_at(linear_pair), (-1, 3))


def test_tangent_complex_affine() -> None:
    """The Jacobian of ``lambda_0 = x1`` cancels the base direction."""
    bundle = make_bundle({"e": 1}, amplitude=1, dimension=1)
    bundle = CurvedBundle(
        bundle.ring, bundle.fibre, {0: {"": {"e": bundle.ring.gen(0)}}}, 1
    )
    complex = tangent_complex_at(bundle, (QQ(0),))
    assert complex.basis(0) == ("∂x1",)
    assert is_acyclic(complex, (-1, 2))

    with pytest.raises(NotClassicalError):
        tangent_complex_at(bundle, (QQ(1),))

    with pytest.raises(ValueError, match="coordinates"):
        tangent_complex_at(bundle, ())


def test_not_classical(curvature_line: CurvedBundle) -> None:
    with pytest.raises(NotClassicalError):
        tangent_complex_at(curvature_line)
