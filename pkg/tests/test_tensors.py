from __future__ import annotations

import random

import pytest

from dgmanifold.bundle import CurvedBundle
from dgmanifold.errors import MorphismError
from dgmanifold.generate import random_fibration
from dgmanifold.graded import is_acyclic
from dgmanifold.modules import curvature_homotopy
from dgmanifold.modules import function_module
from dgmanifold.modules import is_contracting
from dgmanifold.morphism import LinftyMorphism
from dgmanifold.tensors import FibreConnection
from dgmanifold.tensors import Pushforward
from dgmanifold.tensors import VectorFieldModule
from dgmanifold.tensors import adapted_connection
from dgmanifold.tensors import form_module
from dgmanifold.tensors import kernel_complex
from dgmanifold.tensors import pair
from dgmanifold.tensors import tensor_module
from dgmanifold.tensors import wedge

from .conftest import make_bundle


def test_frame_labels(quadratic: CurvedBundle) -> None:
    vf = VectorFieldModule(quadratic)
    assert vf.labels == ["∂a", "∂b", "∂c"]
    assert vf.fibre.degree("∂c") == 3
    assert vf.square_is_zero()


def test_differential_is_bracket(quadratic: CurvedBundle) -> None:
    """``D(∂a) = [Q, ∂a] = xi_b ∂c``."""
    vf = VectorFieldModule(quadratic)
    assert vf.n("∂a").coeffs == {"∂c": quadratic.algebra.gen("b")}
    assert vf.n("∂c") == 0


def test_vector_fields_acyclic(linear_pair: CurvedBundle) -> None:
    assert is_acyclic(VectorFieldModule(linear_pair), (-4, 2))


def test_curvature_line_acyclic(curvature_line: CurvedBundle) -> None:
    """Off the classical locus every complex is contractible."""
    vf = VectorFieldModule(curvature_line)
    complexes = [
        function_module(curvature_line.algebra, curvature_line.q),
        vf,
        form_module(vf, 1),
        form_module(vf, 2),
        tensor_module(vf, 1, 2),
    ]

    for module in complexes:
        assert is_acyclic(module, (-10, 4))
        assert is_contracting(curvature_homotopy(module), (-10, 4))


def test_horizontal_lift() -> None:
    bundle = make_bundle({"e": 1}, amplitude=1, dimension=1)
    x = bundle.ring.gen(0)
    connection = FibreConnection(bundle, {0: {"e": {"e": x}}})
    vf = VectorFieldModule(bundle, connection)
    lift = vf.frame["∂x1"]
    e = bundle.algebra.gen("e")
    assert lift(e) == -(e * x)
    assert vf.from_derivation(lift) == vf.basis_section("∂x1")
    assert vf.to_derivation(vf.basis_section("∂e")) == vf.frame["∂e"]


def test_connection_errors(linear_pair: CurvedBundle) -> None:
    with pytest.raises(MorphismError, match="base coordinate"):
        FibreConnection(linear_pair, {0: {"e1": {"e1": 1}}})

    bundle = make_bundle({"a": 1, "c": 2}, dimension=1)

    with pytest.raises(MorphismError, match="mixes degrees"):
        FibreConnection(bundle, {0: {"a": {"c": 1}}})


def test_lie_derivative_matches_differential(quadratic: CurvedBundle) -> None:
    module = tensor_module(VectorFieldModule(quadratic), 1, 1)
    assert module.square_is_zero()

    for label in module.keys:
        element = module.basis_section(label)
        assert module.lie_derivative(element) == module.d(element)


def test_symmetrize(zero_line: CurvedBundle) -> None:
    """Odd inputs make ``T(∂e, ∂e)`` antisymmetric."""
    forms = form_module(VectorFieldModule(zero_line), 2)
    tensor = forms.element("1", ["∂e", "∂e"])
    assert forms.fibre.degree(forms.label("1", ["∂e", "∂e"])) == -2
    assert forms.permute(tensor, [1, 0]) == -tensor
    assert forms.symmetrize(tensor) == 0
    assert forms.symmetrize(tensor, antisymmetric=True) == tensor


def test_pair(zero_line: CurvedBundle) -> None:
    vf = VectorFieldModule(zero_line)
    forms = form_module(vf, 1)
    form = forms.element("1", ["∂e"])
    assert pair(form, forms, vf.basis_section("∂e")) == zero_line.algebra.one

    with pytest.raises(ValueError, match="expected 1 arguments"):
        forms.evaluate(form, [])


def test_projection_kernel() -> None:
    source = make_bundle({"u": 1, "v": 2}, {1: {"u": {"v": 1}}})
    target = make_bundle({}, amplitude=2)
    push = Pushforward(LinftyMorphism(source, target))
    kernel, inclusion = kernel_complex(push)
    assert kernel.labels == ["k1", "k2"]
    assert inclusion.image("k1") == push.source.basis_section("∂u")
    assert inclusion.is_chain_map()
    assert is_acyclic(kernel, (-4, 2))


@pytest.mark.parametrize("seed", range(5))
def test_pushforward_chain_maps(seed: int) -> None:
    rng = random.Random(seed)
    morphism = random_fibration(rng, amplitude=2 + seed % 2)
    push = Pushforward(morphism)
    assert push.pushforward().is_chain_map()
    assert push.natural_map().is_chain_map()
    kernel, inclusion = kernel_complex(push)
    assert inclusion.is_chain_map()
    assert is_acyclic(kernel, (-3, 4))


def test_pushforward_on_identity(linear_pair: CurvedBundle) -> None:
    push = Pushforward(LinftyMorphism.identity(linear_pair))
    images = push.pushforward()
    assert images.image("∂e1").coeffs == {"∂e1": linear_pair.algebra.one}
    kernel, _ = kernel_complex(push)
    assert kernel.labels == []


def test_adapted_connection_on_point(linear_pair: CurvedBundle) -> None:
    connection = adapted_connection(LinftyMorphism.identity(linear_pair))
    assert connection.christoffel == {}


def test_adapted_connection_kills_gamma() -> None:
    """Horizontal lifts for the adapted connection push forward to horizontal
    lifts.
    """
    target = make_bundle({"e": 1}, amplitude=1, dimension=1)
    source = make_bundle({"e": 1, "u": 1}, amplitude=1, dimension=1)
    x = target.ring.gen(0)
    morphism = LinftyMorphism(source, target, [x], {1: {"e": {"e": 1}}})
    target_connection = FibreConnection(target, {0: {"e": {"e": x}}})
    connection = adapted_connection(morphism, target_connection)
    push = Pushforward(
        morphism,
        VectorFieldModule(source, connection),
        VectorFieldModule(target, target_connection),
    )
    assert all(not section for section in push.gamma().values())


def test_not_linear() -> None:
    bundle = make_bundle({"a": 1, "b": 1, "d": 2})
    taylor = {1: {(a,): {a: 1} for a in bundle.labels}, 2: {"a,b": {"d": 1}}}
    morphism = LinftyMorphism(bundle, bundle, [], taylor)

    with pytest.raises(MorphismError, match="not a linear fibration"):
        kernel_complex(Pushforward(morphism))


@pytest.fixture()
def mixed_vf() -> VectorFieldModule:
    """Vector fields with an odd ``∂u`` and an even ``∂v``, ``Q = 0``."""
    return VectorFieldModule(make_bundle({"u": 1, "v": 2}))


def test_wedge(mixed_vf: VectorFieldModule) -> None:
    """``dξu`` has odd degree, so it does not square to zero while ``dξv`` does."""
    one = mixed_vf.algebra.one
    ones, twos = form_module(mixed_vf, 1), form_module(mixed_vf, 2)
    du, dv = ones.element("1", ["∂u"]), ones.element("1", ["∂v"])
    assert wedge(du, du).coeffs == {twos.label("1", ["∂u", "∂u"]): one * -2}
    assert wedge(du, dv).coeffs == {
        twos.label("1", ["∂u", "∂v"]): one,
        twos.label("1", ["∂v", "∂u"]): -one,
    }
    assert wedge(dv, du) == -wedge(du, dv)
    assert wedge(dv, dv) == 0
    assert wedge(wedge(du, dv), du) == wedge(du, wedge(dv, du))


def test_wedge_with_functions(mixed_vf: VectorFieldModule) -> None:
    du = form_module(mixed_vf, 1).element("1", ["∂u"])
    unit = form_module(mixed_vf, 0).basis_section("1")
    assert wedge(unit, du) == du
    assert wedge(du, unit) == du


def test_wedge_needs_forms(mixed_vf: VectorFieldModule) -> None:
    with pytest.raises(TypeError, match="needs forms"):
        wedge(mixed_vf.basis_section("∂u"), mixed_vf.basis_section("∂v"))


def test_form_degree(mixed_vf: VectorFieldModule) -> None:
    """``deg(dξ) = deg(ξ) + 1`` while the tensor grading keeps ``deg(ξ)``."""
    ones = form_module(mixed_vf, 1)
    du, dv = ones.element("1", ["∂u"]), ones.element("1", ["∂v"])
    assert (du.degree(), ones.form_degree(du)) == (-1, 0)
    assert (dv.degree(), ones.form_degree(dv)) == (-2, -1)
    assert form_module(mixed_vf, 2).form_degree(wedge(du, dv)) == -1
