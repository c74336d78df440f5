from __future__ import annotations

import pytest

from dgmanifold.bundle import CurvedBundle
from dgmanifold.errors import MorphismError
from dgmanifold.graded import GradedVectorSpace
from dgmanifold.graded import check_chain_map
from dgmanifold.graded import cohomology_dimensions
from dgmanifold.graded import is_acyclic
from dgmanifold.graded import is_quasi_isomorphism
from dgmanifold.modules import DgModule
from dgmanifold.modules import ModuleMap
from dgmanifold.modules import curvature_homotopy
from dgmanifold.modules import function_module
from dgmanifold.modules import identity_map
from dgmanifold.modules import is_contracting


@pytest.fixture()
def module(linear_pair: CurvedBundle) -> DgModule:
    """A line ``p`` mapped isomorphically onto a line ``r`` one degree up."""
    algebra = linear_pair.algebra
    fibre = GradedVectorSpace.from_labels({"p": 0, "r": 1})
    return DgModule(algebra, linear_pair.q, fibre, {"p": {"r": algebra.one}}, name="M")


def test_functions_zero_line(zero_line: CurvedBundle) -> None:
    functions = function_module(zero_line.algebra, zero_line.q)
    assert functions.basis(-1) == ("e⊗1",)
    assert cohomology_dimensions(functions, (-2, 1)) == {-2: 0, -1: 1, 0: 1, 1: 0}


def test_functions_linear_pair(linear_pair: CurvedBundle) -> None:
    """Only the constants survive when ``lambda_1`` is an isomorphism."""
    functions = function_module(linear_pair.algebra, linear_pair.q)
    assert cohomology_dimensions(functions, (-6, 1)) == {
        -6: 0,
        -5: 0,
        -4: 0,
        -3: 0,
        -2: 0,
        -1: 0,
        0: 1,
        1: 0,
    }


def test_module_acyclic(module: DgModule) -> None:
    assert module.square_is_zero()
    assert module.is_triangular()
    assert is_acyclic(module, (-4, 1))


def test_leibniz(module: DgModule) -> None:
    algebra = module.algebra
    f = algebra.gen("e1") * algebra.gen("e2")
    assert module.leibniz_holds(f, module.basis_section("p"))


def test_constructions_square_zero(
    module: DgModule, linear_pair: CurvedBundle
) -> None:
    functions = function_module(linear_pair.algebra, linear_pair.q)
    assert module.dual().square_is_zero()
    assert module.shift().square_is_zero()
    assert module.tensor(functions).square_is_zero()
    assert module.tensor(module.dual()).square_is_zero()
    assert module.direct_sum(functions.shift()).labels == ["1[1]", "p", "r"]


def test_dual_labels(module: DgModule) -> None:
    dual = module.dual()
    assert dual.fibre.degree_map == {"p*": 0, "r*": -1}
    assert dual.n("r*").coeffs == {"p*": module.algebra.one}


def test_cone_of_identity(module: DgModule) -> None:
    cone = module.cone(identity_map(module))
    assert cone.labels == ["p[1]", "p", "r[1]", "r"]
    assert cone.square_is_zero()
    assert is_acyclic(cone, (-4, 1))


def test_tensor_with_cone(zero_line: CurvedBundle) -> None:
    """Functions are not acyclic, their tensor with the cone of the identity is."""
    functions = function_module(zero_line.algebra, zero_line.q)
    cone = functions.cone(identity_map(functions))
    product = functions.tensor(cone)
    assert product.square_is_zero()
    assert not is_acyclic(functions, (-3, 1))
    assert is_acyclic(product, (-3, 1))


def test_submodule(module: DgModule) -> None:
    sub, inclusion = module.submodule({"k": {"r": 1}}, name="K")
    assert sub.labels == ["k"]
    assert inclusion.is_chain_map()

    with pytest.raises(MorphismError, match="not in kernel"):
        module.submodule({"k": {"p": 1}})


def test_not_chain_map(module: DgModule) -> None:
    keep = ModuleMap(module, module, {"p": module.basis_section("p")}, name="keep p")
    assert not keep.is_chain_map()
    assert identity_map(module).is_chain_map()


def test_unknown_label(linear_pair: CurvedBundle) -> None:
    fibre = GradedVectorSpace.from_labels({"p": 0})

    with pytest.raises(ValueError, match="unknown fibre label"):
        DgModule(linear_pair.algebra, linear_pair.q, fibre, {"z": {}})


def test_curvature_homotopy(curvature_line: CurvedBundle) -> None:
    """Functions and a free module over a curvature line are contractible."""
    algebra = curvature_line.algebra
    functions = function_module(algebra, curvature_line.q)
    h = curvature_homotopy(functions)
    assert h.degree == -1
    assert is_contracting(h, (-2, 1))
    assert is_acyclic(functions, (-2, 1))

    fibre = GradedVectorSpace.from_labels({"p": 0, "r": 2})
    free = DgModule(algebra, curvature_line.q, fibre, name="F")
    assert is_contracting(curvature_homotopy(free), (-2, 3))


def test_curvature_homotopy_needs_curvature(zero_line: CurvedBundle) -> None:
    functions = function_module(zero_line.algebra, zero_line.q)

    with pytest.raises(MorphismError, match="curvature is zero"):
        curvature_homotopy(functions)


def test_curvature_homotopy_needs_line(linear_pair: CurvedBundle) -> None:
    functions = function_module(linear_pair.algebra, linear_pair.q)

    with pytest.raises(MorphismError, match="not a module over a curvature line"):
        curvature_homotopy(functions)


def test_identity_chain_map(module: DgModule, curvature_line: CurvedBundle) -> None:
    f = identity_map(module).chain_map()
    check_chain_map(f, range(-4, 2))
    assert is_quasi_isomorphism(f, (-4, 1))

    functions = function_module(curvature_line.algebra, curvature_line.q)

    with pytest.raises(ValueError, match="degree 0"):
        curvature_homotopy(functions).chain_map()
