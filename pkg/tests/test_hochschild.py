from __future__ import annotations

import pytest
from sympy import QQ

from dgmanifold.atiyah import AffineConnection
from dgmanifold.atiyah import assemble_todd
from dgmanifold.atiyah import atiyah_cocycle
from dgmanifold.atiyah import todd_truncation
from dgmanifold.bundle import CurvedBundle
from dgmanifold.errors import NotMaterializableError
from dgmanifold.hochschild import HochschildComplex
from dgmanifold.hochschild import contract_todd
from dgmanifold.hochschild import hkr_check
from dgmanifold.hochschild import windowed_hh
from dgmanifold.tensors import VectorFieldModule
from dgmanifold.tensors import form_module

from .conftest import make_bundle


def test_point_base_only() -> None:
    with pytest.raises(NotMaterializableError):
        HochschildComplex(make_bundle({"e": 1}, amplitude=1, dimension=1))


def test_function_is_closed(zero_line: CurvedBundle) -> None:
    complex_ = HochschildComplex(zero_line)
    xi = zero_line.algebra.gen("e")
    assert not complex_.hochschild_differential(complex_.function(xi))


def test_derivation_is_closed(quadratic: CurvedBundle) -> None:
    """``d_H`` of a derivation vanishes by the Leibniz rule."""
    complex_ = HochschildComplex(quadratic)
    op = complex_.q_operator
    assert op.arity == 1
    assert op.degree() == 1
    assert not complex_.hochschild_differential(op)


def test_q_operator_evaluates(quadratic: CurvedBundle) -> None:
    complex_ = HochschildComplex(quadratic)
    algebra = quadratic.algebra
    f = algebra.gen("a") * algebra.gen("b")
    assert complex_.q_operator(f) == quadratic.q(f)


def test_cup_of_functions(quadratic: CurvedBundle) -> None:
    complex_ = HochschildComplex(quadratic)
    a, b = quadratic.algebra.gen("a"), quadratic.algebra.gen("b")
    product = complex_.cup(complex_.function(a), complex_.function(b))
    assert product == complex_.function(a * b)


def test_operator_errors(quadratic: CurvedBundle) -> None:
    complex_ = HochschildComplex(quadratic)
    one = quadratic.algebra.one

    with pytest.raises(ValueError, match="slot count"):
        complex_.operator(1, {((0,), (1,)): one})

    with pytest.raises(ValueError, match="expected 1 arguments"):
        complex_.q_operator(one, one)

    with pytest.raises(ValueError, match="no slot 2"):
        complex_.compose_at(complex_.q_operator, complex_.q_operator, 2)


def test_schouten_on_functions(zero_line: CurvedBundle) -> None:
    """``[X, f] = X(f)`` for ``d/dxi`` and the Euler field ``xi d/dxi``."""
    poly = HochschildComplex(zero_line).poly
    xi = poly.embed(zero_line.algebra.gen("e"))
    theta = poly.theta(0)
    assert poly.schouten(theta, xi) == poly.algebra.one
    assert poly.schouten(xi * theta, xi) == xi


def test_hkr_of_vector_field(quadratic: CurvedBundle) -> None:
    complex_ = HochschildComplex(quadratic)
    poly = complex_.poly
    assert complex_.hkr(poly.q) == complex_.q_operator
    xi = quadratic.algebra.gen("a")
    assert complex_.hkr(poly.embed(xi)) == complex_.function(xi)

    with pytest.raises(ValueError, match="single arity"):
        complex_.hkr(poly.q + poly.embed(xi))


@pytest.mark.parametrize("fixture", ["zero_line", "quadratic"])
def test_hkr_check(fixture: str, request: pytest.FixtureRequest) -> None:
    bundle = request.getfixturevalue(fixture)
    report = hkr_check(bundle, (-2, 2), arity=1)
    assert report.passed, report.checks
    assert report.samples > 0


def test_exterior_line(zero_line: CurvedBundle) -> None:
    """With ``Q = 0`` every arity ``p`` contributes ``xi theta^p`` and ``theta^p``
    in degrees ``2p - 1`` and ``2p``.
    """
    window = windowed_hh(zero_line, (-3, 5), arity=2, order=2)
    ranks = {c.degree: c.rank for c in window.cells}
    assert ranks == {-3: 0, -2: 0, -1: 1, 0: 1, 1: 1, 2: 1, 3: 1, 4: 1, 5: 0}
    assert window.inconclusive == [5]
    assert window.agrees
    assert window.table()[2]["poly_ranks"] == {"0": 1, "1": 0, "2": 0}


def test_curved_line_is_acyclic(curvature_line: CurvedBundle) -> None:
    window = windowed_hh(curvature_line, (-2, 4), arity=2, order=2)
    assert all(c.rank == 0 for c in window.cells)
    assert window.inconclusive == []
    assert window.agrees


def test_empty_window(zero_line: CurvedBundle) -> None:
    window = windowed_hh(zero_line, (3, 1))
    assert window.cells == []
    assert window.agrees


def test_contract_trivial_todd(linear_pair: CurvedBundle) -> None:
    cocycle = atiyah_cocycle(AffineConnection.flat(VectorFieldModule(linear_pair)))
    todd = todd_truncation(cocycle, 2)
    poly = HochschildComplex(linear_pair).poly
    a = poly.theta(0)
    assert contract_todd(poly, a, todd) == a


def test_contract_todd() -> None:
    """``Td^(1/2) = 1 + s1/4`` with ``s1 = dξu`` strips ``θu`` and fixes ``θv``."""
    bundle = make_bundle({"u": 1, "v": 2})
    vf = VectorFieldModule(bundle)
    omega = form_module(vf, 1).element("1", ["∂u"])
    todd = assemble_todd(vf, {1: omega}, 1)
    poly = HochschildComplex(bundle).poly
    a = poly.theta(0)
    assert not todd.is_trivial
    assert contract_todd(poly, a, todd) == a + poly.algebra.one * QQ(1, 4)
    assert contract_todd(poly, poly.theta(1), todd) == poly.theta(1)
    assert poly.contract(omega, a * poly.theta(1)) == poly.theta(1)
