from __future__ import annotations

import math
import random
import typing as t

import pytest
from sympy import QQ

from dgmanifold.generate import random_supermatrix
from dgmanifold.series import Supermatrix
from dgmanifold.series import TruncatedSeries
from dgmanifold.series import ber_exp_holds
from dgmanifold.series import berezinian
from dgmanifold.series import bernoulli
from dgmanifold.series import exp_series
from dgmanifold.series import grassmann_algebra
from dgmanifold.series import todd_exponent
from dgmanifold.series import todd_polynomial
from dgmanifold.series import todd_series


def test_bernoulli() -> None:
    assert bernoulli(4) == (QQ(1), QQ(-1, 2), QQ(1, 6), QQ(0), QQ(-1, 30))
    assert bernoulli(0) == (QQ(1),)


def _bernoulli_recurrence(n: int) -> list[t.Any]:
    """``sum_(j=0)^m C(m+1, j) B_j = 0``, which fixes ``B_1 = -1/2``."""
    numbers = [QQ(1)]

    for m in range(1, n + 1):
        total = sum((QQ(math.comb(m + 1, j)) * numbers[j] for j in range(m)), QQ(0))
        numbers.append(-total / QQ(m + 1))

    return numbers


@pytest.mark.parametrize("n", [1, 6, 13])
def test_bernoulli_recurrence(n: int) -> None:
    assert list(bernoulli(n)) == _bernoulli_recurrence(n)


def test_exp() -> None:
    x = TruncatedSeries.x(3)
    assert x.exp() == exp_series(3)
    assert exp_series(3).coefficients == (QQ(1), QQ(1), QQ(1, 2), QQ(1, 6))


def test_inverse() -> None:
    s = TruncatedSeries([1, 1], 3)
    assert s.inverse().coefficients == (QQ(1), QQ(-1), QQ(1), QQ(-1))
    assert s * s.inverse() == TruncatedSeries([1], 3)


def test_series_errors() -> None:
    with pytest.raises(ValueError, match="without constant term"):
        TruncatedSeries([1, 1], 2).exp()

    with pytest.raises(ValueError, match="not invertible"):
        TruncatedSeries.x(2).inverse()


def test_todd_series() -> None:
    """``x / (1 - e^-x) = 1 + x/2 + x^2/12 - x^4/720 + ...``."""
    assert todd_series(4).coefficients == (
        QQ(1),
        QQ(1, 2),
        QQ(1, 12),
        QQ(0),
        QQ(-1, 720),
    )


@pytest.mark.parametrize("order", [1, 2, 5, 8])
def test_todd_exponent(order: int) -> None:
    assert todd_exponent(order).exp() == todd_series(order)


def test_todd_polynomial() -> None:
    poly_ring, weights = todd_polynomial(2)
    s1, s2 = poly_ring.gens
    assert weights[0] == poly_ring.one
    assert weights[1] == s1 * QQ(1, 2)
    assert weights[2] == s1**2 * QQ(1, 8) - s2 * QQ(1, 24)

    with pytest.raises(ValueError):
        todd_polynomial(0)


def test_todd_polynomial_square_root() -> None:
    poly_ring, root = todd_polynomial(2, QQ(1, 2))
    _, weights = todd_polynomial(2)
    s1, s2 = poly_ring.gens
    assert root[1] == s1 * QQ(1, 4)
    assert root[2] == s1**2 * QQ(1, 32) - s2 * QQ(1, 48)
    assert root[1] * 2 == weights[1]
    assert root[2] * 2 + root[1] ** 2 == weights[2]


def test_grassmann_algebra() -> None:
    algebra = grassmann_algebra(2)
    assert algebra.names == ("t", "θ1", "θ2")
    t1, t2 = algebra.gen("θ1"), algebra.gen("θ2")
    assert t1 * t1 == algebra.zero
    assert t1 * t2 == -(t2 * t1)


def test_supertrace() -> None:
    algebra = grassmann_algebra(1)
    two, three = algebra.scalar(2), algebra.scalar(3)
    matrix = Supermatrix(1, 1, [[two, algebra.zero], [algebra.zero, three]])
    assert matrix.is_even()
    assert matrix.supertrace() == algebra.scalar(-1)
    identity = Supermatrix.identity(1, 1, algebra)
    assert berezinian(identity, 2) == algebra.one


def test_supermatrix_errors() -> None:
    algebra = grassmann_algebra(1)
    theta = algebra.gen("θ1")

    with pytest.raises(ValueError, match="expected a 2x2"):
        Supermatrix(1, 1, [[theta]])

    odd_diagonal = Supermatrix(1, 1, [[theta, theta], [theta, algebra.one]])
    assert not odd_diagonal.is_even()

    with pytest.raises(ValueError, match="even supermatrices"):
        ber_exp_holds(odd_diagonal, 2)


@pytest.mark.parametrize("seed", range(20))
def test_ber_exp(seed: int) -> None:
    """``Ber(exp(tA)) = exp(t str A)`` on random even supermatrices."""
    rng = random.Random(seed)
    matrix = random_supermatrix(rng, 1 + seed % 2, 1 + seed % 3)
    assert matrix.is_even()
    assert ber_exp_holds(matrix, 3)
