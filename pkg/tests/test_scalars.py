from __future__ import annotations

from fractions import Fraction

import pytest
from sympy import QQ

from dgmanifold.scalars import ScalarRing
from dgmanifold.scalars import format_rational
from dgmanifold.scalars import parse_point
from dgmanifold.scalars import parse_rational


@pytest.mark.parametrize(
    ("value", "expect"),
    [
        ("3/6", QQ(1, 2)),
        ("-4", QQ(-4)),
        (" 2/3 ", QQ(2, 3)),
        (5, QQ(5)),
        (Fraction(3, 9), QQ(1, 3)),
    ],
)
def test_parse_rational(value: str | int | Fraction, expect: object) -> None:
    assert parse_rational(value) == expect


@pytest.mark.parametrize("value", ["1/0", "abc", "1.5", True, 2.5])
def test_parse_rational_invalid(value: object) -> None:
    """Booleans, floats and malformed strings are rejected."""
    with pytest.raises(ValueError, match="not a rational"):
        parse_rational(value)  # type: ignore[arg-type]


@pytest.mark.parametrize(
    ("value", "expect"), [(QQ(2, 4), "1/2"), (QQ(-3), "-3"), (QQ(0), "0")]
)
def test_format_rational(value: object, expect: str) -> None:
    assert format_rational(value) == expect


def test_point_ring() -> None:
    ring = ScalarRing(0)
    assert ring.is_point
    assert ring.zero == QQ(0)
    assert ring.one == QQ(1)
    assert ring.load("1/3") == QQ(1, 3)
    assert ring.load({"": "2"}) == QQ(2)
    assert ring.dump(QQ(-5, 2)) == "-5/2"
    assert ring.terms(QQ(0)) == []


def test_dump_load_polynomial() -> None:
    """Polynomials serialize as exponent vectors mapped to rationals."""
    ring = ScalarRing(2)
    x1, x2 = ring.gen(0), ring.gen(1)
    value = x1**2 + x2 * QQ(1, 2)
    data = ring.dump(value)
    assert data == {"2,0": "1", "0,1": "1/2"}
    assert ring.load(data) == value


def test_load_bad_exponents() -> None:
    ring = ScalarRing(2)

    with pytest.raises(ValueError, match="exponent"):
        ring.load({"1": "1"})


def test_evaluate_diff_compose() -> None:
    ring = ScalarRing(2)
    x1, x2 = ring.gen(0), ring.gen(1)
    value = x1 * x2 + ring.one
    assert ring.evaluate(value, (2, 3)) == QQ(7)
    assert ring.diff(value, 0) == x2
    line = ScalarRing(1)
    y = line.gen(0)
    composed = ring.compose(x1**2, [y + line.one, line.zero], line)
    assert composed == y**2 + y * 2 + line.one


def test_constant() -> None:
    ring = ScalarRing(1)
    assert ring.is_constant(ring.convert(3))
    assert ring.constant(ring.convert("2/3")) == QQ(2, 3)
    assert ring.constant(ring.zero) == QQ(0)

    with pytest.raises(ValueError, match="not constant"):
        ring.constant(ring.gen(0))


def test_convert_polynomial_to_point() -> None:
    """Only constant polynomials can be used over a point."""
    line = ScalarRing(1)
    point = ScalarRing(0)
    assert point.convert(line.convert(4)) == QQ(4)

    with pytest.raises(ValueError):
        point.convert(line.gen(0))


def test_negative_dimension() -> None:
    with pytest.raises(ValueError):
        ScalarRing(-1)


def test_parse_point() -> None:
    assert parse_point(["1/2", 3]) == (QQ(1, 2), QQ(3))
