"""Exact coefficient rings. Over a point base scalars are elements of sympy's ``QQ``;
over an affine base they are sparse polynomials in ``x1, ..., xm`` with rational
coefficients. Both have a canonical normal form, so ``==`` decides equality.
"""

from __future__ import annotations

import typing as t
from fractions import Fraction

from sympy import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement
from sympy.polys.rings import ring

Scalar = t.Any
"""An element of ``QQ`` or a :class:`~sympy.polys.rings.PolyElement` over ``QQ``."""


def parse_rational(value: str | int | Fraction) -> t.Any:
    """Parse ``"p/q"``, ``"n"``, an int or a fraction into ``QQ``.

    :param value: The value to parse.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")

    if isinstance(value, int):
        return QQ(value)

    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)

    if not isinstance(value, str):
        raise ValueError(f"not a rational: {value!r}")

    text = value.strip()

    try:
        if "/" in text:
            p, q = text.split("/")
            return QQ(int(p), int(q))

        return QQ(int(text))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational: {value!r}") from None


def format_rational(value: t.Any) -> str:
    """Serialize a ``QQ`` element as ``"n"`` or ``"p/q"`` in lowest terms."""
    value = QQ.convert(value)
    p = int(QQ.numer(value))
    q = int(QQ.denom(value))

    if q == 1:
        return str(p)

    return f"{p}/{q}"


class ScalarRing:
    """The function algebra of a base: ``QQ`` for a point, or ``QQ[x1..xm]``.

    :param dimension: Number of base coordinates. ``0`` is the point.
    """

    def __init__(self, dimension: int = 0) -> None:
        if dimension < 0:
            raise ValueError("dimension must be at least 0")

        self.dimension = dimension
        self.variables: tuple[str, ...] = tuple(
            f"x{i + 1}" for i in range(dimension)
        )
        """Names of the base coordinates."""

        self.poly_ring: t.Any = None

        if dimension:
            self.poly_ring = ring(",".join(self.variables), QQ, grlex)[0]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ScalarRing) and other.dimension == self.dimension

    def __hash__(self) -> int:
        return hash(("ScalarRing", self.dimension))

    def __repr__(self) -> str:
        return f"ScalarRing({self.dimension})"

    @property
    def is_point(self) -> bool:
        return self.dimension == 0

    @property
    def zero(self) -> Scalar:
        if self.poly_ring is None:
            return QQ.zero

        return self.poly_ring.zero

    @property
    def one(self) -> Scalar:
        if self.poly_ring is None:
            return QQ.one

        return self.poly_ring.one

    def gen(self, index: int) -> Scalar:
        """The coordinate function ``x_{index + 1}``."""
        return self.poly_ring.gens[index]

    def convert(self, value: t.Any) -> Scalar:
        """Bring an int, fraction, ``"p/q"`` string, ``QQ`` element or polynomial
        into this ring.
        """
        if isinstance(value, PolyElement):
            if self.poly_ring is None:
                if value.is_ground:
                    return QQ.convert(value.LC)

                raise ValueError("a polynomial can't be used over a point base")

            if value.ring == self.poly_ring:
                return value

            return self.poly_ring.from_dict(dict(value))

        if isinstance(value, (str, int, Fraction)):
            value = parse_rational(value)

        value = QQ.convert(value)

        if self.poly_ring is None:
            return value

        return self.poly_ring.ground_new(value)

    def from_terms(self, terms: t.Mapping[tuple[int, ...], t.Any]) -> Scalar:
        """Build a scalar from a map of exponent vectors to rationals."""
        if self.poly_ring is None:
            return sum((QQ.convert(c) for e, c in terms.items() if not any(e)), QQ.zero)

        return self.poly_ring.from_dict(
            {tuple(e): QQ.convert(c) for e, c in terms.items()}
        )

    def terms(self, value: Scalar) -> list[tuple[tuple[int, ...], t.Any]]:
        """Nonzero terms in sorted exponent order. A point scalar is one constant
        term with the empty exponent vector.
        """
        if self.poly_ring is None:
            return [((), value)] if value else []

        return sorted(value.items())

    def diff(self, value: Scalar, index: int) -> Scalar:
        """Partial derivative by the coordinate ``x_{index + 1}``."""
        if self.poly_ring is None:
            raise IndexError("a point base has no coordinates")

        return value.diff(self.poly_ring.gens[index])

    def evaluate(self, value: Scalar, point: t.Sequence[t.Any]) -> t.Any:
        """Evaluate at a rational point, returning an element of ``QQ``."""
        if self.poly_ring is None:
            return value

        if len(point) != self.dimension:
            raise ValueError(
                f"expected {self.dimension} coordinates, got {len(point)}"
            )

        result = QQ.zero

        for exponents, coeff in value.items():
            term = QQ.convert(coeff)

            for v, e in zip(point, exponents):
                if e:
                    term *= QQ.convert(v) ** e

            result += term

        return result

    def compose(
        self, value: Scalar, images: t.Sequence[Scalar], target: ScalarRing
    ) -> Scalar:
        """Substitute ``x_a -> images[a]``, landing in ``target``.

        :param value: A scalar of this ring.
        :param images: One scalar of ``target`` per coordinate.
        :param target: The ring the result lives in.
        """
        if self.poly_ring is None:
            return target.convert(value)

        result = target.zero

        for exponents, coeff in value.items():
            term = target.convert(QQ.convert(coeff))

            for image, e in zip(images, exponents):
                if e:
                    term = term * image**e

            result = result + term

        return result

    def is_constant(self, value: Scalar) -> bool:
        if self.poly_ring is None:
            return True

        return bool(value.is_ground)

    def constant(self, value: Scalar) -> t.Any:
        """The value of a constant scalar as an element of ``QQ``."""
        if self.poly_ring is None:
            return value

        if not value:
            return QQ.zero

        if not value.is_ground:
            raise ValueError("scalar is not constant")

        return QQ.convert(value.LC)

    def dump(self, value: Scalar) -> str | dict[str, str]:
        """Serialize a scalar. Point scalars become ``"p/q"``; polynomials become a
        map from comma-joined exponents to ``"p/q"``.
        """
        if self.poly_ring is None:
            return format_rational(value)

        return {
            ",".join(str(e) for e in exponents): format_rational(coeff)
            for exponents, coeff in self.terms(value)
        }

    def load(self, data: t.Any) -> Scalar:
        """Inverse of :meth:`dump`. Plain ``"p/q"`` values are accepted on affine bases
        as constants.
        """
        if isinstance(data, dict):
            terms: dict[tuple[int, ...], t.Any] = {}

            for key, coeff in data.items():
                exponents = tuple(int(e) for e in key.split(",")) if key else ()

                if len(exponents) != self.dimension or any(e < 0 for e in exponents):
                    raise ValueError(f"bad exponent vector {key!r}")

                terms[exponents] = parse_rational(coeff)

            if self.poly_ring is None:
                return terms.get((), QQ.zero)

            return self.from_terms(terms)

        return self.convert(parse_rational(data))


def parse_point(values: t.Iterable[t.Any]) -> tuple[t.Any, ...]:
    """Parse the coordinates of a rational point into ``QQ``."""
    return tuple(
        parse_rational(v) if isinstance(v, (str, int, Fraction)) else QQ.convert(v)
        for v in values
    )
