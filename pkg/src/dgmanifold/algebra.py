"""Graded-commutative function algebras ``functions(base) (x) S(generators)``,
their elements, derivations, and algebra morphisms given by substitution.

A monomial is a sorted tuple of generator indices; an even generator may repeat and
an odd one may not. An element is a map from monomials to base scalars, the scalar
written on the left.
"""

from __future__ import annotations

import bisect
import functools
import typing as t

from . import signs
from .errors import NotMaterializableError
from .scalars import Scalar
from .scalars import ScalarRing

Monomial = tuple[int, ...]


class FunctionAlgebra:
    """The algebra of functions on a graded manifold with a trivialized model.

    :param ring: The base function ring.
    :param names: Generator names, in the order that defines monomial sorting.
    :param degrees: Generator degrees. Generators of a positive amplitude bundle have
        negative degrees, but any nonzero integer is allowed.
    """

    def __init__(
        self, ring: ScalarRing, names: t.Sequence[str], degrees: t.Sequence[int]
    ) -> None:
        if len(names) != len(degrees):
            raise ValueError("names and degrees have different lengths")

        if len(set(names)) != len(names):
            raise ValueError("generator names must be distinct")

        self.ring = ring
        self.names: tuple[str, ...] = tuple(names)
        self.degrees: tuple[int, ...] = tuple(degrees)
        self._index = {name: i for i, name in enumerate(self.names)}

    def __repr__(self) -> str:
        return f"FunctionAlgebra({self.ring!r}, {self.names!r}, {self.degrees!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FunctionAlgebra):
            return NotImplemented

        return (self.ring, self.names, self.degrees) == (
            other.ring,
            other.names,
            other.degrees,
        )

    def __hash__(self) -> int:
        return hash((self.ring, self.names, self.degrees))

    @property
    def size(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    @property
    def zero(self) -> Element:
        return Element(self, {})

    @property
    def one(self) -> Element:
        return Element(self, {(): self.ring.one})

    def scalar(self, value: t.Any) -> Element:
        return Element(self, {(): self.ring.convert(value)})

    def gen(self, index: int | str) -> Element:
        if isinstance(index, str):
            index = self._index[index]

        return Element(self, {(index,): self.ring.one})

    def coordinate(self, index: int) -> Element:
        """The base coordinate ``x_(index+1)`` as an element of degree 0."""
        return Element(self, {(): self.ring.gen(index)})

    def monomial(self, word: t.Iterable[int]) -> Element:
        """The product of generators in the given order, with its sign."""
        result = self.one

        for i in word:
            result = result * self.gen(i)

        return result

    def monomial_degree(self, mono: Monomial) -> int:
        return sum(self.degrees[i] for i in mono)

    def monomial_label(self, mono: Monomial) -> str:
        if not mono:
            return "1"

        return "·".join(self.names[i] for i in mono)

    def multiply_monomials(
        self, left: Monomial, right: Monomial
    ) -> tuple[int, Monomial]:
        """Sign and sorted monomial of ``left * right``. The sign is 0 when an odd
        generator would appear twice.
        """
        if not left:
            return 1, right

        if not right:
            return 1, left

        odd_right = [i for i in right if self.degrees[i] % 2]

        if odd_right:
            odd_left = [i for i in left if self.degrees[i] % 2]

            if set(odd_left) & set(odd_right):
                return 0, ()

            crossings = sum(
                len(odd_left) - bisect.bisect_right(odd_left, j) for j in odd_right
            )
        else:
            crossings = 0

        return signs.power(crossings), tuple(sorted(left + right))

    def is_materializable(self) -> bool:
        return self.ring.is_point and all(d < 0 for d in self.degrees)

    def monomials(self, degree: int) -> list[Monomial]:
        """Monomials of the given total degree, sorted. Only finite when the base is a
        point and every generator has negative degree.
        """
        if not self.ring.is_point:
            raise NotMaterializableError("functions on an affine base")

        if any(d >= 0 for d in self.degrees):
            raise NotMaterializableError("a generator of non-negative degree")

        return _monomials(self.degrees, degree)

    def basis(self, degree: int) -> tuple[str, ...]:
        return tuple(self.monomial_label(m) for m in self.monomials(degree))

    def element(self, terms: t.Mapping[Monomial, t.Any]) -> Element:
        return Element(self, {m: self.ring.convert(c) for m, c in terms.items()})


@functools.lru_cache(maxsize=None)
def _monomials(degrees: tuple[int, ...], degree: int) -> list[Monomial]:
    out: list[Monomial] = []

    def extend(start: int, remaining: int, word: tuple[int, ...]) -> None:
        if remaining == 0:
            out.append(word)

        for i in range(start, len(degrees)):
            d = degrees[i]

            if d < remaining:
                continue

            if d % 2 and word and word[-1] == i:
                continue

            extend(i, remaining - d, (*word, i))

    if degree <= 0:
        extend(0, degree, ())

    return sorted(out)


class Element:
    """An element of a :class:`FunctionAlgebra`. Treat as immutable."""

    __slots__ = ("algebra", "terms")

    def __init__(
        self, algebra: FunctionAlgebra, terms: t.Mapping[Monomial, Scalar]
    ) -> None:
        self.algebra = algebra
        self.terms: dict[Monomial, Scalar] = {m: c for m, c in terms.items() if c}

    def __repr__(self) -> str:
        return f"Element({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"

        parts = []

        for mono in sorted(self.terms):
            parts.append(f"({self.terms[mono]})*{self.algebra.monomial_label(mono)}")

        return " + ".join(parts)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Element):
            return self.terms == other.terms

        if isinstance(other, int) and other == 0:
            return not self.terms

        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms)))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _coerce(self, other: t.Any) -> Element:
        if isinstance(other, Element):
            return other

        return self.algebra.scalar(other)

    def __add__(self, other: t.Any) -> Element:
        other = self._coerce(other)
        terms = dict(self.terms)
        zero = self.algebra.ring.zero

        for m, c in other.terms.items():
            terms[m] = terms.get(m, zero) + c

        return Element(self.algebra, terms)

    __radd__ = __add__

    def __neg__(self) -> Element:
        return Element(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: t.Any) -> Element:
        return self + (-self._coerce(other))

    def __rsub__(self, other: t.Any) -> Element:
        return self._coerce(other) - self

    def __mul__(self, other: t.Any) -> Element:
        if not isinstance(other, Element):
            value = self.algebra.ring.convert(other)
            return Element(self.algebra, {m: c * value for m, c in self.terms.items()})

        algebra = self.algebra
        terms: dict[Monomial, Scalar] = {}
        zero = algebra.ring.zero

        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, mono = algebra.multiply_monomials(m1, m2)

                if sign:
                    terms[mono] = terms.get(mono, zero) + sign * c1 * c2

        return Element(algebra, terms)

    def __rmul__(self, other: t.Any) -> Element:
        value = self.algebra.ring.convert(other)
        return Element(self.algebra, {m: value * c for m, c in self.terms.items()})

    def __pow__(self, n: int) -> Element:
        result = self.algebra.one

        for _ in range(n):
            result = result * self

        return result

    def degrees(self) -> set[int]:
        return {self.algebra.monomial_degree(m) for m in self.terms}

    def degree(self) -> int:
        """The degree of a nonzero homogeneous element. Zero has degree 0."""
        found = self.degrees()

        if len(found) > 1:
            raise ValueError(f"element is not homogeneous: degrees {sorted(found)}")

        return found.pop() if found else 0

    def homogeneous(self, degree: int) -> Element:
        degree_of = self.algebra.monomial_degree
        return Element(
            self.algebra,
            {m: c for m, c in self.terms.items() if degree_of(m) == degree},
        )

    def components(self) -> dict[int, Element]:
        """Homogeneous components by degree."""
        parts: dict[int, dict[Monomial, Scalar]] = {}

        for m, c in self.terms.items():
            parts.setdefault(self.algebra.monomial_degree(m), {})[m] = c

        return {d: Element(self.algebra, terms) for d, terms in sorted(parts.items())}

    def twist(self, degree: int = 1) -> Element:
        """Multiply each homogeneous component ``a`` by ``(-1)^(degree |a|)``."""
        if not degree % 2:
            return self

        algebra = self.algebra
        return Element(
            algebra,
            {
                m: (-c if algebra.monomial_degree(m) % 2 else c)
                for m, c in self.terms.items()
            },
        )

    def coefficient(self, mono: Monomial) -> Scalar:
        return self.terms.get(mono, self.algebra.ring.zero)

    @property
    def constant(self) -> Scalar:
        """Coefficient of the empty monomial."""
        return self.coefficient(())

    def is_scalar(self) -> bool:
        return all(not m for m in self.terms)

    def word_lengths(self) -> set[int]:
        return {len(m) for m in self.terms}

    def map_coefficients(self, func: t.Callable[[Scalar], Scalar]) -> Element:
        return Element(self.algebra, {m: func(c) for m, c in self.terms.items()})

    def evaluate(self, point: t.Sequence[t.Any]) -> Element:
        """Evaluate base coordinates at a rational point, giving an element of the
        algebra over a point with the same generators.
        """
        algebra = self.algebra
        fibre = FunctionAlgebra(ScalarRing(0), algebra.names, algebra.degrees)
        return Element(
            fibre,
            {m: algebra.ring.evaluate(c, point) for m, c in self.terms.items()},
        )


class Derivation:
    """A graded derivation ``X(ab) = X(a) b + (-1)^(|X||a|) a X(b)``, determined by its
    values on the base coordinates and on the generators. Missing values are zero.

    :param algebra: The algebra it acts on.
    :param degree: The degree of the derivation.
    :param values: Map from generator index to its image.
    :param base_values: Map from base coordinate index to its image.
    """

    def __init__(
        self,
        algebra: FunctionAlgebra,
        degree: int,
        values: t.Mapping[int, Element] | None = None,
        base_values: t.Mapping[int, Element] | None = None,
    ) -> None:
        self.algebra = algebra
        self.degree = degree
        self.values: dict[int, Element] = {k: v for k, v in (values or {}).items() if v}
        self.base_values: dict[int, Element] = {
            k: v for k, v in (base_values or {}).items() if v
        }

    def __repr__(self) -> str:
        return f"Derivation(degree={self.degree}, values={self.values!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Derivation):
            return NotImplemented

        return (
            self.degree == other.degree
            and self.values == other.values
            and self.base_values == other.base_values
        ) or (self.is_zero() and other.is_zero())

    def __hash__(self) -> int:
        return hash(self.degree)

    def is_zero(self) -> bool:
        return not self.values and not self.base_values

    @classmethod
    def zero(cls, algebra: FunctionAlgebra, degree: int) -> Derivation:
        return cls(algebra, degree)

    @classmethod
    def coordinate(cls, algebra: FunctionAlgebra, index: int) -> Derivation:
        """``d/d xi_index`` of degree ``-deg(xi_index)``."""
        return cls(algebra, -algebra.degrees[index], {index: algebra.one})

    @classmethod
    def base_coordinate(cls, algebra: FunctionAlgebra, index: int) -> Derivation:
        """``d/dx_(index+1)`` of degree 0."""
        return cls(algebra, 0, base_values={index: algebra.one})

    def value(self, index: int) -> Element:
        return self.values.get(index, self.algebra.zero)

    def base_value(self, index: int) -> Element:
        return self.base_values.get(index, self.algebra.zero)

    def apply_scalar(self, value: Scalar) -> Element:
        ring = self.algebra.ring
        result = self.algebra.zero

        if ring.is_point or not self.base_values:
            return result

        for a, image in self.base_values.items():
            partial = ring.diff(value, a)

            if partial:
                result = result + image * partial

        return result

    def apply_monomial(self, mono: Monomial) -> Element:
        algebra = self.algebra
        result = algebra.zero
        before = 0

        for j, g in enumerate(mono):
            image = self.values.get(g)

            if image is not None:
                sign = signs.koszul(self.degree, before)
                left = algebra.monomial(mono[:j])
                right = algebra.monomial(mono[j + 1 :])
                result = result + (left * image * right) * sign

            before += algebra.degrees[g]

        return result

    def __call__(self, element: Element) -> Element:
        algebra = self.algebra
        result = algebra.zero

        for mono, coeff in element.terms.items():
            if self.base_values:
                result = result + self.apply_scalar(coeff) * algebra.monomial(mono)

            if self.values:
                result = result + self.apply_monomial(mono) * coeff

        return result

    def __add__(self, other: Derivation) -> Derivation:
        if other.degree != self.degree and not (other.is_zero() or self.is_zero()):
            raise ValueError("derivations of different degrees")

        if other.is_zero():
            return self

        if self.is_zero():
            return other

        algebra = self.algebra
        keys = {*self.values, *other.values}
        values = {k: self.value(k) + other.value(k) for k in keys}
        base = {
            k: self.base_value(k) + other.base_value(k)
            for k in {*self.base_values, *other.base_values}
        }
        return Derivation(algebra, self.degree, values, base)

    def __neg__(self) -> Derivation:
        return self.scale(-1)

    def __sub__(self, other: Derivation) -> Derivation:
        return self + (-other)

    def scale(self, factor: t.Any) -> Derivation:
        """Left multiplication ``(f X)(a) = f X(a)`` by a homogeneous element or
        scalar.
        """
        if not isinstance(factor, Element):
            factor = self.algebra.scalar(factor)

        degree = self.degree + factor.degree()
        return Derivation(
            self.algebra,
            degree,
            {k: factor * v for k, v in self.values.items()},
            {k: factor * v for k, v in self.base_values.items()},
        )

    def commutator(self, other: Derivation) -> Derivation:
        """``[X, Y] = X Y - (-1)^(|X||Y|) Y X``."""
        algebra = self.algebra
        sign = signs.koszul(self.degree, other.degree)
        values = {}

        for k in range(algebra.size):
            g = algebra.gen(k)
            values[k] = self(other(g)) - other(self(g)) * sign

        base = {}

        for a in range(algebra.ring.dimension):
            x = algebra.coordinate(a)
            base[a] = self(other(x)) - other(self(x)) * sign

        return Derivation(algebra, self.degree + other.degree, values, base)

    def square_is_zero(self) -> bool:
        """Check ``X(X(g)) = 0`` on every generator and base coordinate."""
        algebra = self.algebra

        for k in range(algebra.size):
            if self(self(algebra.gen(k))):
                return False

        return all(
            not self(self(algebra.coordinate(a))) for a in range(algebra.ring.dimension)
        )

    def coordinates(self) -> tuple[dict[int, Element], dict[int, Element]]:
        """Coefficients in the coordinate frame, ``X = sum X(x_a) d/dx_a +
        sum X(xi_k) d/dxi_k``.
        """
        return dict(self.base_values), dict(self.values)


class AlgebraMorphism:
    """A degree-preserving algebra map given on base coordinates and generators.

    :param source: The algebra mapped from.
    :param target: The algebra mapped to.
    :param base_images: Image of each base coordinate as a scalar of the target base.
    :param images: Image of each generator as a target element of the same degree.
    """

    def __init__(
        self,
        source: FunctionAlgebra,
        target: FunctionAlgebra,
        base_images: t.Sequence[Scalar],
        images: t.Sequence[Element],
    ) -> None:
        if len(base_images) != source.ring.dimension or len(images) != source.size:
            raise ValueError("wrong number of images")

        for k, image in enumerate(images):
            if image and image.degree() != source.degrees[k]:
                raise ValueError(f"image of {source.names[k]} has the wrong degree")

        self.source = source
        self.target = target
        self.base_images = [target.ring.convert(v) for v in base_images]
        self.images = list(images)

    def scalar(self, value: Scalar) -> Scalar:
        return self.source.ring.compose(value, self.base_images, self.target.ring)

    @functools.lru_cache(maxsize=None)  # noqa: B019
    def monomial(self, mono: Monomial) -> Element:
        result = self.target.one

        for g in mono:
            result = result * self.images[g]

        return result

    def __call__(self, element: Element) -> Element:
        result = self.target.zero

        for mono, coeff in element.terms.items():
            result = result + self.monomial(mono) * self.scalar(coeff)

        return result

    def __matmul__(self, other: AlgebraMorphism) -> AlgebraMorphism:
        """Composition of pullbacks, ``self o other``."""
        base = [self.scalar(b) for b in other.base_images]
        images = [self(v) for v in other.images]
        return AlgebraMorphism(other.source, self.target, base, images)

    def intertwines(self, source_q: Derivation, target_q: Derivation) -> bool:
        """Check ``self(Q_source(g)) == Q_target(self(g))`` on generators and base
        coordinates.
        """
        for k in range(self.source.size):
            g = self.source.gen(k)

            if self(source_q(g)) != target_q(self(g)):
                return False

        for a in range(self.source.ring.dimension):
            x = self.source.coordinate(a)

            if self(source_q(x)) != target_q(self(x)):
                return False

        return True


def identity_morphism(algebra: FunctionAlgebra) -> AlgebraMorphism:
    return AlgebraMorphism(
        algebra,
        algebra,
        [algebra.ring.gen(a) for a in range(algebra.ring.dimension)],
        [algebra.gen(k) for k in range(algebra.size)],
    )
