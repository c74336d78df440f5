"""Poly-vector fields, poly-differential operators and the windowed Hochschild
cohomology of the function algebra ``A`` of a bundle over a point.

Poly-vector fields are functions on the shifted cotangent bundle: ``A`` with an
extra generator ``θk`` of degree ``|e_k| + 1`` for every fibre label, standing for
the coordinate derivation ``d/dξk``. Wedge is the product of that algebra and the
Schouten bracket is the odd Poisson bracket with ``[θk, ξj] = δkj``.

A ``p``-differential operator is kept in normal form: a map from ``p`` slot words
to function coefficients. A slot word is a sorted tuple of generator indices and
stands for the composite ``d/dξj1 (d/dξj2 (...))``. With ``D = c ∂^J1 (x) ... (x)
∂^Jp``,

``D(a1, ..., ap) = c * prod_i (-1)^(|∂^Ji| (|a1| + ... + |a(i-1)|)) ∂^Ji(ai)``.

Every operation is computed by evaluating on monomial arguments and reading off
the normal form again, so its signs are the Koszul signs of the formula used.
"""

from __future__ import annotations

import dataclasses
import functools
import itertools
import logging
import math
import typing as t

from sympy import QQ

from . import signs
from .algebra import Derivation
from .algebra import Element
from .algebra import FunctionAlgebra
from .algebra import Monomial
from .bundle import CurvedBundle
from .config import Settings
from .config import default_settings
from .errors import NotMaterializableError
from .graded import check_square_zero
from .graded import cohomology_dimensions
from .linalg import Matrix
from .modules import Section
from .tensors import TensorModule
from .tensors import fibre_label

if t.TYPE_CHECKING:
    from .atiyah import ToddTruncation

logger = logging.getLogger(__name__)

Word = tuple[int, ...]
Key = tuple[Word, ...]


class PolyVectors:
    """The algebra of poly-vector fields over a function algebra.

    :param functions: The function algebra ``A``, over a point.
    :param q: The homological vector field of ``A``.
    """

    def __init__(self, functions: FunctionAlgebra, q: Derivation) -> None:
        n = functions.size
        self.functions = functions
        self.size = n
        self.algebra = FunctionAlgebra(
            functions.ring,
            [*functions.names, *(f"θ{name}" for name in functions.names)],
            [*functions.degrees, *(1 - d for d in functions.degrees)],
        )
        self.q = self.from_derivation(q)
        self._frame = {fibre_label(name): k for k, name in enumerate(functions.names)}

    def embed(self, f: Element) -> Element:
        """A function as a poly-vector of arity 0."""
        return Element(self.algebra, f.terms)

    def theta(self, k: int) -> Element:
        return self.algebra.gen(self.size + k)

    def from_derivation(self, x: Derivation) -> Element:
        """``sum_k X(ξk) θk``."""
        result = self.algebra.zero

        for k, value in x.values.items():
            result = result + self.embed(value) * self.theta(k)

        return result

    def arity(self, mono: Monomial) -> int:
        return sum(1 for g in mono if g >= self.size)

    def arities(self, element: Element) -> set[int]:
        return {self.arity(m) for m in element.terms}

    def split(self, mono: Monomial) -> tuple[Monomial, tuple[int, ...]]:
        """Function part and derivation indices of a monomial."""
        cut = len(mono) - self.arity(mono)
        return mono[:cut], tuple(g - self.size for g in mono[cut:])

    def wedge(self, a: Element, b: Element) -> Element:
        return a * b

    @functools.lru_cache(maxsize=None)  # noqa: B019
    def _generator_bracket(self, g: int) -> Derivation:
        """``[g, -]`` for a generator, a derivation of degree ``|g| - 1``."""
        algebra = self.algebra
        degree = algebra.degrees[g] - 1

        if g < self.size:
            partner = g + self.size
            sign = -signs.koszul(degree, algebra.degrees[partner] - 1)
            return Derivation(algebra, degree, {partner: algebra.one * sign})

        return Derivation(algebra, degree, {g - self.size: algebra.one})

    def adjoint(self, a: Element) -> Derivation:
        """``[a, -]`` for a homogeneous poly-vector, a derivation of degree
        ``|a| - 1`` fixed by ``[a, g] = -(-1)^((|a|-1)(|g|-1)) [g, a]``.
        """
        algebra = self.algebra
        degree = a.degree() - 1
        values = {}

        for g in range(algebra.size):
            sign = -signs.koszul(degree, algebra.degrees[g] - 1)
            values[g] = self._generator_bracket(g)(a) * sign

        return Derivation(algebra, degree, values)

    def schouten(self, a: Element, b: Element) -> Element:
        """The Schouten bracket, bilinear over homogeneous components of ``a``."""
        result = self.algebra.zero

        for part in a.components().values():
            result = result + self.adjoint(part)(b)

        return result

    def lie_q(self, a: Element) -> Element:
        """``L_Q = [Q, -]``."""
        return self.schouten(self.q, a)

    def contract(self, form: Section, a: Element) -> Element:
        """The interior product of a ``k``-form on a poly-vector,
        ``(1/k!) sum_w omega_w d/dθw1 (... d/dθwk (a))``, pairing the frame element
        ``∂e`` with ``θe``.
        """
        module = form.module

        if not isinstance(module, TensorModule):
            raise TypeError("contraction needs a form")

        result = self.algebra.zero

        for label, c in form.coeffs.items():
            _, word = module.keys[label]
            value = a

            for e in reversed(word):
                index = self.size + self._frame[e]
                value = Derivation.coordinate(self.algebra, index)(value)

            result = result + self.embed(c) * value

        return result * QQ(1, math.factorial(module.arity))

    def monomials(self, degree: int, arity: int) -> list[Monomial]:
        """Monomials of the given total degree and arity, sorted."""
        n = self.size
        degrees = self.algebra.degrees
        out = []

        for word in itertools.combinations_with_replacement(range(n), arity):
            if any(
                degrees[n + k] % 2 and word[i + 1] == k
                for i, k in enumerate(word[:-1])
            ):
                continue

            rest = degree - sum(degrees[n + k] for k in word)
            theta = tuple(n + k for k in word)
            out.extend(m + theta for m in self.functions.monomials(rest))

        return sorted(out)


class PolyDiffOperator:
    """A ``p``-differential operator in normal form. Treat as immutable.

    :param hochschild: The complex it belongs to.
    :param arity: The number of slots ``p``.
    :param terms: Map from slot words to function coefficients.
    :param truncated: Set when building it discarded terms of order above the bound.
    """

    __slots__ = ("hochschild", "arity", "terms", "truncated")

    def __init__(
        self,
        hochschild: HochschildComplex,
        arity: int,
        terms: t.Mapping[Key, Element] | None = None,
        truncated: bool = False,
    ) -> None:
        self.hochschild = hochschild
        self.arity = arity
        self.terms: dict[Key, Element] = {k: v for k, v in (terms or {}).items() if v}
        self.truncated = truncated

        if any(len(k) != arity for k in self.terms):
            raise ValueError("slot count does not match the arity")

    def __repr__(self) -> str:
        return f"PolyDiffOperator(arity={self.arity}, {self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"

        functions = self.hochschild.functions
        parts = []

        for key in sorted(self.terms):
            slots = " (x) ".join(word_label(functions, w) for w in key)
            parts.append(f"[{self.terms[key]}] {slots}".rstrip())

        return " + ".join(parts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyDiffOperator):
            return NotImplemented

        if not self.terms and not other.terms:
            return True

        return self.arity == other.arity and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.arity, tuple(sorted(self.terms))))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _check(self, other: PolyDiffOperator) -> None:
        if other.arity != self.arity and self.terms and other.terms:
            raise ValueError("operators of different arity")

    def __add__(self, other: PolyDiffOperator) -> PolyDiffOperator:
        self._check(other)
        arity = self.arity if self.terms else other.arity
        terms = dict(self.terms)

        for key, value in other.terms.items():
            terms[key] = terms[key] + value if key in terms else value

        return PolyDiffOperator(
            self.hochschild, arity, terms, self.truncated or other.truncated
        )

    def __neg__(self) -> PolyDiffOperator:
        return self * -1

    def __sub__(self, other: PolyDiffOperator) -> PolyDiffOperator:
        return self + (-other)

    def __mul__(self, factor: t.Any) -> PolyDiffOperator:
        """Scale by a rational number."""
        return PolyDiffOperator(
            self.hochschild,
            self.arity,
            {k: v * factor for k, v in self.terms.items()},
            self.truncated,
        )

    def key_degree(self, key: Key) -> int:
        return sum(self.hochschild.word_degree(w) for w in key)

    def degrees(self) -> set[int]:
        return {
            self.key_degree(k) + d for k, v in self.terms.items() for d in v.degrees()
        }

    def degree(self) -> int:
        """Internal degree of a homogeneous operator. Zero has degree 0."""
        found = self.degrees()

        if len(found) > 1:
            raise ValueError(f"operator is not homogeneous: degrees {sorted(found)}")

        return found.pop() if found else 0

    def components(self) -> dict[int, PolyDiffOperator]:
        parts: dict[int, dict[Key, Element]] = {}

        for key, value in self.terms.items():
            shift = self.key_degree(key)

            for d, part in value.components().items():
                parts.setdefault(d + shift, {})[key] = part

        return {
            d: PolyDiffOperator(self.hochschild, self.arity, terms, self.truncated)
            for d, terms in sorted(parts.items())
        }

    def order(self) -> int:
        """The largest slot word length."""
        return max((len(w) for k in self.terms for w in k), default=0)

    def __call__(self, *args: Element) -> Element:
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")

        hochschild = self.hochschild
        result = hochschild.functions.zero
        pieces = [list(a.components().items()) for a in args]

        for choice in itertools.product(*pieces):
            for key, coeff in self.terms.items():
                value = coeff
                before = 0

                for word, (d, a) in zip(key, choice):
                    sign = signs.koszul(hochschild.word_degree(word), before)
                    value = value * hochschild.apply_word(word, a) * sign
                    before += d

                    if not value:
                        break

                result = result + value

        return result


def word_label(functions: FunctionAlgebra, word: Word) -> str:
    if not word:
        return "1"

    return "".join(f"∂{functions.names[k]}" for k in word)


class HochschildComplex:
    """The Hochschild complex of the function algebra of a bundle over a point,
    with the poly-vector side and the HKR map between them.

    :param bundle: A bundle over a point.
    :param settings: Default arity and order bounds.
    """

    def __init__(
        self, bundle: CurvedBundle, *, settings: Settings = default_settings
    ) -> None:
        if not bundle.ring.is_point:
            raise NotMaterializableError("Hochschild windows need a point base")

        self.bundle = bundle
        self.settings = settings
        self.functions = bundle.algebra
        self.q = bundle.q
        self.partials = [
            Derivation.coordinate(self.functions, k)
            for k in range(self.functions.size)
        ]
        self.poly = PolyVectors(self.functions, self.q)

    def word_degree(self, word: Word) -> int:
        return -sum(self.functions.degrees[k] for k in word)

    def apply_word(self, word: Word, a: Element) -> Element:
        for k in reversed(word):
            a = self.partials[k](a)

            if not a:
                break

        return a

    @functools.lru_cache(maxsize=None)  # noqa: B019
    def words(self, top: int, bottom: int = 0) -> tuple[Word, ...]:
        """Slot words with length in ``bottom..top``, shortest first. Odd generators
        appear at most once.
        """
        degrees = self.functions.degrees
        out = []

        for length in range(bottom, top + 1):
            for word in itertools.combinations_with_replacement(
                range(self.functions.size), length
            ):
                if any(
                    degrees[k] % 2 and word[i + 1] == k
                    for i, k in enumerate(word[:-1])
                ):
                    continue

                out.append(word)

        return tuple(out)

    def operator(
        self, arity: int, terms: t.Mapping[Key, Element] | None = None
    ) -> PolyDiffOperator:
        return PolyDiffOperator(self, arity, terms)

    def function(self, f: Element) -> PolyDiffOperator:
        return PolyDiffOperator(self, 0, {(): f})

    def from_derivation(self, x: Derivation) -> PolyDiffOperator:
        """A vector field as a 1-differential operator."""
        return PolyDiffOperator(self, 1, {((k,),): v for k, v in x.values.items()})

    def extract(
        self,
        func: t.Callable[..., Element],
        arity: int,
        order: int,
        *,
        bound: int | None = None,
    ) -> PolyDiffOperator:
        """Read the normal form of a multilinear operator from its values on
        monomials, assuming slot order at most ``bound``. Terms of order above
        ``order`` are dropped and flag the result as truncated.
        """
        if bound is None:
            bound = order

        functions = self.functions
        one = functions.ring.one
        words = self.words(bound)
        keys = sorted(
            itertools.product(words, repeat=arity), key=lambda k: sum(map(len, k))
        )
        found = PolyDiffOperator(self, arity)
        kept: dict[Key, Element] = {}
        truncated = False

        for key in keys:
            args = [Element(functions, {w: one}) for w in key]
            residual = func(*args) - found(*args)

            if not residual:
                continue

            unit = PolyDiffOperator(self, arity, {key: functions.one})(*args)
            coeff = residual * (QQ.one / unit.constant)
            found = found + PolyDiffOperator(self, arity, {key: coeff})

            if any(len(w) > order for w in key):
                truncated = True
            else:
                kept[key] = coeff

        if truncated:
            logger.debug("truncated an arity %d operator to order %d", arity, order)

        return PolyDiffOperator(self, arity, kept, truncated)

    def hkr(self, a: Element) -> PolyDiffOperator:
        """The HKR map. A monomial ``f θj1 ... θjp`` is the product of the vector
        fields ``X1 = f d/dξj1`` and ``Xi = d/dξji``, and maps to

        ``(-1)^(sum_i (i-1)|Xi|) (1/p!) sum_σ sign(σ) κ(σ) X_σ(1) (x) ... (x) X_σ(p)``

        where ``κ`` is the Koszul sign of the reordering in the degrees ``|Xi|``.
        """
        functions = self.functions
        arities = self.poly.arities(a)
        arity = max(arities, default=0)

        if len(arities) > 1:
            raise ValueError("poly-vector is not of a single arity")

        terms: dict[Key, Element] = {}

        for mono, coeff in a.terms.items():
            head, js = self.poly.split(mono)
            f = Element(functions, {head: coeff})

            if not js:
                terms[()] = terms.get((), functions.zero) + f
                continue

            df = functions.monomial_degree(head)
            slot_degrees = [self.word_degree((j,)) for j in js]
            xd = [df + slot_degrees[0], *slot_degrees[1:]]
            front = signs.power(sum(i * d for i, d in enumerate(xd)))
            weight = QQ(1, math.factorial(len(js)))

            for order in itertools.permutations(range(len(js))):
                kappa = signs.sign_of_permutation(order) * signs.permutation_sign(
                    xd, order
                )
                r = order.index(0)
                pull = signs.koszul(df, sum(slot_degrees[i] for i in order[:r]))
                key = tuple((js[i],) for i in order)
                value = f * (weight * (front * kappa * pull))
                terms[key] = terms[key] + value if key in terms else value

        return PolyDiffOperator(self, arity, terms)

    def hochschild_differential(self, op: PolyDiffOperator) -> PolyDiffOperator:
        """``(d_H D)(a0, ..., ap) = (-1)^(|D||a0|) a0 D(a1, ..., ap)
        + sum_i (-1)^i D(..., a(i-1) ai, ...) + (-1)^(p+1) D(a0, ..., a(p-1)) ap``.
        """
        p = op.arity
        result = PolyDiffOperator(self, p + 1)

        for d, part in op.components().items():

            def func(
                *args: Element, part: PolyDiffOperator = part, d: int = d
            ) -> Element:
                value = (args[0] * part(*args[1:])) * signs.koszul(d, args[0].degree())

                for i in range(1, p + 1):
                    merged = [*args[: i - 1], args[i - 1] * args[i], *args[i + 1 :]]
                    value = value + part(*merged) * signs.power(i)

                return value + (part(*args[:p]) * args[p]) * signs.power(p + 1)

            result = result + self.extract(func, p + 1, part.order())

        result.truncated = result.truncated or op.truncated
        return result

    def q_differential(self, op: PolyDiffOperator) -> PolyDiffOperator:
        """``[[Q, D]](a1, ..., ap) = Q(D(a)) - (-1)^|D| sum_i (-1)^(|a1| + ... +
        |a(i-1)|) D(..., Q ai, ...)``.
        """
        p = op.arity
        q = self.q
        result = PolyDiffOperator(self, p)

        for d, part in op.components().items():

            def func(
                *args: Element, part: PolyDiffOperator = part, d: int = d
            ) -> Element:
                value = q(part(*args))
                before = 0

                for i, a in enumerate(args):
                    inner = [*args[:i], q(a), *args[i + 1 :]]
                    value = value - part(*inner) * signs.power(d + before)
                    before += a.degree()

                return value

            order = part.order()
            result = result + self.extract(func, p, order, bound=order + 1)

        result.truncated = result.truncated or op.truncated
        return result

    def total_differential(self, op: PolyDiffOperator) -> dict[int, PolyDiffOperator]:
        """``d_H D + (-1)^p [[Q, D]]``, split by arity."""
        p = op.arity
        return {
            p + 1: self.hochschild_differential(op),
            p: self.q_differential(op) * signs.power(p),
        }

    def cup(self, left: PolyDiffOperator, right: PolyDiffOperator) -> PolyDiffOperator:
        """``(D1 u D2)(a1, ..., a(p+q)) = (-1)^(|D2|(|a1| + ... + |ap|))
        D1(a1, ..., ap) D2(a(p+1), ..., a(p+q))``.
        """
        p, q = left.arity, right.arity
        result = PolyDiffOperator(self, p + q)

        for d, part in right.components().items():

            def func(
                *args: Element, part: PolyDiffOperator = part, d: int = d
            ) -> Element:
                before = sum(a.degree() for a in args[:p])
                return (left(*args[:p]) * part(*args[p:])) * signs.koszul(d, before)

            order = max(left.order(), part.order())
            result = result + self.extract(func, p + q, order)

        result.truncated = left.truncated or right.truncated
        return result

    def compose_at(
        self,
        left: PolyDiffOperator,
        right: PolyDiffOperator,
        i: int,
        *,
        order: int | None = None,
    ) -> PolyDiffOperator:
        """``D1 o_i D2``, inserting ``D2`` into slot ``i`` (from 0) with the sign
        ``(-1)^(|D2|(|a1| + ... + |ai|))``. Slot orders above ``order`` are
        truncated.
        """
        p, q = left.arity, right.arity

        if not 0 <= i < p:
            raise ValueError(f"no slot {i} in an operator of arity {p}")

        if order is None:
            order = self.settings.truncate_order

        result = PolyDiffOperator(self, p + q - 1)

        for d, part in right.components().items():

            def func(
                *args: Element, part: PolyDiffOperator = part, d: int = d
            ) -> Element:
                before = sum(a.degree() for a in args[:i])
                inner = part(*args[i : i + q])
                outer = left(*args[:i], inner, *args[i + q :])
                return outer * signs.koszul(d, before)

            bound = left.order() + part.order()
            result = result + self.extract(func, p + q - 1, order, bound=bound)

        result.truncated = result.truncated or left.truncated or right.truncated
        return result

    def pre_lie(
        self,
        left: PolyDiffOperator,
        right: PolyDiffOperator,
        *,
        order: int | None = None,
    ) -> PolyDiffOperator:
        """``D1 o D2 = sum_i (-1)^((q-1) i) D1 o_i D2``."""
        q = right.arity
        result = PolyDiffOperator(self, max(left.arity + q - 1, 0))

        for i in range(left.arity):
            term = self.compose_at(left, right, i, order=order)
            result = result + term * signs.power((q - 1) * i)

        return result

    def bracket(
        self,
        left: PolyDiffOperator,
        right: PolyDiffOperator,
        *,
        order: int | None = None,
    ) -> PolyDiffOperator:
        """``[[D1, D2]] = D1 o D2 - (-1)^((p-1)(q-1) + |D1||D2|) D2 o D1`` for
        homogeneous operators.
        """
        exponent = (left.arity - 1) * (right.arity - 1) + left.degree() * right.degree()
        return self.pre_lie(left, right, order=order) - self.pre_lie(
            right, left, order=order
        ) * signs.power(exponent)

    @functools.cached_property
    def q_operator(self) -> PolyDiffOperator:
        """``Q`` as a 1-cochain."""
        return self.from_derivation(self.q)

    # materialized cells

    def cell(self, arity: int, degree: int, order: int) -> list[tuple[Monomial, Key]]:
        """Basis of normalized operators of the given arity and internal degree with
        slot words of length ``1..order``.
        """
        functions = self.functions
        out = []

        for key in itertools.product(self.words(order, 1), repeat=arity):
            rest = degree - sum(self.word_degree(w) for w in key)
            out.extend((m, key) for m in functions.monomials(rest))

        return sorted(out)

    def cell_label(self, mono: Monomial, key: Key) -> str:
        functions = self.functions
        return "|".join(
            [functions.monomial_label(mono), *(word_label(functions, w) for w in key)]
        )


def contract_todd(poly: PolyVectors, a: Element, todd: ToddTruncation) -> Element:
    """The contraction of a poly-vector with the square root of the Todd class."""
    result = poly.algebra.zero

    for piece in todd.root.values():
        if piece:
            result = result + poly.contract(piece, a)

    return result


class _TotalComplex:
    """The total complex of normalized poly-differential operators of arity at most
    ``arity`` and slot order at most ``order``, with differential
    ``d_H + (-1)^p [[Q, -]]``. Arity ``arity + 1`` is dropped, making the slice a
    quotient complex.
    """

    def __init__(self, hochschild: HochschildComplex, arity: int, order: int) -> None:
        self.hochschild = hochschild
        self.arity = arity
        self.order = order

    @functools.lru_cache(maxsize=None)  # noqa: B019
    def cells(self, degree: int) -> tuple[tuple[int, Monomial, Key], ...]:
        return tuple(
            (p, mono, key)
            for p in range(self.arity + 1)
            for mono, key in self.hochschild.cell(p, degree - p, self.order)
        )

    def basis(self, degree: int) -> tuple[str, ...]:
        label = self.hochschild.cell_label
        return tuple(f"{p}:{label(m, k)}" for p, m, k in self.cells(degree))

    @functools.lru_cache(maxsize=None)  # noqa: B019
    def differential(self, degree: int) -> Matrix:
        hochschild = self.hochschild
        source = self.cells(degree)
        target = self.cells(degree + 1)
        index = {(p, m, k): i for i, (p, m, k) in enumerate(target)}
        one = hochschild.functions.ring.one
        rows: dict[int, dict[int, t.Any]] = {}

        for j, (p, mono, key) in enumerate(source):
            coeff = Element(hochschild.functions, {mono: one})
            op = hochschild.operator(p, {key: coeff})

            for arity, image in hochschild.total_differential(op).items():
                if arity > self.arity:
                    continue

                for k, coeff in image.terms.items():
                    for m, c in coeff.terms.items():
                        i = index.get((arity, m, k))

                        if i is None:
                            raise AssertionError(
                                f"differential leaves the window: {arity} {m} {k}"
                            )

                        rows.setdefault(i, {})[j] = c

        return Matrix(len(target), len(source), rows)


class _PolyVectorComplex:
    """Poly-vectors of a single arity ``p`` with differential ``(-1)^p L_Q``."""

    def __init__(self, poly: PolyVectors, arity: int) -> None:
        self.poly = poly
        self.arity = arity

    def basis(self, degree: int) -> tuple[str, ...]:
        algebra = self.poly.algebra
        return tuple(
            algebra.monomial_label(m) for m in self.poly.monomials(degree, self.arity)
        )

    def differential(self, degree: int) -> Matrix:
        poly = self.poly
        source = poly.monomials(degree, self.arity)
        target = poly.monomials(degree + 1, self.arity)
        index = {m: i for i, m in enumerate(target)}
        sign = signs.power(self.arity)
        rows: dict[int, dict[int, t.Any]] = {}

        for j, mono in enumerate(source):
            image = poly.lie_q(poly.algebra.monomial(mono))

            for m, c in image.terms.items():
                rows.setdefault(index[m], {})[j] = c * sign

        return Matrix(len(target), len(source), rows)


@dataclasses.dataclass()
class WindowCell:
    degree: int
    rank: int
    enlarged_rank: int
    poly_ranks: dict[int, int]

    @property
    def stable(self) -> bool:
        """The rank did not change when both bounds grew by one."""
        return self.rank == self.enlarged_rank

    @property
    def poly_rank(self) -> int:
        return sum(self.poly_ranks.values())


@dataclasses.dataclass()
class HochschildWindow:
    """Ranks of the truncated total complex on a degree window, with the ranks after
    growing both bounds by one and the poly-vector ranks by arity.
    """

    arity: int
    order: int
    window: tuple[int, int]
    cells: list[WindowCell]

    @property
    def inconclusive(self) -> list[int]:
        return [c.degree for c in self.cells if not c.stable]

    @property
    def agrees(self) -> bool:
        """Stable ranks equal the poly-vector ranks."""
        return all(c.rank == c.poly_rank for c in self.cells if c.stable)

    def table(self) -> list[dict[str, t.Any]]:
        return [
            {
                "degree": c.degree,
                "rank": c.rank,
                "enlarged_rank": c.enlarged_rank,
                "stable": c.stable,
                "poly_rank": c.poly_rank,
                "poly_ranks": {str(p): r for p, r in c.poly_ranks.items()},
            }
            for c in self.cells
        ]


def windowed_hh(
    bundle: CurvedBundle,
    window: tuple[int, int] | None = None,
    *,
    arity: int | None = None,
    order: int | None = None,
    settings: Settings = default_settings,
) -> HochschildWindow:
    """Cohomology ranks of the Hochschild total complex on a window of total degrees,
    truncated at arity ``P`` and slot order ``R``, compared with the bounds
    ``P + 1, R + 1`` and with the poly-vector side.

    :param bundle: A bundle over a point.
    :param window: Closed window of total degrees. An empty window gives no cells.
    :param arity: The arity bound ``P``.
    :param order: The slot order bound ``R``.
    """
    if window is None:
        window = settings.window(bundle.amplitude)

    if arity is None:
        arity = settings.truncate_arity

    if order is None:
        order = settings.truncate_order

    hochschild = HochschildComplex(bundle, settings=settings)
    small = _TotalComplex(hochschild, arity, order)
    large = _TotalComplex(hochschild, arity + 1, order + 1)
    t0, t1 = window

    if t0 > t1:
        return HochschildWindow(arity, order, window, [])

    check_square_zero(small, range(t0 - 1, t1 + 1))
    ranks = cohomology_dimensions(small, window)
    enlarged = cohomology_dimensions(large, window)
    poly = {
        p: cohomology_dimensions(_PolyVectorComplex(hochschild.poly, p), window)
        for p in range(arity + 1)
    }
    cells = [
        WindowCell(n, ranks[n], enlarged[n], {p: poly[p][n] for p in poly})
        for n in range(t0, t1 + 1)
    ]
    result = HochschildWindow(arity, order, window, cells)

    if result.inconclusive:
        logger.info("unstable Hochschild degrees %s", result.inconclusive)

    return result


@dataclasses.dataclass()
class HkrReport:
    """Exact checks of the HKR compatibilities on every poly-vector monomial of the
    listed degrees and arities.
    """

    degrees: tuple[int, int]
    arity: int
    samples: int
    checks: list[tuple[str, bool]]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)


def hkr_check(
    bundle: CurvedBundle,
    window: tuple[int, int] | None = None,
    *,
    arity: int | None = None,
    settings: Settings = default_settings,
) -> HkrReport:
    """Check ``[Q, Q] = 0``, ``L_Q^2 = 0`` on generators, ``d_H o hkr = 0`` and
    ``hkr o L_Q = [[Q, -]] o hkr`` on poly-vector monomials of the window.
    """
    if window is None:
        window = settings.window(bundle.amplitude)

    if arity is None:
        arity = settings.truncate_arity

    hochschild = HochschildComplex(bundle, settings=settings)
    poly = hochschild.poly
    algebra = poly.algebra
    generators = [algebra.gen(g) for g in range(algebra.size)]
    closed = True
    intertwines = True
    samples = 0

    for p in range(arity + 1):
        for n in range(window[0], window[1] + 1):
            for mono in poly.monomials(n, p):
                a = algebra.monomial(mono)
                image = hochschild.hkr(a)
                samples += 1

                if hochschild.hochschild_differential(image):
                    logger.debug("d_H hkr(%s) is not zero", a)
                    closed = False

                if hochschild.hkr(poly.lie_q(a)) != hochschild.q_differential(image):
                    logger.debug("hkr does not intertwine L_Q at %s", a)
                    intertwines = False

    checks = [
        ("[Q, Q] = 0", not poly.schouten(poly.q, poly.q)),
        (
            "L_Q^2 = 0 on generators",
            not any(poly.lie_q(poly.lie_q(g)) for g in generators),
        ),
        ("d_H o hkr = 0", closed),
        ("hkr o L_Q = [[Q, -]] o hkr", intertwines),
    ]
    return HkrReport(window, arity, samples, checks)
