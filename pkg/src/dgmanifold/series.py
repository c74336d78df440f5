"""Exact truncated power series: Bernoulli numbers, the Todd series
``x / (1 - e^-x)`` and its expression through power sums, and the Berezinian of
even supermatrices over a Grassmann algebra.
"""

from __future__ import annotations

import functools
import itertools
import math
import typing as t

import sympy
from sympy import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement
from sympy.polys.rings import ring

from . import signs
from .algebra import Element
from .algebra import FunctionAlgebra
from .scalars import ScalarRing


@functools.lru_cache(maxsize=None)
def bernoulli(n: int) -> tuple[t.Any, ...]:
    """``B_0, ..., B_n`` with ``B_1 = -1/2``, whatever sign sympy uses for it."""
    numbers = [QQ.from_sympy(sympy.bernoulli(k)) for k in range(n + 1)]

    if n >= 1:
        numbers[1] = QQ(-1, 2)

    return tuple(numbers)


class TruncatedSeries:
    """A power series in one variable with rational coefficients, modulo
    ``x^(order+1)``.
    """

    __slots__ = ("coefficients", "order")

    def __init__(self, coefficients: t.Iterable[t.Any], order: int) -> None:
        values = [QQ.convert(c) for c in coefficients][: order + 1]
        values.extend([QQ(0)] * (order + 1 - len(values)))
        self.coefficients: tuple[t.Any, ...] = tuple(values)
        self.order = order

    def __repr__(self) -> str:
        terms = [f"{c}*x^{i}" for i, c in enumerate(self.coefficients) if c]
        return f"TruncatedSeries({' + '.join(terms) or '0'}, order={self.order})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented

        return self.order == other.order and self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash((self.coefficients, self.order))

    def __getitem__(self, k: int) -> t.Any:
        return self.coefficients[k]

    @classmethod
    def x(cls, order: int) -> TruncatedSeries:
        return cls([0, 1], order)

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        return TruncatedSeries(
            (a + b for a, b in zip(self.coefficients, other.coefficients)),
            min(self.order, other.order),
        )

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries((-c for c in self.coefficients), self.order)

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        return self + (-other)

    def __mul__(self, other: TruncatedSeries | t.Any) -> TruncatedSeries:
        if not isinstance(other, TruncatedSeries):
            value = QQ.convert(other)
            return TruncatedSeries((c * value for c in self.coefficients), self.order)

        order = min(self.order, other.order)
        out = [QQ(0)] * (order + 1)

        for i, a in enumerate(self.coefficients[: order + 1]):
            if not a:
                continue

            for j in range(order + 1 - i):
                out[i + j] += a * other.coefficients[j]

        return TruncatedSeries(out, order)

    def exp(self) -> TruncatedSeries:
        """``exp`` of a series without constant term, by the recursion
        ``(i+1) e_(i+1) = sum_j (j+1) a_(j+1) e_(i-j)``.
        """
        if self.coefficients[0]:
            raise ValueError("exp needs a series without constant term")

        p = [QQ(i) * c for i, c in enumerate(self.coefficients)]
        e = [QQ(1)] + [QQ(0)] * self.order

        for i in range(self.order):
            e[i + 1] = sum((p[j + 1] * e[i - j] for j in range(i + 1)), QQ(0)) / (i + 1)

        return TruncatedSeries(e, self.order)

    def inverse(self) -> TruncatedSeries:
        first = self.coefficients[0]

        if not first:
            raise ValueError("series is not invertible")

        out = [QQ(1) / first]

        for n in range(1, self.order + 1):
            total = sum(
                (self.coefficients[k] * out[n - k] for k in range(1, n + 1)), QQ(0)
            )
            out.append(-total / first)

        return TruncatedSeries(out, self.order)


def exp_series(order: int) -> TruncatedSeries:
    return TruncatedSeries((QQ(1, math.factorial(k)) for k in range(order + 1)), order)


def todd_series(order: int) -> TruncatedSeries:
    """``x / (1 - e^-x)``, the inverse of ``(1 - e^-x) / x``."""
    quotient = [
        QQ((-1) ** k, math.factorial(k + 1)) for k in range(order + 1)
    ]
    return TruncatedSeries(quotient, order).inverse()


def todd_exponent(order: int) -> TruncatedSeries:
    """``-sum_(k>=1) B_k / (k k!) x^k``, whose exponential is :func:`todd_series`."""
    numbers = bernoulli(order)
    return TruncatedSeries(
        [QQ(0)]
        + [-numbers[k] / QQ(k * math.factorial(k)) for k in range(1, order + 1)],
        order,
    )


def todd_polynomial(
    order: int, scale: t.Any = 1
) -> tuple[t.Any, list[PolyElement]]:
    """The Todd class as a polynomial in power sums ``s_k = str(A^k)``, split by
    weight ``deg s_k = k``. Returns the polynomial ring and the pieces of weight
    ``0..order``. With ``scale`` the exponent is multiplied by it, so ``1/2`` gives
    the square root.
    """
    if order < 1:
        raise ValueError("order must be at least 1")

    names = [f"s{k}" for k in range(1, order + 1)]
    poly_ring, *gens = ring(",".join(names), QQ, grlex)
    exponent = todd_exponent(order)
    comps = [poly_ring.zero] + [
        gens[k - 1] * (exponent[k] * QQ.convert(scale))
        for k in range(1, order + 1)
    ]
    p = [comps[i] * i for i in range(order + 1)]
    e = [poly_ring.one] + [poly_ring.zero] * order

    for i in range(order):
        total = poly_ring.zero

        for j in range(i + 1):
            total += p[j + 1] * e[i - j]

        e[i + 1] = total * QQ(1, i + 1)

    return poly_ring, e


def grassmann_algebra(odd: int) -> FunctionAlgebra:
    """Rational Grassmann algebra on ``θ1, ..., θ(odd)`` with an even parameter
    ``t`` used for truncation.
    """
    names = ["t", *(f"θ{i + 1}" for i in range(odd))]
    return FunctionAlgebra(ScalarRing(0), names, [-2, *([-1] * odd)])


def truncate(element: Element, order: int) -> Element:
    """Drop terms of ``t``-degree above ``order``."""
    return Element(
        element.algebra,
        {m: c for m, c in element.terms.items() if m.count(0) <= order},
    )


class Supermatrix:
    """A square matrix of Grassmann elements with rows and columns split into an
    even block of size ``p`` and an odd block of size ``q``. An even supermatrix has
    even entries in the diagonal blocks and odd entries off the diagonal.
    """

    def __init__(
        self, even: int, odd: int, entries: t.Sequence[t.Sequence[Element]]
    ) -> None:
        n = even + odd

        if len(entries) != n or any(len(row) != n for row in entries):
            raise ValueError(f"expected a {n}x{n} matrix")

        self.even = even
        self.odd = odd
        self.entries = [list(row) for row in entries]
        self.algebra = entries[0][0].algebra

    @property
    def size(self) -> int:
        return self.even + self.odd

    def parity(self, i: int) -> int:
        return 0 if i < self.even else 1

    @classmethod
    def identity(cls, even: int, odd: int, algebra: FunctionAlgebra) -> Supermatrix:
        return cls(even, odd, _identity_rows(even + odd, algebra))

    def is_even(self) -> bool:
        """Entries of block ``(i, j)`` have parity ``parity(i) + parity(j)``."""
        for i, row in enumerate(self.entries):
            for j, entry in enumerate(row):
                wanted = (self.parity(i) + self.parity(j)) % 2

                if any(d % 2 != wanted for d in entry.degrees()):
                    return False

        return True

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Supermatrix):
            return NotImplemented

        left = (self.even, self.odd, self.entries)
        return left == (other.even, other.odd, other.entries)

    def __hash__(self) -> int:
        return hash((self.even, self.odd))

    def __add__(self, other: Supermatrix) -> Supermatrix:
        return Supermatrix(
            self.even,
            self.odd,
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.entries, other.entries)
            ],
        )

    def __sub__(self, other: Supermatrix) -> Supermatrix:
        return self + other.scale(-1)

    def scale(self, factor: Element | t.Any) -> Supermatrix:
        """Left multiplication by an even element or a rational."""
        if isinstance(factor, Element):
            rows = [[factor * e for e in row] for row in self.entries]
        else:
            rows = [[e * factor for e in row] for row in self.entries]

        return Supermatrix(self.even, self.odd, rows)

    def __matmul__(self, other: Supermatrix) -> Supermatrix:
        n = self.size
        rows = []

        for i in range(n):
            row = []

            for j in range(n):
                total = self.algebra.zero

                for k in range(n):
                    total = total + self.entries[i][k] * other.entries[k][j]

                row.append(total)

            rows.append(row)

        return Supermatrix(self.even, self.odd, rows)

    def truncate(self, order: int) -> Supermatrix:
        return Supermatrix(
            self.even,
            self.odd,
            [[truncate(e, order) for e in row] for row in self.entries],
        )

    def is_zero(self) -> bool:
        return not any(e for row in self.entries for e in row)

    def block(self, rows: int, columns: int) -> list[list[Element]]:
        """Block ``(rows, columns)``, each 0 for even or 1 for odd."""
        r = range(self.even) if rows == 0 else range(self.even, self.size)
        c = range(self.even) if columns == 0 else range(self.even, self.size)
        return [[self.entries[i][j] for j in c] for i in r]

    def supertrace(self) -> Element:
        """``str A = tr A_00 - tr A_11``."""
        total = self.algebra.zero

        for i in range(self.size):
            entry = self.entries[i][i]
            total = total + (entry * signs.supertrace_sign(self.parity(i)))

        return total

    def exp(self, order: int) -> Supermatrix:
        """``exp(t A) = sum_(j <= order) t^j A^j / j!``."""
        t_ = self.algebra.gen(0)
        identity = Supermatrix.identity(self.even, self.odd, self.algebra)
        result = identity
        power = identity

        for j in range(1, order + 1):
            power = (power @ self).truncate(order)
            term = power.scale(t_**j).scale(QQ(1, math.factorial(j)))
            result = (result + term).truncate(order)

        return result


def _identity_rows(n: int, algebra: FunctionAlgebra) -> list[list[Element]]:
    one, zero = algebra.one, algebra.zero
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def _nilpotent_geometric(
    e: list[list[Element]], algebra: FunctionAlgebra, order: int
) -> list[list[Element]]:
    """``(1 + E)^-1 = sum_j (-E)^j`` for a nilpotent even matrix ``E``."""
    n = len(e)

    if any(e[i][j].constant for i in range(n) for j in range(n)):
        raise ValueError("block is not unipotent")

    identity = _identity_rows(n, algebra)
    minus = [[-x for x in row] for row in e]
    total = [row[:] for row in identity]
    term = identity

    while True:
        term = _truncate_rows(_multiply(term, minus, algebra), order)

        if not any(x for row in term for x in row):
            return total

        total = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(total, term)]


def _multiply(
    a: list[list[Element]], b: list[list[Element]], algebra: FunctionAlgebra
) -> list[list[Element]]:
    rows = []

    for i in range(len(a)):
        row = []

        for j in range(len(b[0]) if b else 0):
            total = algebra.zero

            for k in range(len(b)):
                total = total + a[i][k] * b[k][j]

            row.append(total)

        rows.append(row)

    return rows


def _truncate_rows(rows: list[list[Element]], order: int) -> list[list[Element]]:
    return [[truncate(x, order) for x in row] for row in rows]


def determinant(rows: list[list[Element]], order: int) -> Element:
    """Leibniz expansion for a matrix with even, hence commuting, entries."""
    n = len(rows)
    algebra = rows[0][0].algebra if n else None

    if algebra is None:
        raise ValueError("empty matrix")

    total = algebra.zero

    for perm in itertools.permutations(range(n)):
        term = algebra.scalar(signs.sign_of_permutation(perm))

        for i, j in enumerate(perm):
            term = truncate(term * rows[i][j], order)

        total = total + term

    return total


def berezinian(matrix: Supermatrix, order: int) -> Element:
    """``Ber M = det(M_00 - M_01 M_11^-1 M_10) / det(M_11)`` for an even
    supermatrix whose odd block is unipotent, truncated in ``t``.
    """
    algebra = matrix.algebra
    q = matrix.odd
    m00, m01 = matrix.block(0, 0), matrix.block(0, 1)
    m10, m11 = matrix.block(1, 0), matrix.block(1, 1)

    if q:
        e = [
            [m11[i][j] - (algebra.one if i == j else algebra.zero) for j in range(q)]
            for i in range(q)
        ]
        inverse = _nilpotent_geometric(e, algebra, order)
        correction = _truncate_rows(
            _multiply(_multiply(m01, inverse, algebra), m10, algebra), order
        )
        x = [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(m00, correction)]
        d11 = determinant(m11, order)
        inv11 = _nilpotent_geometric([[d11 - algebra.one]], algebra, order)[0][0]
    else:
        x = m00
        inv11 = algebra.one

    top = determinant(x, order) if matrix.even else algebra.one
    return truncate(top * inv11, order)


def exp_element(element: Element, order: int) -> Element:
    """``exp(t a)`` for an even element ``a``, truncated in ``t``."""
    algebra = element.algebra
    t_ = algebra.gen(0)
    result = algebra.one
    power = algebra.one

    for j in range(1, order + 1):
        power = truncate(power * t_ * element, order)
        result = result + power * QQ(1, math.factorial(j))

    return truncate(result, order)


def ber_exp_holds(matrix: Supermatrix, order: int) -> bool:
    """``Ber(exp(t A)) = exp(t str A)`` modulo ``t^(order+1)``."""
    if not matrix.is_even():
        raise ValueError("the identity is stated for even supermatrices")

    left = berezinian(matrix.exp(order), order)
    right = exp_element(matrix.supertrace(), order)
    return left == right
