"""Seeded generators of test objects. Every generator takes a
:class:`random.Random` and draws from it in a fixed order, so a seed always gives
the same object.

Valid bundles are built as ``exp(ad X) Q0`` where ``Q0`` is a linear differential
made of disjoint pairs and ``X`` is a degree 0 derivation raising word length.
Conjugating by an automorphism keeps ``[Q, Q] = 0``.
"""

from __future__ import annotations

import dataclasses
import logging
import random
import typing as t

from sympy import QQ

from . import linalg
from .algebra import Derivation
from .algebra import Element
from .algebra import FunctionAlgebra
from .atiyah import AffineConnection
from .bundle import CurvedBundle
from .bundle import affine
from .bundle import point
from .bundle import relation_name
from .graded import GradedVectorSpace
from .linalg import Matrix
from .morphism import LinftyMorphism
from .scalars import ScalarRing
from .series import Supermatrix
from .series import grassmann_algebra
from .tensors import FibreConnection
from .tensors import VectorFieldModule

logger = logging.getLogger(__name__)


def coefficient(rng: random.Random, bound: int = 3) -> t.Any:
    """A nonzero integer in ``[-bound, bound]`` as a rational."""
    value = rng.randint(1, bound) * rng.choice((1, -1))
    return QQ(value)


def _base_scalar(rng: random.Random, ring: ScalarRing) -> t.Any:
    """A nonzero constant, or on an affine base ``c0 + c1 x_a``."""
    value = ring.convert(coefficient(rng))

    if ring.dimension and rng.random() < 0.5:
        value = value + ring.gen(rng.randrange(ring.dimension)) * coefficient(rng)

    return value


def _words(
    algebra: FunctionAlgebra, degree: int, shortest: int
) -> list[tuple[int, ...]]:
    """Monomial words of a degree, enumerated on a point base so that affine
    algebras can use them too.
    """
    twin = FunctionAlgebra(point(), algebra.names, algebra.degrees)
    return [w for w in twin.monomials(degree) if len(w) >= shortest]


def _random_function(
    rng: random.Random,
    algebra: FunctionAlgebra,
    degree: int,
    density: float,
    shortest: int = 0,
) -> Element:
    terms = {
        word: _base_scalar(rng, algebra.ring)
        for word in _words(algebra, degree, shortest)
        if rng.random() < density
    }
    total = algebra.zero

    for word, c in terms.items():
        total = total + algebra.monomial(word) * algebra.scalar(c)

    return total


def _fibre(
    rng: random.Random, amplitude: int, rank: int, prefix: str
) -> dict[str, int]:
    return {f"{prefix}{i + 1}": rng.randint(1, amplitude) for i in range(rank)}


def _pairs(
    rng: random.Random, labels: t.Mapping[str, int], probability: float = 0.6
) -> list[tuple[str, str]]:
    """Disjoint ``(source, target)`` pairs with ``deg target = deg source + 1``."""
    free = sorted(labels, key=lambda a: (labels[a], a))
    pairs = []

    for source in list(free):
        if source not in free:
            continue

        targets = [a for a in free if labels[a] == labels[source] + 1]

        if targets and rng.random() < probability:
            target = rng.choice(targets)
            free.remove(source)
            free.remove(target)
            pairs.append((source, target))

    return pairs


def conjugate(q: Derivation, x: Derivation, limit: int = 64) -> Derivation:
    """``exp(ad X) Q = Q + [X, Q] + [X, [X, Q]] / 2 + ...`` for ``X`` of degree 0
    raising word length, where the series is finite.
    """
    total = q
    term = q

    for n in range(1, limit + 1):
        term = x.commutator(term).scale(QQ(1, n))

        if term.is_zero():
            return total

        total = total + term

    raise ValueError("conjugation series did not terminate")


def _gauge(
    rng: random.Random,
    algebra: FunctionAlgebra,
    indices: t.Iterable[int],
    density: float,
) -> Derivation:
    values = {
        k: _random_function(rng, algebra, algebra.degrees[k], density, shortest=2)
        for k in indices
    }
    return Derivation(algebra, 0, values)


def _linear(
    rng: random.Random, algebra: FunctionAlgebra, pairs: t.Sequence[tuple[str, str]]
) -> Derivation:
    """``Q(xi_target) = c xi_source`` for each pair, which is ``lambda_1(e_source) =
    c e_target``.
    """
    values = {
        algebra.index(target): algebra.gen(source) * coefficient(rng)
        for source, target in pairs
    }
    return Derivation(algebra, 1, values)


def _from_q(
    ring: ScalarRing, fibre: GradedVectorSpace, q: Derivation, amplitude: int
) -> CurvedBundle:
    values = {q.algebra.names[k]: v for k, v in q.values.items()}
    return CurvedBundle.from_generators(ring, fibre, values, amplitude)


def random_bundle(
    rng: random.Random,
    *,
    amplitude: int | None = None,
    rank: int | None = None,
    dimension: int = 0,
    density: float = 0.4,
    prefix: str = "e",
) -> CurvedBundle:
    """A valid bundle with ``lambda_0 = 0``.

    :param amplitude: ``b``, random in ``1..3`` when omitted.
    :param rank: Fibre rank, random in ``1..4`` when omitted.
    :param dimension: Dimension of the affine base, 0 for a point.
    :param density: Probability of keeping each candidate term of the gauge.
    """
    b = amplitude or rng.randint(1, 3)
    n = rank or rng.randint(1, 4)
    ring = point() if not dimension else affine(dimension)
    labels = _fibre(rng, b, n, prefix)
    fibre = GradedVectorSpace.from_labels(labels)
    bundle = CurvedBundle(ring, fibre, amplitude=b)
    algebra = bundle.algebra
    q = _linear(rng, algebra, _pairs(rng, labels))
    x = _gauge(rng, algebra, range(algebra.size), density)
    return _from_q(ring, fibre, conjugate(q, x), b)


@dataclasses.dataclass()
class Mutation:
    """A bundle with one perturbed Taylor entry and the relation it breaks."""

    bundle: CurvedBundle
    relation: str
    entry: tuple[int, tuple[str, ...], str]


def _linear_pairs(bundle: CurvedBundle) -> list[tuple[str, str]]:
    return sorted(
        (inputs[0], output)
        for inputs, outputs in bundle.lambdas.get(1, {}).items()
        for output in outputs
    )


def mutate(rng: random.Random, bundle: CurvedBundle) -> Mutation:
    """Perturb one entry of a bundle built by :func:`random_bundle`.

    - ``lambda_0(e) = 1`` for the source ``e`` of a degree 1 pair breaks
      ``lambda_1(lambda_0) = 0``.
    - a new ``lambda_1`` entry composing with a pair breaks the relation on
      words of length 1.
    - ``lambda_1(e) = e`` breaks the degree of ``lambda_1``.
    """
    degree = bundle.degree
    pairs = _linear_pairs(bundle)
    candidates: list[tuple[int, tuple[str, ...], str, str]] = []

    for source, target in pairs:
        if degree(source) == 1 and not bundle.lambdas.get(0):
            candidates.append((0, (), source, relation_name(0)))

        for h in bundle.labels:
            if degree(h) == degree(source) - 1:
                candidates.append((1, (h,), source, relation_name(1)))

            if degree(h) == degree(target) + 1:
                candidates.append((1, (target,), h, relation_name(1)))

    candidates = [c for c in candidates if not bundle.lambda_entry(c[0], c[1], c[2])]
    label = rng.choice(bundle.labels)
    candidates.append((1, (label,), label, "degree of λ1"))
    n, inputs, output, relation = rng.choice(candidates)
    lambdas: dict[int, dict[tuple[str, ...], dict[str, t.Any]]] = {
        m: {k: dict(v) for k, v in table.items()} for m, table in bundle.lambdas.items()
    }
    lambdas.setdefault(n, {}).setdefault(inputs, {})[output] = bundle.ring.one
    mutated = CurvedBundle(bundle.ring, bundle.fibre, lambdas, bundle.amplitude)
    logger.debug("mutated λ%d%s -> %s, expecting %s", n, inputs, output, relation)
    return Mutation(mutated, relation, (n, inputs, output))


def _unipotent(rng: random.Random, n: int, lower: bool) -> Matrix:
    rows: dict[int, dict[int, t.Any]] = {i: {i: QQ.one} for i in range(n)}

    for i in range(n):
        for j in range(n):
            if (j < i if lower else j > i) and rng.random() < 0.5:
                rows[i][j] = QQ(rng.randint(-2, 2))

    return Matrix(n, n, rows)


def random_invertible(rng: random.Random, n: int) -> Matrix:
    """``L U`` with unit triangular factors."""
    return _unipotent(rng, n, True) @ _unipotent(rng, n, False)


def random_exact_sequence(
    rng: random.Random, length: int, max_dim: int = 6
) -> tuple[list[int], list[Matrix]]:
    """An exact sequence ``0 -> V_0 -> ... -> V_(length-1) -> 0``, a sum of cones of
    identities conjugated by random automorphisms of each ``V_i``.

    :returns: The dimensions and the ``length - 1`` maps.
    """
    if length < 2:
        raise ValueError("an exact sequence needs at least two spaces")

    # c[i] is the rank of the map out of V_i
    c: list[int] = []
    previous = 0

    for _ in range(length - 1):
        c.append(rng.randint(0, max_dim - previous))
        previous = c[-1]

    c.append(0)
    dims = [(c[i - 1] if i else 0) + c[i] for i in range(length)]
    frames = [random_invertible(rng, d) for d in dims]
    maps = []

    for i in range(length - 1):
        offset = c[i - 1] if i else 0
        d = Matrix(dims[i + 1], dims[i], {j: {offset + j: QQ.one} for j in range(c[i])})
        inverse = linalg.inverse(frames[i]) if dims[i] else frames[i]
        maps.append(frames[i + 1] @ d @ inverse)

    return dims, maps


def _transport(element: Element, algebra: FunctionAlgebra) -> Element:
    """The same polynomial written in an algebra with more generators."""
    total = algebra.zero
    names = element.algebra.names

    for word, c in element.terms.items():
        mono = algebra.monomial([algebra.index(names[i]) for i in word])
        total = total + mono * algebra.scalar(c)

    return total


def random_fibration(
    rng: random.Random,
    *,
    amplitude: int | None = None,
    target: CurvedBundle | None = None,
    pairs: int | None = None,
    density: float = 0.4,
) -> LinftyMorphism:
    """An acyclic linear fibration over a point, the projection ``M = N + K -> N``
    where ``K`` is a sum of matched pairs ``u_i -> v_i``. The functions of ``M``
    are twisted by a gauge acting on the generators of ``K`` only, which keeps the
    projection a strict morphism.

    :param amplitude: ``b``, random in ``1..3`` when omitted.
    :param target: The bundle ``N``, generated when omitted.
    :param pairs: The number of pairs in ``K``.
    """
    b = amplitude or (target.amplitude if target else rng.randint(1, 3))

    if target is None:
        target = random_bundle(rng, amplitude=b, density=density)

    labels = {a: target.degree(a) for a in target.labels}
    kernel: dict[str, int] = {}
    count = rng.randint(1, 2) if pairs is None else pairs

    if b >= 2:
        for i in range(count):
            k = rng.randint(1, b - 1)
            kernel[f"u{i + 1}"] = k
            kernel[f"v{i + 1}"] = k + 1

    fibre = GradedVectorSpace.from_labels({**labels, **kernel})
    ring = target.ring
    algebra = CurvedBundle(ring, fibre, amplitude=b).algebra
    values = {
        algebra.index(a): _transport(target.q.value(k), algebra)
        for k, a in enumerate(target.labels)
    }

    for i in range(len(kernel) // 2):
        u, v = f"u{i + 1}", f"v{i + 1}"
        values[algebra.index(v)] = algebra.gen(u) * coefficient(rng)

    q = Derivation(algebra, 1, values)
    x = _gauge(rng, algebra, (algebra.index(a) for a in kernel), density)
    source = _from_q(ring, fibre, conjugate(q, x), b)
    taylor = {1: {(a,): {a: 1} for a in target.labels}}
    base_map = [ring.gen(a) for a in range(ring.dimension)]
    return LinftyMorphism(source, target, base_map, taylor)


def random_fibre_connection(
    rng: random.Random, bundle: CurvedBundle
) -> FibreConnection:
    """Random symbols ``Gamma^k_aj`` between labels of equal degree."""
    christoffel: dict[int, dict[str, dict[str, t.Any]]] = {}

    for a in range(bundle.ring.dimension):
        for j in bundle.labels:
            for k in bundle.labels:
                if bundle.degree(j) == bundle.degree(k) and rng.random() < 0.5:
                    row = christoffel.setdefault(a, {}).setdefault(j, {})
                    row[k] = _base_scalar(rng, bundle.ring)

    return FibreConnection(bundle, christoffel)


def random_connection(
    rng: random.Random,
    vector_fields: VectorFieldModule,
    *,
    density: float = 0.3,
    name: str = "∇",
) -> AffineConnection:
    """A connection with random symbols of the right degree on frame pairs."""
    fibre = vector_fields.fibre
    algebra = vector_fields.algebra
    labels = list(fibre)
    table: dict[tuple[str, str], dict[str, Element]] = {}

    for a in labels:
        for b in labels:
            if rng.random() >= density:
                continue

            coeffs = {}

            for c in labels:
                d = fibre.degree(a) + fibre.degree(b) - fibre.degree(c)

                if d <= 0:
                    f = _random_function(rng, algebra, d, 0.5)

                    if f:
                        coeffs[c] = f

            if coeffs:
                table[a, b] = coeffs

    return AffineConnection(vector_fields, table, name=name)


def random_supermatrix(
    rng: random.Random, even: int, odd: int, generators: int = 2
) -> Supermatrix:
    """An even supermatrix over the Grassmann algebra on ``generators`` odd
    generators. Diagonal blocks get a rational plus products of two generators,
    off diagonal blocks get combinations of single generators.
    """
    algebra = grassmann_algebra(generators)
    thetas = range(1, generators + 1)
    n = even + odd
    entries = []

    for i in range(n):
        row = []

        for j in range(n):
            if (i < even) == (j < even):
                entry = algebra.scalar(rng.randint(-2, 2))

                for a in thetas:
                    for b in thetas:
                        if a < b and rng.random() < 0.5:
                            entry = entry + algebra.monomial((a, b)) * coefficient(rng)
            else:
                entry = algebra.zero

                for a in thetas:
                    if rng.random() < 0.5:
                        entry = entry + algebra.gen(a) * coefficient(rng)

            row.append(entry)

        entries.append(row)

    return Supermatrix(even, odd, entries)
