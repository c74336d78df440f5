"""Bundles of positively graded curved L-infinity[1] algebras over a point or an
affine base, their structure relations, the dual homological vector field, and the
tangent complex at a classical point.

Taylor coefficients are stored as tables ``lambdas[n][inputs][output]`` where
``inputs`` is a sorted tuple of fibre labels (a multiset, odd labels at most once)
and the value is a base scalar. The homological vector field is
``Q(xi_k) = sum_n sum_I lambdas[n][I][k] xi^I`` with ``xi^I`` the product of the
dual generators in sorted order.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import typing as t

from .algebra import Derivation
from .algebra import Element
from .algebra import FunctionAlgebra
from .errors import NotClassicalError
from .errors import StructureError
from .graded import FiniteComplex
from .graded import GradedMap
from .graded import GradedVectorSpace
from .linalg import Matrix
from .scalars import Scalar
from .scalars import ScalarRing

logger = logging.getLogger(__name__)

Taylor = dict[int, dict[tuple[str, ...], dict[str, Scalar]]]
"""``{n: {sorted input labels: {output label: scalar}}}``."""


def point() -> ScalarRing:
    """The one point base."""
    return ScalarRing(0)


def affine(dimension: int) -> ScalarRing:
    """Affine space with polynomial functions in ``x1, ..., x{dimension}``."""
    return ScalarRing(dimension)


@dataclasses.dataclass()
class Relation:
    """The outcome of checking one structure relation."""

    name: str
    passed: bool
    detail: str = ""


@dataclasses.dataclass()
class StructureReport:
    relations: list[Relation] = dataclasses.field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.relations)

    @property
    def failures(self) -> list[Relation]:
        return [r for r in self.relations if not r.passed]

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.relations.append(Relation(name, passed, detail))

    def raise_for_failure(self) -> None:
        if not self.passed:
            raise StructureError(self)


def relation_name(word_length: int) -> str:
    """Name of the part of ``lambda o lambda = 0`` with the given output word
    length.
    """
    if word_length == 0:
        return "λ₁(λ₀)=0"

    if word_length == 1:
        return "λ₂(λ₀,x)+λ₁²(x)=0"

    return f"λ∘λ=0 in arity {word_length}"


class CurvedBundle:
    """A trivial graded bundle ``L`` over a base with Taylor coefficients
    ``lambda_0, ..., lambda_(b-1)``.

    :param ring: The base, :func:`point` or :func:`affine`.
    :param fibre: The fibre ``L``, supported in degrees ``1..amplitude``.
    :param lambdas: The Taylor tables. Missing entries are zero.
    :param amplitude: The top degree ``b``. Defaults to the top degree of the fibre,
        or 1 for a zero fibre.
    """

    def __init__(
        self,
        ring: ScalarRing,
        fibre: GradedVectorSpace,
        lambdas: t.Mapping[int, t.Mapping[t.Sequence[str], t.Mapping[str, t.Any]]]
        | None = None,
        amplitude: int | None = None,
    ) -> None:
        if amplitude is None:
            amplitude = max(fibre.degrees, default=1)

        self.ring = ring
        self.fibre = fibre
        self.amplitude = amplitude
        self.labels: tuple[str, ...] = tuple(fibre)
        self._position = {label: i for i, label in enumerate(self.labels)}
        self.lambdas: Taylor = {}

        for n, table in (lambdas or {}).items():
            clean: dict[tuple[str, ...], dict[str, Scalar]] = {}

            for inputs, outputs in table.items():
                key = self.sort_inputs(inputs)
                values = {k: ring.convert(v) for k, v in outputs.items()}
                values = {k: v for k, v in values.items() if v}

                if values:
                    clean.setdefault(key, {}).update(values)

            if clean:
                self.lambdas[int(n)] = clean

    def __repr__(self) -> str:
        return f"CurvedBundle({self.ring!r}, {self.fibre!r}, b={self.amplitude})"

    def sort_inputs(self, inputs: t.Sequence[str]) -> tuple[str, ...]:
        if isinstance(inputs, str):
            inputs = [s for s in inputs.split(",") if s]

        try:
            return tuple(sorted(inputs, key=self._position.__getitem__))
        except KeyError as e:
            raise ValueError(f"unknown fibre label {e.args[0]!r}") from None

    def degree(self, label: str) -> int:
        return self.fibre.degree(label)

    @functools.cached_property
    def algebra(self) -> FunctionAlgebra:
        """Functions ``S(L^v)`` over the base. Generator ``k`` is named after fibre
        label ``k`` and has degree ``-deg(e_k)``.
        """
        return FunctionAlgebra(
            self.ring, self.labels, [-self.degree(a) for a in self.labels]
        )

    def input_monomial(self, inputs: tuple[str, ...]) -> Element:
        return self.algebra.monomial([self._position[a] for a in inputs])

    @functools.cached_property
    def q(self) -> Derivation:
        """The homological vector field dual to the Taylor coefficients."""
        return dual_derivation(self)

    def lambda_entry(self, n: int, inputs: t.Sequence[str], output: str) -> Scalar:
        key = self.sort_inputs(inputs)
        return self.lambdas.get(n, {}).get(key, {}).get(output, self.ring.zero)

    def curvature(self) -> dict[str, Scalar]:
        """``lambda_0`` as a section of ``L^1``."""
        return dict(self.lambdas.get(0, {}).get((), {}))

    def is_classical(self, p: t.Sequence[t.Any]) -> bool:
        return all(not self.ring.evaluate(v, p) for v in self.curvature().values())

    def linear_part(self, p: t.Sequence[t.Any] | None = None) -> GradedMap:
        """``lambda_1`` as a shift 1 map of the fibre, evaluated at ``p`` on affine
        bases.
        """
        images: dict[str, dict[str, t.Any]] = {}

        for (a,), outputs in (
            (k, v) for k, v in self.lambdas.get(1, {}).items() if len(k) == 1
        ):
            images[a] = {b: self._at(v, p) for b, v in outputs.items()}

        return GradedMap.from_images(self.fibre, self.fibre, 1, images)

    def _at(self, value: Scalar, p: t.Sequence[t.Any] | None) -> t.Any:
        if self.ring.is_point:
            return value

        if p is None:
            return self.ring.constant(value)

        return self.ring.evaluate(value, p)

    def is_linear(self) -> bool:
        """Only ``lambda_1`` is nonzero."""
        return set(self.lambdas) <= {1}

    def direct_sum(self, other: CurvedBundle) -> CurvedBundle:
        """Fibrewise sum of two bundles over the same base with disjoint labels."""
        if other.ring != self.ring:
            raise ValueError("bundles live over different bases")

        fibre = self.fibre.direct_sum(other.fibre)
        lambdas: dict[int, dict[tuple[str, ...], dict[str, t.Any]]] = {}

        for source in (self.lambdas, other.lambdas):
            for n, table in source.items():
                for inputs, outputs in table.items():
                    lambdas.setdefault(n, {}).setdefault(inputs, {}).update(outputs)

        return CurvedBundle(
            self.ring, fibre, lambdas, max(self.amplitude, other.amplitude)
        )

    @classmethod
    def from_generators(
        cls,
        ring: ScalarRing,
        fibre: GradedVectorSpace,
        values: t.Mapping[str, Element],
        amplitude: int | None = None,
    ) -> CurvedBundle:
        """Decode Taylor tables from the values ``Q(xi_k)`` of a homological vector
        field.
        """
        labels = tuple(fibre)
        lambdas: dict[int, dict[tuple[str, ...], dict[str, t.Any]]] = {}

        for output, value in values.items():
            for mono, coeff in value.terms.items():
                inputs = tuple(labels[i] for i in mono)
                lambdas.setdefault(len(mono), {}).setdefault(inputs, {})[output] = coeff

        return cls(ring, fibre, lambdas, amplitude)


def dual_derivation(bundle: CurvedBundle) -> Derivation:
    """The degree 1 derivation ``Q`` of the function algebra with
    ``Q(xi_k) = sum_I lambda^k_I xi^I``. ``Q`` vanishes on base coordinates.
    """
    algebra = bundle.algebra
    values: dict[int, Element] = {}

    for n, table in bundle.lambdas.items():
        for inputs, outputs in table.items():
            mono = bundle.input_monomial(inputs)

            for output, coeff in outputs.items():
                k = algebra.index(output)
                values[k] = values.get(k, algebra.zero) + mono * coeff

    return Derivation(algebra, 1, values)


def validate_structure(bundle: CurvedBundle) -> StructureReport:
    """Check the grading, the degree of every Taylor coefficient, the arity bound and
    every component of ``lambda o lambda = 0``. The last is checked as ``Q^2 = 0`` on
    generators, split by word length of the result.
    """
    report = StructureReport()
    b = bundle.amplitude
    bad = [d for d in bundle.fibre.degrees if not 1 <= d <= b]
    report.add(
        "grading",
        not bad and b >= 1,
        f"fibre degrees {bad} outside [1, {b}]" if bad or b < 1 else "",
    )

    for n in sorted(bundle.lambdas):
        table = bundle.lambdas[n]
        problems = []

        for inputs, outputs in table.items():
            if len(inputs) != n:
                problems.append(f"{inputs} has {len(inputs)} inputs")
                continue

            odd = [a for a in set(inputs) if bundle.degree(a) % 2]

            if any(inputs.count(a) > 1 for a in odd):
                problems.append(f"odd input repeated in {inputs}")

            expected = sum(bundle.degree(a) for a in inputs) + 1

            for output in outputs:
                if bundle.degree(output) != expected:
                    problems.append(
                        f"λ{n}({','.join(inputs)}) -> {output} has degree "
                        f"{bundle.degree(output)}, expected {expected}"
                    )

        report.add(f"degree of λ{n}", not problems, "; ".join(problems))

    high = [n for n in bundle.lambdas if n >= b]
    report.add("λₙ=0 for n≥b", not high, f"nonzero λ{high}" if high else "")

    if not report.passed:
        return report

    algebra = bundle.algebra
    q = bundle.q
    failures: dict[int, str] = {}

    for k, label in enumerate(algebra.names):
        square = q(q(algebra.gen(k)))

        for mono, coeff in sorted(square.terms.items()):
            length = len(mono)

            if length not in failures:
                failures[length] = (
                    f"coefficient of {algebra.monomial_label(mono)} in the {label} "
                    f"component is {coeff}"
                )

    # Q(xi) has words of length at most b - 1, so Q^2(xi) has at most 2b - 3
    for length in range(max(2 * b - 2, 0)):
        detail = failures.get(length, "")
        report.add(relation_name(length), length not in failures, detail)

    logger.info("validated bundle: %s", "pass" if report.passed else "fail")
    return report


def tangent_complex_at(
    bundle: CurvedBundle, p: t.Sequence[t.Any] = ()
) -> FiniteComplex:
    """``0 -> T_pM -> L^1 -> ... -> L^b -> 0`` with the Jacobian of ``lambda_0``
    followed by ``lambda_1`` at ``p``. Base tangent vectors are labelled ``∂x1``, ...
    and sit in degree 0.

    :param bundle: The bundle.
    :param p: A classical point. Empty on a point base.
    """
    ring = bundle.ring

    if len(p) != ring.dimension:
        raise ValueError(f"expected {ring.dimension} coordinates, got {len(p)}")

    if not bundle.is_classical(p):
        raise NotClassicalError(p)

    tangent = [f"∂{x}" for x in ring.variables]
    degrees = {**{v: 0 for v in tangent}, **bundle.fibre.degree_map}
    space = GradedVectorSpace.from_labels(degrees)
    images: dict[str, dict[str, t.Any]] = {}
    curvature = bundle.curvature()

    for a, v in enumerate(tangent):
        images[v] = {
            k: ring.evaluate(ring.diff(value, a), p) for k, value in curvature.items()
        }

    for (label,), outputs in (
        (k, v) for k, v in bundle.lambdas.get(1, {}).items() if len(k) == 1
    ):
        images[label] = {k: ring.evaluate(value, p) for k, value in outputs.items()}

    d = GradedMap.from_images(space, space, 1, images)
    return FiniteComplex(space, d)


def jacobian(
    values: t.Sequence[Scalar], ring: ScalarRing, p: t.Sequence[t.Any]
) -> Matrix:
    """``d values_i / d x_j`` at ``p``."""
    return Matrix.from_dense(
        [
            [ring.evaluate(ring.diff(v, j), p) for j in range(ring.dimension)]
            for v in values
        ],
        ring.dimension,
    )

