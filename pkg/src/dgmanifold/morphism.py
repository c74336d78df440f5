"""Morphisms of curved bundles and their classification as fibrations, linear
fibrations and weak equivalences relative to supplied classical loci.

A morphism ``(f, phi)`` is stored as its pullback on functions:
``x_b -> f_b`` and ``eta_j -> sum_n sum_I phi^j_I xi^I``, with the same
dualization as the homological vector field.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import typing as t

from . import linalg
from .algebra import AlgebraMorphism
from .algebra import Element
from .bundle import CurvedBundle
from .bundle import StructureReport
from .bundle import jacobian
from .bundle import tangent_complex_at
from .config import sample_points
from .errors import MorphismError
from .errors import NotClassicalError
from .graded import ChainMap
from .graded import GradedMap
from .graded import is_quasi_isomorphism
from .linalg import Matrix
from .scalars import Scalar
from .scalars import format_rational
from .scalars import parse_point

logger = logging.getLogger(__name__)

Point = tuple[t.Any, ...]


def compatibility_name(word_length: int) -> str:
    if word_length == 0:
        return "φ₁(λ₀)=μ₀"

    return f"φ∘λ=μ∘φ in arity {word_length}"


class LinftyMorphism:
    """A morphism ``Phi = (f, phi)`` from ``source`` to ``target``.

    :param source: The bundle ``(M, L, lambda)``.
    :param target: The bundle ``(N, E, mu)``.
    :param base_map: ``f`` as one source scalar per target coordinate.
    :param taylor: ``{n: {source inputs: {target label: source scalar}}}``.
    """

    def __init__(
        self,
        source: CurvedBundle,
        target: CurvedBundle,
        base_map: t.Sequence[t.Any] = (),
        taylor: t.Mapping[int, t.Mapping[t.Sequence[str], t.Mapping[str, t.Any]]]
        | None = None,
    ) -> None:
        if len(base_map) != target.ring.dimension:
            raise MorphismError(
                f"base map has {len(base_map)} components, target base has dimension"
                f" {target.ring.dimension}"
            )

        self.source = source
        self.target = target
        self.base_map: tuple[Scalar, ...] = tuple(
            source.ring.convert(v) for v in base_map
        )
        self.taylor: dict[int, dict[tuple[str, ...], dict[str, Scalar]]] = {}

        for n, table in (taylor or {}).items():
            for inputs, outputs in table.items():
                key = source.sort_inputs(inputs)

                for output, value in outputs.items():
                    if output not in target.fibre:
                        raise MorphismError(f"unknown target label {output!r}")

                    value = source.ring.convert(value)

                    if value:
                        row = self.taylor.setdefault(int(n), {}).setdefault(key, {})
                        row[output] = value

    def __repr__(self) -> str:
        return f"LinftyMorphism({self.source!r} -> {self.target!r})"

    @classmethod
    def identity(cls, bundle: CurvedBundle) -> LinftyMorphism:
        ring = bundle.ring
        base = [ring.gen(a) for a in range(ring.dimension)]
        taylor = {1: {(a,): {a: 1} for a in bundle.labels}}
        return cls(bundle, bundle, base, taylor)

    @classmethod
    def from_pullback(
        cls, source: CurvedBundle, target: CurvedBundle, pullback: AlgebraMorphism
    ) -> LinftyMorphism:
        """Decode ``f`` and the Taylor tables from a pullback on functions."""
        taylor: dict[int, dict[tuple[str, ...], dict[str, t.Any]]] = {}

        for j, image in enumerate(pullback.images):
            output = target.labels[j]

            for mono, coeff in image.terms.items():
                inputs = tuple(source.labels[i] for i in mono)
                taylor.setdefault(len(mono), {}).setdefault(inputs, {})[output] = coeff

        return cls(source, target, pullback.base_images, taylor)

    def is_linear(self) -> bool:
        """``phi_n = 0`` for ``n >= 2``."""
        return all(n == 1 for n in self.taylor)

    def degree_report(self) -> StructureReport:
        """Degree bookkeeping of every ``phi_n``: outputs have the total input
        degree and ``phi_0`` is absent.
        """
        report = StructureReport()
        source, target = self.source, self.target

        for n in sorted(self.taylor):
            problems = []

            if n == 0:
                problems.append("φ₀ must vanish")

            for inputs, outputs in self.taylor[n].items():
                expected = sum(source.degree(a) for a in inputs)

                for output in outputs:
                    if target.degree(output) != expected:
                        problems.append(
                            f"φ{n}({','.join(inputs)}) -> {output} has degree "
                            f"{target.degree(output)}, expected {expected}"
                        )

            report.add(f"degree of φ{n}", not problems, "; ".join(problems))

        return report

    @functools.cached_property
    def pullback(self) -> AlgebraMorphism:
        """``Psi*`` from target functions to source functions."""
        report = self.degree_report()

        if not report.passed:
            report.raise_for_failure()

        source_algebra = self.source.algebra
        images: list[Element] = []

        for label in self.target.labels:
            value = source_algebra.zero

            for table in self.taylor.values():
                for inputs, outputs in table.items():
                    coeff = outputs.get(label)

                    if coeff:
                        value = value + self.source.input_monomial(inputs) * coeff

            images.append(value)

        return AlgebraMorphism(
            self.target.algebra, source_algebra, self.base_map, images
        )

    def validate(self) -> StructureReport:
        """Degree bookkeeping, then ``Psi* mu^T = lambda^T Psi*`` on target
        generators, split by word length.
        """
        report = self.degree_report()

        if not report.passed:
            return report

        psi = self.pullback
        source_q, target_q = self.source.q, self.target.q
        failures: dict[int, str] = {}
        longest = 0

        for j, label in enumerate(self.target.labels):
            g = self.target.algebra.gen(j)
            defect = psi(target_q(g)) - source_q(psi(g))
            longest = max([longest, *defect.word_lengths()])

            for mono, coeff in sorted(defect.terms.items()):
                if len(mono) not in failures:
                    failures[len(mono)] = (
                        f"coefficient of {psi.target.monomial_label(mono)} in the"
                        f" {label} component is {coeff}"
                    )

        bound = max(self.source.amplitude - 1, longest) + 1

        for length in range(bound):
            report.add(
                compatibility_name(length),
                length not in failures,
                failures.get(length, ""),
            )

        logger.info("validated morphism: %s", "pass" if report.passed else "fail")
        return report

    def __matmul__(self, other: LinftyMorphism) -> LinftyMorphism:
        """``self o other``; pullbacks compose the other way round."""
        if other.target.fibre != self.source.fibre:
            raise MorphismError("morphisms don't compose")

        return LinftyMorphism.from_pullback(
            other.source, self.target, other.pullback @ self.pullback
        )

    def base_image(self, p: t.Sequence[t.Any]) -> Point:
        return tuple(self.source.ring.evaluate(v, p) for v in self.base_map)

    def base_jacobian(self, p: t.Sequence[t.Any]) -> Matrix:
        """``d f_b / d x_a`` at ``p``, one row per target coordinate."""
        return jacobian(self.base_map, self.source.ring, p)

    def linear_part(self, p: t.Sequence[t.Any] = ()) -> GradedMap:
        """``phi_1`` at ``p`` as a degree 0 map ``L -> E``."""
        ring = self.source.ring
        images: dict[str, dict[str, t.Any]] = {}

        for inputs, outputs in self.taylor.get(1, {}).items():
            images[inputs[0]] = {
                k: (ring.evaluate(v, p) if p or ring.is_point else ring.constant(v))
                for k, v in outputs.items()
            }

        return GradedMap.from_images(self.source.fibre, self.target.fibre, 0, images)

    def tangent_map(self, p: t.Sequence[t.Any]) -> ChainMap:
        """``(f_*|_p, phi_1|_p)`` between the tangent complexes at ``p`` and
        ``f(p)``.
        """
        q = self.base_image(p)
        source = tangent_complex_at(self.source, p)
        target = tangent_complex_at(self.target, q)
        images: dict[str, dict[str, t.Any]] = {}

        if self.source.ring.dimension:
            jac = self.base_jacobian(p)

            for a, x in enumerate(self.source.ring.variables):
                images[f"∂{x}"] = {
                    f"∂{y}": jac[b, a] for b, y in enumerate(self.target.ring.variables)
                }

        ring = self.source.ring

        for inputs, outputs in self.taylor.get(1, {}).items():
            images[inputs[0]] = {b: ring.evaluate(v, p) for b, v in outputs.items()}

        f = GradedMap.from_images(source.space, target.space, 0, images)
        return ChainMap.from_graded_map(source, target, f)


@dataclasses.dataclass()
class Check:
    """One classification check with its certification scope."""

    name: str
    passed: bool
    detail: str = ""
    scope: str = ""


@dataclasses.dataclass()
class Classification:
    checks: list[Check]
    is_fibration: bool
    is_linear: bool
    is_weak_equivalence: bool
    scope: str = "relative to the supplied classical loci"

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def is_acyclic_linear_fibration(self) -> bool:
        return self.is_fibration and self.is_linear and self.is_weak_equivalence


def check_classical(bundle: CurvedBundle, points: t.Sequence[Point]) -> None:
    """:raises NotClassicalError: At the first point where ``lambda_0`` does not
    vanish.
    """
    for p in points:
        if len(p) != bundle.ring.dimension:
            raise MorphismError(
                f"point {p} has {len(p)} coordinates, expected {bundle.ring.dimension}"
            )

        if not bundle.is_classical(p):
            raise NotClassicalError(p)


def pairing(
    correspondence: t.Sequence[tuple[int, int]] | None, left: int, right: int
) -> list[tuple[int, int]]:
    """Validate a bijective pairing of point indices. ``None`` pairs by position."""
    if correspondence is None:
        if left != right:
            raise MorphismError("loci have different sizes")

        return [(i, i) for i in range(left)]

    pairs = [(int(i), int(j)) for i, j in correspondence]
    firsts = sorted(i for i, _ in pairs)
    seconds = sorted(j for _, j in pairs)

    if firsts != list(range(left)) or seconds != list(range(right)):
        raise MorphismError("correspondence is not a bijection of the supplied loci")

    return pairs


def is_submersion_at(morphism: LinftyMorphism, p: t.Sequence[t.Any]) -> bool:
    return linalg.rank(morphism.base_jacobian(p)) == morphism.target.ring.dimension


def is_surjective_at(morphism: LinftyMorphism, p: t.Sequence[t.Any]) -> bool:
    phi = morphism.linear_part(p)
    return all(
        linalg.rank(phi.block(k)) == morphism.target.fibre.dim(k)
        for k in morphism.target.fibre.degrees
    )


def classify_morphism(
    morphism: LinftyMorphism,
    points: t.Sequence[t.Sequence[t.Any]] = (),
    target_points: t.Sequence[t.Sequence[t.Any]] = (),
    correspondence: t.Sequence[tuple[int, int]] | None = None,
) -> Classification:
    """Classify a morphism relative to supplied classical loci.

    Submersion and surjectivity of ``phi_1`` are certified at the supplied points and
    at the deterministic sample set of the source base. Weak equivalence requires
    ``f`` to respect the correspondence and the tangent map to be a
    quasi-isomorphism at every pair.

    :param morphism: The morphism.
    :param points: Classical points of the source.
    :param target_points: Classical points of the target.
    :param correspondence: Pairs ``(i, j)`` of indices into the two lists.
    """
    source, target = morphism.source, morphism.target
    here = [parse_point(p) for p in points]
    there = [parse_point(p) for p in target_points]
    checks: list[Check] = []
    pairs = _loci(morphism, here, there, correspondence, checks)

    structure = morphism.validate()
    failed = structure.failures
    checks.append(
        Check(
            "structure",
            not failed,
            f"{failed[0].name}: {failed[0].detail}" if failed else "",
        )
    )

    if failed:
        return Classification(checks, False, morphism.is_linear(), False)

    dimension = source.ring.dimension
    samples = [*here, *sample_points(dimension)] if dimension else [()]
    scope = (
        f"{len(here)} supplied points and {len(samples) - len(here)} sample points"
        if dimension
        else "point base"
    )
    bad = [p for p in samples if not is_submersion_at(morphism, p)]
    checks.append(
        Check(
            "f is a submersion",
            not bad,
            f"Jacobian rank deficient at {_show(bad[0])}" if bad else "",
            scope,
        )
    )
    bad = [p for p in samples if not is_surjective_at(morphism, p)]
    checks.append(
        Check(
            "φ₁ degreewise surjective",
            not bad,
            f"rank deficient at {_show(bad[0])}" if bad else "",
            scope,
        )
    )
    fibration = all(c.passed for c in checks[-2:])

    wrong = [
        (i, j) for i, j in pairs if morphism.base_image(here[i]) != there[j]
    ]
    checks.append(
        Check(
            "f respects the correspondence",
            not wrong,
            f"f{_show(here[wrong[0][0]])} != {_show(there[wrong[0][1]])}"
            if wrong
            else "",
        )
    )
    quasi = True

    if not wrong:
        window = (-1, max(source.amplitude, target.amplitude) + 1)

        for i, _ in pairs:
            if not is_quasi_isomorphism(morphism.tangent_map(here[i]), window):
                checks.append(
                    Check(
                        "tangent map is a quasi-isomorphism",
                        False,
                        f"cone not acyclic at {_show(here[i])}",
                    )
                )
                quasi = False
                break
        else:
            checks.append(
                Check(
                    "tangent map is a quasi-isomorphism",
                    True,
                    scope=f"{len(pairs)} classical pairs",
                )
            )

    bijection = all(c.name != "classical loci in bijection" for c in checks)
    weak = bijection and not wrong and quasi
    logger.info(
        "classified morphism: fibration=%s linear=%s weak equivalence=%s",
        fibration,
        morphism.is_linear(),
        weak,
    )
    return Classification(checks, fibration, morphism.is_linear(), weak)


def _loci(
    morphism: LinftyMorphism,
    points: list[Point],
    target_points: list[Point],
    correspondence: t.Sequence[tuple[int, int]] | None,
    checks: list[Check],
) -> list[tuple[int, int]]:
    """Validate supplied loci. On a point base with nothing supplied the locus is
    the point itself when the curvature vanishes there.
    """
    source, target = morphism.source, morphism.target
    automatic = False

    if source.ring.is_point and not points:
        points.extend([()] if source.is_classical(()) else [])
        automatic = True

    if target.ring.is_point and not target_points:
        target_points.extend([()] if target.is_classical(()) else [])
        automatic = automatic and correspondence is None

    check_classical(source, points)
    check_classical(target, target_points)

    if automatic and len(points) != len(target_points):
        checks.append(
            Check(
                "classical loci in bijection",
                False,
                f"{len(points)} source points, {len(target_points)} target points",
            )
        )
        return []

    return pairing(correspondence, len(points), len(target_points))


def _show(p: Point) -> str:
    return "(" + ", ".join(format_rational(v) for v in p) + ")"
