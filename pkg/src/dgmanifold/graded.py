"""Finite graded vector spaces, degree-homogeneous maps, cochain complexes presented
one degree at a time, cohomology, mapping cones, and the dual, tensor, symmetric
power and shift constructions.
"""

from __future__ import annotations

import itertools
import logging
import typing as t

from sympy import QQ

from . import linalg
from . import signs
from .errors import NotChainMapError
from .linalg import Matrix

logger = logging.getLogger(__name__)

Vector = dict[str, t.Any]
"""A sparse vector, basis label to nonzero ``QQ`` coefficient."""


class GradedVectorSpace:
    """A finite graded vector space with named basis elements. Within a degree,
    labels are kept in lexicographic order; degrees are ascending. Labels are unique
    across all degrees, so a label determines its degree.

    :param support: Map from degree to the labels in that degree. Empty degrees are
        dropped.
    """

    def __init__(self, support: t.Mapping[int, t.Iterable[str]] | None = None) -> None:
        self.support: dict[int, tuple[str, ...]] = {}
        self._degree: dict[str, int] = {}

        for degree in sorted(support or {}):
            labels = tuple(sorted(support[degree]))  # type: ignore[index]

            if not labels:
                continue

            if len(set(labels)) != len(labels):
                raise ValueError(f"repeated label in degree {degree}")

            for label in labels:
                if label in self._degree:
                    raise ValueError(f"label {label!r} appears in two degrees")

                self._degree[label] = degree

            self.support[degree] = labels

    @classmethod
    def from_labels(cls, degrees: t.Mapping[str, int]) -> GradedVectorSpace:
        """Build from a map of label to degree."""
        support: dict[int, list[str]] = {}

        for label, degree in degrees.items():
            support.setdefault(degree, []).append(label)

        return cls(support)

    def __repr__(self) -> str:
        return f"GradedVectorSpace({self.support!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GradedVectorSpace) and other.support == self.support

    def __hash__(self) -> int:
        return hash(tuple(self.support.items()))

    def __contains__(self, label: object) -> bool:
        return label in self._degree

    def __iter__(self) -> t.Iterator[str]:
        for labels in self.support.values():
            yield from labels

    def __len__(self) -> int:
        return len(self._degree)

    @property
    def degrees(self) -> list[int]:
        return list(self.support)

    def labels(self, degree: int) -> tuple[str, ...]:
        return self.support.get(degree, ())

    def dim(self, degree: int) -> int:
        return len(self.support.get(degree, ()))

    def degree(self, label: str) -> int:
        return self._degree[label]

    def index(self, label: str) -> int:
        """Position of the label within its degree."""
        return self.support[self._degree[label]].index(label)

    @property
    def degree_map(self) -> dict[str, int]:
        return dict(self._degree)

    def is_zero(self) -> bool:
        return not self.support

    def direct_sum(self, other: GradedVectorSpace) -> GradedVectorSpace:
        return GradedVectorSpace.from_labels({**self._degree, **other._degree})

    def dual(self) -> GradedVectorSpace:
        """Dual basis ``a*`` in degree ``-deg(a)``."""
        degrees = {dual_label(a): -d for a, d in self._degree.items()}
        return GradedVectorSpace.from_labels(degrees)

    def shift(self, k: int) -> GradedVectorSpace:
        """``V[k]`` with ``V[k]^d = V^(d+k)``. Labels become ``a[k]``."""
        return GradedVectorSpace.from_labels(
            {shift_label(a, k): d - k for a, d in self._degree.items()}
        )

    def tensor(self, other: GradedVectorSpace) -> GradedVectorSpace:
        return GradedVectorSpace.from_labels(
            {
                tensor_label(a, b): da + db
                for a, da in self._degree.items()
                for b, db in other._degree.items()
            }
        )

    def symmetric_power(self, n: int) -> GradedVectorSpace:
        """``S^n V`` with the Koszul rule: an odd basis element appears at most once in
        a monomial. Labels join sorted factors with ``·``.
        """
        out: dict[str, int] = {}

        for word in itertools.combinations_with_replacement(list(self), n):
            if any(
                word.count(a) > 1 and self._degree[a] % 2 for a in set(word)
            ):
                continue

            out["·".join(word) if word else "1"] = sum(self._degree[a] for a in word)

        return GradedVectorSpace.from_labels(out)


def dual_label(label: str) -> str:
    if label.endswith("*"):
        return label[:-1]

    return f"{label}*"


def shift_label(label: str, k: int) -> str:
    return f"{label}[{k}]"


def tensor_label(a: str, b: str) -> str:
    return f"{a}⊗{b}"


class GradedMap:
    """A map of graded spaces homogeneous of degree ``shift``. ``blocks[k]`` is the
    matrix from ``source`` degree ``k`` to ``target`` degree ``k + shift`` in the
    canonical bases. Blocks that would be zero, or that have a zero-dimensional side,
    are omitted.
    """

    def __init__(
        self,
        source: GradedVectorSpace,
        target: GradedVectorSpace,
        shift: int,
        blocks: t.Mapping[int, Matrix] | None = None,
    ) -> None:
        self.source = source
        self.target = target
        self.shift = shift
        self.blocks: dict[int, Matrix] = {}

        for k, block in (blocks or {}).items():
            expected = (target.dim(k + shift), source.dim(k))

            if block.shape != expected:
                raise ValueError(
                    f"block {k} has shape {block.shape}, expected {expected}"
                )

            if 0 not in expected and not block.is_zero():
                self.blocks[k] = block

    @classmethod
    def from_images(
        cls,
        source: GradedVectorSpace,
        target: GradedVectorSpace,
        shift: int,
        images: t.Mapping[str, t.Mapping[str, t.Any]],
    ) -> GradedMap:
        """Build from the image of each source label as a sparse vector of target
        labels.
        """
        blocks = {}

        for k in source.degrees:
            labels = target.labels(k + shift)

            if not labels:
                continue

            columns = []

            for a in source.labels(k):
                image = images.get(a, {})
                column = {}

                for b, v in image.items():
                    if target.degree(b) != k + shift:
                        raise ValueError(
                            f"image of {a!r} has {b!r} in the wrong degree"
                        )

                    column[target.index(b)] = QQ.convert(v)

                columns.append(column)

            blocks[k] = Matrix.from_columns(len(labels), columns)

        return cls(source, target, shift, blocks)

    @classmethod
    def identity(cls, space: GradedVectorSpace) -> GradedMap:
        blocks = {k: Matrix.identity(space.dim(k)) for k in space.degrees}
        return cls(space, space, 0, blocks)

    @classmethod
    def zero(
        cls, source: GradedVectorSpace, target: GradedVectorSpace, shift: int
    ) -> GradedMap:
        return cls(source, target, shift)

    def __repr__(self) -> str:
        return f"GradedMap(shift={self.shift}, blocks={self.blocks!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedMap):
            return NotImplemented

        return (
            self.source == other.source
            and self.target == other.target
            and self.shift == other.shift
            and self.blocks == other.blocks
        )

    def __hash__(self) -> int:
        return hash(self.shift)

    def block(self, k: int) -> Matrix:
        if k in self.blocks:
            return self.blocks[k]

        return Matrix.zeros(self.target.dim(k + self.shift), self.source.dim(k))

    def is_zero(self) -> bool:
        return not self.blocks

    def apply(self, vector: Vector) -> Vector:
        out: Vector = {}

        for a, v in vector.items():
            k = self.source.degree(a)
            column = self.block(k).column(self.source.index(a))
            labels = self.target.labels(k + self.shift)

            for i, w in column.items():
                b = labels[i]
                total = out.get(b, QQ.zero) + v * w

                if total:
                    out[b] = total
                else:
                    out.pop(b, None)

        return out

    def image(self, label: str) -> Vector:
        return self.apply({label: QQ.one})

    def __matmul__(self, other: GradedMap) -> GradedMap:
        """Composition ``self o other``."""
        if other.target != self.source:
            raise ValueError("maps are not composable")

        blocks = {
            k: self.block(k + other.shift) @ other.block(k)
            for k in other.source.degrees
        }
        return GradedMap(other.source, self.target, self.shift + other.shift, blocks)

    def __add__(self, other: GradedMap) -> GradedMap:
        shape = (self.source, self.target, self.shift)

        if (other.source, other.target, other.shift) != shape:
            raise ValueError("maps have different shapes")

        blocks = {k: self.block(k) + other.block(k) for k in self.source.degrees}
        return GradedMap(self.source, self.target, self.shift, blocks)

    def __neg__(self) -> GradedMap:
        blocks = {k: -b for k, b in self.blocks.items()}
        return GradedMap(self.source, self.target, self.shift, blocks)

    def __sub__(self, other: GradedMap) -> GradedMap:
        return self + (-other)

    def dual(self) -> GradedMap:
        """``f^v: W^v -> V^v`` with ``f^v(phi) = (-1)^(s |phi|) phi o f``."""
        source = self.target.dual()
        target = self.source.dual()
        blocks = {}

        for k, block in self.blocks.items():
            # phi has degree -(k + s) and lands in degree -k
            sign = signs.map_dual_sign(self.shift, -(k + self.shift))
            matrix = block.T
            blocks[-(k + self.shift)] = matrix if sign > 0 else -matrix

        return GradedMap(source, target, self.shift, blocks)

    def tensor(self, other: GradedMap) -> GradedMap:
        """``(f (x) g)(a (x) b) = (-1)^(|g||a|) f(a) (x) g(b)``."""
        source = self.source.tensor(other.source)
        target = self.target.tensor(other.target)
        images = {}

        for a in self.source:
            fa = self.image(a)
            sign = signs.koszul(other.shift, self.source.degree(a))

            for b in other.source:
                gb = other.image(b)
                images[tensor_label(a, b)] = {
                    tensor_label(x, y): sign * u * v
                    for x, u in fa.items()
                    for y, v in gb.items()
                }

        return GradedMap.from_images(source, target, self.shift + other.shift, images)

    def shift_by(self, k: int) -> GradedMap:
        """``f[k]: V[k] -> W[k]`` with sign ``(-1)^(k s)``."""
        sign = signs.koszul(k, self.shift)
        blocks = {d - k: (b if sign > 0 else -b) for d, b in self.blocks.items()}
        return GradedMap(self.source.shift(k), self.target.shift(k), self.shift, blocks)


@t.runtime_checkable
class CochainComplex(t.Protocol):
    """Anything that can list a basis and a differential in a given degree.
    ``differential(t)`` has shape ``len(basis(t + 1)) x len(basis(t))``. Raise
    :class:`.NotMaterializableError` for degrees that are infinite dimensional.
    """

    def basis(self, degree: int) -> tuple[str, ...]: ...

    def differential(self, degree: int) -> Matrix: ...


class FiniteComplex:
    """A complex on a finite graded space with a degree +1 differential.

    :param space: The graded space.
    :param differential: A :class:`GradedMap` of shift 1 from ``space`` to itself.
    :param check: Verify ``d o d = 0`` on construction.
    """

    def __init__(
        self,
        space: GradedVectorSpace,
        differential: GradedMap | None = None,
        check: bool = True,
    ) -> None:
        if differential is None:
            differential = GradedMap.zero(space, space, 1)

        endomorphism = differential.source == space and differential.target == space

        if differential.shift != 1 or not endomorphism:
            raise ValueError(
                "the differential must be a shift 1 endomorphism of the space"
            )

        self.space = space
        self.d = differential

        if check:
            low = min(space.degrees, default=0)
            high = max(space.degrees, default=0)
            check_square_zero(self, range(low - 1, high + 1))

    @classmethod
    def from_sequence(
        cls,
        spaces: t.Sequence[tuple[int, t.Sequence[str]]],
        maps: t.Sequence[Matrix],
    ) -> FiniteComplex:
        """Build ``V_0 -> V_1 -> ...`` from ``(degree, labels)`` pairs in consecutive
        degrees and the matrices between them.
        """
        space = GradedVectorSpace({d: labels for d, labels in spaces})
        blocks = {spaces[i][0]: m for i, m in enumerate(maps)}
        return cls(space, GradedMap(space, space, 1, blocks))

    def basis(self, degree: int) -> tuple[str, ...]:
        return self.space.labels(degree)

    def differential(self, degree: int) -> Matrix:
        return self.d.block(degree)

    @property
    def degrees(self) -> list[int]:
        return self.space.degrees

    def dual(self) -> FiniteComplex:
        """The dual complex, with ``d^v(phi) = -(-1)^(|phi|) phi o d``."""
        space = self.space.dual()
        blocks = {}

        for k, block in self.d.blocks.items():
            # phi of degree -(k + 1) maps to degree -k
            sign = signs.dual_differential_sign(-(k + 1))
            blocks[-(k + 1)] = block.T if sign > 0 else -block.T

        return FiniteComplex(space, GradedMap(space, space, 1, blocks))

    def tensor(self, other: FiniteComplex) -> FiniteComplex:
        """``d(a (x) b) = da (x) b + (-1)^|a| a (x) db``."""
        space = self.space.tensor(other.space)
        images: dict[str, Vector] = {}

        for a in self.space:
            da = self.d.image(a)
            sign = signs.power(self.space.degree(a))

            for b in other.space:
                db = other.d.image(b)
                image: Vector = {}

                for x, v in da.items():
                    image[tensor_label(x, b)] = v

                for y, v in db.items():
                    key = tensor_label(a, y)
                    image[key] = image.get(key, QQ.zero) + sign * v

                images[tensor_label(a, b)] = image

        return FiniteComplex(space, GradedMap.from_images(space, space, 1, images))

    def shift(self, k: int) -> FiniteComplex:
        """``C[k]`` with differential ``(-1)^k d``."""
        space = self.space.shift(k)
        sign = signs.power(k)
        blocks = {d - k: (b if sign > 0 else -b) for d, b in self.d.blocks.items()}
        return FiniteComplex(space, GradedMap(space, space, 1, blocks))


def check_square_zero(complex: CochainComplex, degrees: t.Iterable[int]) -> None:
    """Raise :class:`ValueError` naming the first degree where ``d o d != 0``."""
    for k in degrees:
        if not (complex.differential(k + 1) @ complex.differential(k)).is_zero():
            raise ValueError(f"d o d is not zero at degree {k}")


class Cohomology(t.NamedTuple):
    degree: int
    dimension: int
    representatives: list[Vector]
    """Cocycles whose classes form a basis of ``H^degree``."""


def cohomology_at_degree(complex: CochainComplex, degree: int) -> Cohomology:
    """``dim ker d^t - rank d^(t-1)`` with explicit representatives. Representatives
    are kernel basis vectors chosen greedily to extend a basis of the image.

    :param complex: The complex.
    :param degree: The degree ``t``.
    """
    basis = complex.basis(degree)

    if not basis:
        return Cohomology(degree, 0, [])

    d_out = complex.differential(degree)
    d_in = complex.differential(degree - 1)
    kernel = linalg.nullspace(d_out)
    image_rank = linalg.rank(d_in)
    dimension = len(kernel) - image_rank
    representatives: list[Vector] = []

    if dimension:
        columns = [d_in.column(j) for j in range(d_in.ncols)]
        current = image_rank

        for vector in kernel:
            trial = Matrix.from_columns(len(basis), [*columns, vector])

            if linalg.rank(trial) > current:
                columns.append(vector)
                current += 1
                representatives.append({basis[i]: v for i, v in sorted(vector.items())})

            if len(representatives) == dimension:
                break

    logger.debug("H^%d has dimension %d", degree, dimension)
    return Cohomology(degree, dimension, representatives)


def cohomology_dimensions(
    complex: CochainComplex, window: tuple[int, int]
) -> dict[int, int]:
    """Cohomology dimensions for every degree in the closed window."""
    degrees = range(window[0], window[1] + 1)
    return {k: cohomology_at_degree(complex, k).dimension for k in degrees}


def is_acyclic(complex: CochainComplex, window: tuple[int, int]) -> bool:
    return not any(cohomology_dimensions(complex, window).values())


class ChainMap:
    """A degree 0 map between complexes given one component at a time.
    ``component(t)`` has shape ``len(target.basis(t)) x len(source.basis(t))``.
    """

    def __init__(
        self,
        source: CochainComplex,
        target: CochainComplex,
        component: t.Callable[[int], Matrix],
    ) -> None:
        self.source = source
        self.target = target
        self._component = component
        self._cache: dict[int, Matrix] = {}

    @classmethod
    def from_graded_map(
        cls, source: FiniteComplex, target: FiniteComplex, f: GradedMap
    ) -> ChainMap:
        if f.shift != 0:
            raise ValueError("a chain map has shift 0")

        return cls(source, target, f.block)

    def component(self, degree: int) -> Matrix:
        if degree not in self._cache:
            self._cache[degree] = self._component(degree)

        return self._cache[degree]


def check_chain_map(f: ChainMap, degrees: t.Iterable[int]) -> None:
    """Raise :class:`.NotChainMapError` at the first degree where
    ``d_T f != f d_S``.
    """
    for k in degrees:
        left = f.target.differential(k) @ f.component(k)
        right = f.component(k + 1) @ f.source.differential(k)

        if left != right:
            raise NotChainMapError(k)


class MappingCone:
    """``cone(f)^t = C^(t+1) + D^t`` with ``d(c, y) = (-d_C c, f c + d_D y)``. Source
    labels are suffixed with ``[1]``.

    :param f: The chain map ``C -> D``.
    :param window: If given, check the chain map condition on this window first.
    """

    def __init__(self, f: ChainMap, window: tuple[int, int] | None = None) -> None:
        if window is not None:
            check_chain_map(f, range(window[0] - 1, window[1] + 2))

        self.f = f

    def basis(self, degree: int) -> tuple[str, ...]:
        shifted = tuple(shift_label(a, 1) for a in self.f.source.basis(degree + 1))
        return shifted + self.f.target.basis(degree)

    def differential(self, degree: int) -> Matrix:
        source = self.f.source
        target = self.f.target
        c0 = len(source.basis(degree + 1))
        d0 = len(target.basis(degree))
        c1 = len(source.basis(degree + 2))
        d1 = len(target.basis(degree + 1))
        parts: dict[tuple[int, int], Matrix] = {}

        if c0 and c1:
            parts[0, 0] = -source.differential(degree + 1)

        if c0 and d1:
            parts[1, 0] = self.f.component(degree + 1)

        if d0 and d1:
            parts[1, 1] = target.differential(degree)

        return Matrix.blocks([c1, d1], [c0, d0], parts)


def is_quasi_isomorphism(f: ChainMap, window: tuple[int, int]) -> bool:
    """Check the chain map condition, then that the cone is acyclic on the window."""
    cone = MappingCone(f, window)
    return is_acyclic(cone, window)


class SequenceComplex:
    """A complex that is only defined on a window of degrees; outside it the basis is
    not materializable. Used to wrap lazily presented complexes.
    """

    def __init__(
        self,
        basis: t.Callable[[int], tuple[str, ...]],
        differential: t.Callable[[int], Matrix],
    ) -> None:
        self._basis = basis
        self._differential = differential

    def basis(self, degree: int) -> tuple[str, ...]:
        return self._basis(degree)

    def differential(self, degree: int) -> Matrix:
        return self._differential(degree)

