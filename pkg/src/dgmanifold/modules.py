"""DG modules of the form ``functions (x) F`` for a finite graded fibre ``F``.

A module is given by the differential ``N(e)`` of each fibre basis element; the full
differential is ``D(f e) = Q(f) e + (-1)^|f| f N(e)``. Coefficients are written on
the left. Over a point base every module is a cochain complex presented one degree
at a time.
"""

from __future__ import annotations

import functools
import logging
import typing as t

from sympy import QQ

from . import linalg
from . import signs
from .algebra import AlgebraMorphism
from .algebra import Derivation
from .algebra import Element
from .algebra import FunctionAlgebra
from .algebra import Monomial
from .errors import MorphismError
from .errors import NotChainMapError
from .graded import ChainMap
from .graded import GradedVectorSpace
from .graded import dual_label
from .graded import shift_label
from .graded import tensor_label
from .linalg import Matrix

logger = logging.getLogger(__name__)


class Section:
    """A section ``sum_e c_e e`` of a module. Treat as immutable."""

    __slots__ = ("module", "coeffs")

    def __init__(self, module: DgModule, coeffs: t.Mapping[str, Element]) -> None:
        self.module = module
        self.coeffs: dict[str, Element] = {e: c for e, c in coeffs.items() if c}

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Section(0)"

        inner = " + ".join(f"[{c}]{e}" for e, c in sorted(self.coeffs.items()))
        return f"Section({inner})"

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Section):
            return self.coeffs == other.coeffs

        if isinstance(other, int) and other == 0:
            return not self.coeffs

        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.coeffs)))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: Section) -> Section:
        coeffs = dict(self.coeffs)

        for e, c in other.coeffs.items():
            coeffs[e] = coeffs[e] + c if e in coeffs else c

        return Section(self.module, coeffs)

    def __neg__(self) -> Section:
        return Section(self.module, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: Section) -> Section:
        return self + (-other)

    def scale(self, factor: Element | t.Any) -> Section:
        """Left multiplication ``f * s``."""
        if not isinstance(factor, Element):
            return Section(self.module, {e: c * factor for e, c in self.coeffs.items()})

        return Section(self.module, {e: factor * c for e, c in self.coeffs.items()})

    def coefficient(self, label: str) -> Element:
        return self.coeffs.get(label, self.module.algebra.zero)

    def degrees(self) -> set[int]:
        fibre = self.module.fibre
        return {
            d + fibre.degree(e) for e, c in self.coeffs.items() for d in c.degrees()
        }

    def degree(self) -> int:
        found = self.degrees()

        if len(found) > 1:
            raise ValueError(f"section is not homogeneous: degrees {sorted(found)}")

        return found.pop() if found else 0

    def fibre_degrees(self) -> set[int]:
        return {self.module.fibre.degree(e) for e in self.coeffs}

    def map_coefficients(self, func: t.Callable[[Element], Element]) -> Section:
        return Section(self.module, {e: func(c) for e, c in self.coeffs.items()})

    def relabel(
        self, module: DgModule, labels: t.Mapping[str, str] | None = None
    ) -> Section:
        """The same coefficients as a section of another module with the same
        algebra, optionally renaming fibre labels.
        """
        if labels is None:
            return Section(module, self.coeffs)

        return Section(module, {labels[e]: c for e, c in self.coeffs.items()})


class DgModule:
    """A DG module ``(functions (x) F, D)`` over ``(algebra, Q)``.

    :param algebra: The function algebra.
    :param q: The homological vector field of the algebra.
    :param fibre: The graded fibre ``F``.
    :param differential: ``N(e)`` for each fibre label, as a map from fibre label to
        coefficient. Missing labels have ``N(e) = 0``.
    :param name: Used in reports.
    """

    def __init__(
        self,
        algebra: FunctionAlgebra,
        q: Derivation,
        fibre: GradedVectorSpace,
        differential: t.Mapping[str, Section | t.Mapping[str, Element]] | None = None,
        name: str = "",
    ) -> None:
        self.algebra = algebra
        self.q = q
        self.fibre = fibre
        self.name = name
        self._n: dict[str, Section] = {}

        for e, image in (differential or {}).items():
            if e not in fibre:
                raise ValueError(f"unknown fibre label {e!r}")

            coeffs = image.coeffs if isinstance(image, Section) else image
            self._n[e] = Section(self, coeffs)

    def __repr__(self) -> str:
        return f"DgModule({self.name or self.fibre!r})"

    @property
    def labels(self) -> list[str]:
        return list(self.fibre)

    def section(self, coeffs: t.Mapping[str, Element] | None = None) -> Section:
        return Section(self, coeffs or {})

    @property
    def zero(self) -> Section:
        return Section(self, {})

    def basis_section(self, label: str) -> Section:
        return Section(self, {label: self.algebra.one})

    def n(self, label: str) -> Section:
        """``D`` applied to the fibre basis element ``label``."""
        return self._n.get(label, self.zero)

    def d(self, section: Section) -> Section:
        result = self.zero

        for e, c in section.coeffs.items():
            qc = self.q(c)

            if qc:
                result = result + Section(self, {e: qc})

            n = self.n(e)

            if n:
                result = result + n.scale(c.twist())

        return result

    def square_is_zero(self) -> bool:
        return all(not self.d(self.n(e)) for e in self.fibre)

    def check_square_zero(self) -> None:
        for e in self.fibre:
            if self.d(self.n(e)):
                raise ValueError(f"D∘D is not zero on {e}")

    def is_triangular(self) -> bool:
        """``N(e)`` only has components in fibre degrees above ``deg e``, so upper
        blocks vanish and diagonal blocks are ``Q (x) id``.
        """
        for e in self.fibre:
            degree = self.fibre.degree(e)

            if any(d <= degree for d in self.n(e).fibre_degrees()):
                return False

        return True

    def leibniz_holds(self, f: Element, section: Section) -> bool:
        """Check ``D(f s) = Q(f) s + (-1)^|f| f D(s)`` for homogeneous ``f``."""
        left = self.d(section.scale(f))
        right = section.scale(self.q(f)) + self.d(section).scale(f.twist())
        return left == right

    # Point base materialization

    @functools.lru_cache(maxsize=None)  # noqa: B019
    def _pairs(self, degree: int) -> list[tuple[Monomial, str]]:
        pairs = []

        for e in self.fibre:
            for mono in self.algebra.monomials(degree - self.fibre.degree(e)):
                pairs.append((mono, e))

        return pairs

    def basis(self, degree: int) -> tuple[str, ...]:
        return tuple(
            f"{self.algebra.monomial_label(m)}⊗{e}" for m, e in self._pairs(degree)
        )

    def basis_element(self, degree: int, index: int) -> Section:
        mono, e = self._pairs(degree)[index]
        coeff = Element(self.algebra, {mono: self.algebra.ring.one})
        return Section(self, {e: coeff})

    def vector(self, section: Section, degree: int) -> dict[int, t.Any]:
        """Coordinates of a homogeneous section in :meth:`basis`."""
        index = {p: i for i, p in enumerate(self._pairs(degree))}
        out = {}

        for e, c in section.coeffs.items():
            for mono, value in c.terms.items():
                try:
                    out[index[mono, e]] = value
                except KeyError:
                    raise ValueError(
                        f"section has a term outside degree {degree}"
                    ) from None

        return out

    def from_vector(self, vector: t.Mapping[int, t.Any], degree: int) -> Section:
        pairs = self._pairs(degree)
        coeffs: dict[str, dict[Monomial, t.Any]] = {}

        for i, v in vector.items():
            mono, e = pairs[i]
            coeffs.setdefault(e, {})[mono] = QQ.convert(v)

        return Section(
            self, {e: Element(self.algebra, terms) for e, terms in coeffs.items()}
        )

    def differential(self, degree: int) -> Matrix:
        source = self._pairs(degree)
        target = len(self._pairs(degree + 1))
        columns = [
            self.vector(self.d(self.basis_element(degree, i)), degree + 1)
            for i in range(len(source))
        ]
        return Matrix.from_columns(target, columns)

    # constructions

    def direct_sum(self, other: DgModule) -> DgModule:
        fibre = self.fibre.direct_sum(other.fibre)
        module = DgModule(self.algebra, self.q, fibre, name=f"{self.name}⊕{other.name}")
        n = {e: self.n(e).coeffs for e in self.fibre}
        n.update({e: other.n(e).coeffs for e in other.fibre})
        module._n = {e: Section(module, c) for e, c in n.items()}
        return module

    def dual(self) -> DgModule:
        """The dual module with ``D^v`` determined by
        ``Q<w, X> = <D^v w, X> + (-1)^|w| <w, D X>``.
        """
        fibre = self.fibre.dual()
        n: dict[str, dict[str, Element]] = {}

        for a in self.fibre:
            da = self.fibre.degree(a)

            for b, c in self.n(a).coeffs.items():
                db = self.fibre.degree(b)
                sign = -signs.power(da * db + db)
                n.setdefault(dual_label(b), {})[dual_label(a)] = c * sign

        return DgModule(self.algebra, self.q, fibre, n, name=f"{self.name}^v")

    def tensor(self, other: DgModule) -> DgModule:
        """``D(a (x) b) = D(a) (x) b + (-1)^|a| a (x) D(b)``."""
        fibre = self.fibre.tensor(other.fibre)
        n: dict[str, dict[str, Element]] = {}

        for a in self.fibre:
            da = self.fibre.degree(a)

            for b in other.fibre:
                image: dict[str, Element] = {}

                for a2, c in self.n(a).coeffs.items():
                    image[tensor_label(a2, b)] = c

                for b2, c in other.n(b).coeffs.items():
                    value = c.twist(da) * signs.power(da)
                    key = tensor_label(a, b2)
                    image[key] = image[key] + value if key in image else value

                n[tensor_label(a, b)] = image

        return DgModule(
            self.algebra, self.q, fibre, n, name=f"{self.name}⊗{other.name}"
        )

    def shift(self) -> DgModule:
        """``M[1]``, labels ``e[1]`` in degree ``deg e - 1``, with
        ``D s = -s D`` where ``s(g e) = (-1)^|g| g e[1]``.
        """
        fibre = self.fibre.shift(1)
        n = {
            shift_label(e, 1): {
                shift_label(e2, 1): -c.twist() for e2, c in self.n(e).coeffs.items()
            }
            for e in self.fibre
        }
        return DgModule(self.algebra, self.q, fibre, n, name=f"{self.name}[1]")

    def suspend(self, section: Section, target: DgModule) -> Section:
        """``s(sum g e) = sum (-1)^|g| g e[1]`` into a module containing ``M[1]``."""
        return Section(
            target, {shift_label(e, 1): c.twist() for e, c in section.coeffs.items()}
        )

    def pullback(self, morphism: AlgebraMorphism, q: Derivation) -> DgModule:
        """Pull back along an algebra map ``morphism: A -> B``, giving a module over
        ``(B, q)`` with the same fibre.
        """
        if morphism.source != self.algebra:
            raise ValueError("morphism does not start at this module's algebra")

        n = {
            e: {b: morphism(c) for b, c in self.n(e).coeffs.items()}
            for e in self.fibre
        }
        return DgModule(morphism.target, q, self.fibre, n, name=f"Ψ*{self.name}")

    def submodule(
        self, vectors: t.Mapping[str, t.Mapping[str, t.Any]], name: str = ""
    ) -> tuple[DgModule, ModuleMap]:
        """The submodule spanned by constant vectors, and its inclusion.

        :param vectors: New label to a constant vector in this fibre. Vectors must be
            homogeneous and linearly independent.
        :raises MorphismError: If ``D`` leaves the span.
        """
        labels = list(vectors)
        degrees = {}

        for k, vector in vectors.items():
            found = {self.fibre.degree(e) for e in vector}

            if len(found) != 1:
                raise ValueError(f"vector {k!r} is not homogeneous")

            degrees[k] = found.pop()

        fibre = GradedVectorSpace.from_labels(degrees)
        own = self.labels
        index = {e: i for i, e in enumerate(own)}
        w = Matrix.from_columns(
            len(own),
            [{index[e]: QQ.convert(v) for e, v in vectors[k].items()} for k in labels],
        )
        left = linalg.left_inverse(w)
        n: dict[str, dict[str, Element]] = {}

        for k in labels:
            image = self.apply_constant(vectors[k], self.n)
            coeffs: dict[str, Element] = {}

            for j, k2 in enumerate(labels):
                total = self.algebra.zero

                for e, c in image.coeffs.items():
                    entry = left[j, index[e]]

                    if entry:
                        total = total + c * entry

                if total:
                    coeffs[k2] = total

            rebuilt = self.zero

            for k2, c in coeffs.items():
                rebuilt = rebuilt + self.constant_section(vectors[k2]).scale(c)

            if rebuilt != image:
                raise MorphismError(f"image not in kernel sub-bundle: D({k})")

            n[k] = coeffs

        name = name or f"sub {self.name}"
        module = DgModule(self.algebra, self.q, fibre, n, name=name)
        inclusion = ModuleMap(
            module, self, {k: self.constant_section(vectors[k]) for k in labels}
        )
        return module, inclusion

    def constant_section(self, vector: t.Mapping[str, t.Any]) -> Section:
        return Section(self, {e: self.algebra.scalar(v) for e, v in vector.items()})

    def apply_constant(
        self, vector: t.Mapping[str, t.Any], func: t.Callable[[str], Section]
    ) -> Section:
        result = self.zero

        for e, v in vector.items():
            result = result + func(e).scale(v)

        return result

    def cone(self, f: ModuleMap) -> DgModule:
        """Cone of a degree 0 linear chain map ``f: M -> N``; fibre ``M[1] + N`` with
        ``D(e[1]) = -s(N e) + f(e)``.
        """
        if f.degree != 0 or f.morphism is not None:
            raise ValueError("cones need a degree 0 linear map")

        source, target = f.source, f.target
        shifted = source.fibre.shift(1)
        fibre = shifted.direct_sum(target.fibre)
        module = DgModule(self.algebra, self.q, fibre, name=f"cone({f.name})")
        n: dict[str, Section] = {}

        for e in source.fibre:
            image = f(source.basis_section(e)).relabel(module)
            image = image - source.suspend(source.n(e), module)
            n[shift_label(e, 1)] = image

        for e in target.fibre:
            n[e] = target.n(e).relabel(module)

        module._n = {e: Section(module, s.coeffs) for e, s in n.items()}
        return module


class ModuleMap:
    """A map of modules, linear over an algebra map (or the identity when
    ``morphism`` is omitted): ``F(f e) = (-1)^(|F||f|) phi(f) F(e)``.

    :param source: The source module.
    :param target: The target module.
    :param images: ``F(e)`` for each source fibre label.
    :param morphism: The algebra map ``phi`` from the source algebra to the target
        algebra.
    :param degree: The degree of ``F``.
    """

    def __init__(
        self,
        source: DgModule,
        target: DgModule,
        images: t.Mapping[str, Section],
        morphism: AlgebraMorphism | None = None,
        degree: int = 0,
        name: str = "",
    ) -> None:
        self.source = source
        self.target = target
        self.morphism = morphism
        self.degree = degree
        self.name = name
        self.images = {e: s.relabel(target) for e, s in images.items()}

    def image(self, label: str) -> Section:
        return self.images.get(label, self.target.zero)

    def __call__(self, section: Section) -> Section:
        result = self.target.zero

        for e, c in section.coeffs.items():
            image = self.image(e)

            if not image:
                continue

            c = c.twist(self.degree)

            if self.morphism is not None:
                c = self.morphism(c)

            result = result + image.scale(c)

        return result

    def __matmul__(self, other: ModuleMap) -> ModuleMap:
        """Composition ``self o other`` of linear maps."""
        if self.morphism is not None or other.morphism is not None:
            raise ValueError("only linear maps compose")

        images = {e: self(other.image(e)) for e in other.source.fibre}
        degree = self.degree + other.degree
        return ModuleMap(other.source, self.target, images, degree=degree)

    def check_chain_map(self) -> None:
        """``D F(e) = (-1)^|F| F(D e)`` on every fibre basis element."""
        sign = signs.power(self.degree)

        for e in self.source.fibre:
            left = self.target.d(self.image(e))
            right = self(self.source.n(e))

            if left != (right if sign > 0 else -right):
                raise NotChainMapError(None, f"{self.name or 'map'} on {e}")

    def is_chain_map(self) -> bool:
        try:
            self.check_chain_map()
        except NotChainMapError:
            return False

        return True

    def component(self, degree: int) -> Matrix:
        """The matrix in degree ``t`` over a point base."""
        count = len(self.source.basis(degree))
        rows = len(self.target.basis(degree + self.degree))
        columns = [
            self.target.vector(
                self(self.source.basis_element(degree, i)), degree + self.degree
            )
            for i in range(count)
        ]
        return Matrix.from_columns(rows, columns)

    def chain_map(self) -> ChainMap:
        if self.degree != 0:
            raise ValueError("a chain map has degree 0")

        return ChainMap(self.source, self.target, self.component)

    def tensor(self, other: ModuleMap, source: DgModule, target: DgModule) -> ModuleMap:
        """``(F (x) G)(a (x) b) = F(a) (x) G(b)`` for degree 0 maps.

        :param source: The tensor product of the sources.
        :param target: The tensor product of the targets.
        """
        if self.degree or other.degree:
            raise ValueError("only degree 0 maps are tensored")

        morphism = self.morphism or other.morphism
        images = {}

        for a in self.source.fibre:
            for b in other.source.fibre:
                images[tensor_label(a, b)] = tensor_sections(
                    self.image(a), other.image(b), target
                )

        return ModuleMap(source, target, images, morphism)


def tensor_sections(left: Section, right: Section, target: DgModule) -> Section:
    """``(c a) (x) (d b) = (-1)^(|a||d|) c d (a (x) b)``."""
    fibre = left.module.fibre
    coeffs: dict[str, Element] = {}

    for a, c in left.coeffs.items():
        da = fibre.degree(a)

        for b, d in right.coeffs.items():
            value = c * d.twist(da)
            key = tensor_label(a, b)
            coeffs[key] = coeffs[key] + value if key in coeffs else value

    return Section(target, coeffs)


def function_module(algebra: FunctionAlgebra, q: Derivation) -> DgModule:
    """The algebra itself, with fibre one line ``1`` in degree 0."""
    return DgModule(algebra, q, GradedVectorSpace({0: ["1"]}), name="functions")


def identity_map(module: DgModule) -> ModuleMap:
    return ModuleMap(
        module, module, {e: module.basis_section(e) for e in module.fibre}, name="id"
    )


def curvature_homotopy(module: DgModule) -> ModuleMap:
    """The contracting homotopy ``h(s) = (xi / c) s`` of a module over a curvature
    line, one generator ``xi`` of degree -1 over a point with ``Q(xi) = c`` a
    nonzero constant. ``D h + h D`` is the identity, so the module is acyclic.

    :raises MorphismError: If the algebra is not a curvature line.
    """
    algebra = module.algebra

    if not algebra.ring.is_point or algebra.degrees != (-1,):
        raise MorphismError("not a module over a curvature line")

    value = module.q.value(0)

    if not value.is_scalar() or not value.constant:
        raise MorphismError("the curvature is zero")

    factor = algebra.gen(0) * (QQ.one / value.constant)
    images = {e: module.basis_section(e).scale(factor) for e in module.fibre}
    return ModuleMap(module, module, images, degree=-1, name="h")


def is_contracting(h: ModuleMap, window: tuple[int, int]) -> bool:
    """Check ``D h + h D = id`` on every basis section of the window."""
    module = h.source

    for degree in range(window[0], window[1] + 1):
        for i in range(len(module.basis(degree))):
            s = module.basis_element(degree, i)

            if module.d(h(s)) + h(module.d(s)) != s:
                logger.debug("homotopy fails in degree %d", degree)
                return False

    return True
