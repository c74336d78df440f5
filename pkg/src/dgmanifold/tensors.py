"""Vector fields, forms and ``(p, q)`` tensors as DG modules, and the maps a
morphism induces between them: the pushforward, the natural map ``I``, the kernel
complex of a linear fibration, and the pair ``alpha``, ``beta`` into the mixed tensor
complex.

Vector fields are written in the frame of horizontal lifts ``∂x1, ...`` of base
coordinate fields, taken with respect to a connection on the fibre bundle, and the
fibre derivations ``∂e`` for each fibre label ``e``. A tensor ``E(o; I)`` eats the
frame elements ``I = (I_1, ..., I_q)`` and returns the output basis element ``o``.
"""

from __future__ import annotations

import itertools
import logging
import math
import typing as t

from sympy import QQ

from . import linalg
from . import signs
from .algebra import AlgebraMorphism
from .algebra import Derivation
from .algebra import Element
from .bundle import CurvedBundle
from .errors import MorphismError
from .graded import GradedVectorSpace
from .linalg import Matrix
from .modules import DgModule
from .modules import ModuleMap
from .modules import Section
from .modules import function_module
from .morphism import LinftyMorphism
from .scalars import Scalar

logger = logging.getLogger(__name__)

Christoffel = dict[int, dict[str, dict[str, Scalar]]]
"""``{a: {j: {k: Gamma^k_aj}}}``, so ``nabla_(∂x_a) e_j = sum_k Gamma^k_aj e_k``."""


class FibreConnection:
    """A degree preserving connection on the fibre bundle ``L``. Over a point base
    there is nothing to choose.

    :param bundle: The bundle.
    :param christoffel: The symbols ``Gamma^k_aj``, base scalars. Missing entries are
        zero.
    """

    def __init__(
        self,
        bundle: CurvedBundle,
        christoffel: t.Mapping[int, t.Mapping[str, t.Mapping[str, t.Any]]]
        | None = None,
    ) -> None:
        self.bundle = bundle
        self.christoffel: Christoffel = {}

        for a, table in (christoffel or {}).items():
            if not 0 <= int(a) < bundle.ring.dimension:
                raise MorphismError(f"connection refers to base coordinate {a}")

            for j, row in table.items():
                for k, value in row.items():
                    if bundle.degree(j) != bundle.degree(k):
                        raise MorphismError(
                            f"connection mixes degrees: Γ({a}, {j}) has {k}"
                        )

                    value = bundle.ring.convert(value)

                    if value:
                        entry = self.christoffel.setdefault(int(a), {})
                        entry.setdefault(j, {})[k] = value

    def symbol(self, a: int, j: str, k: str) -> Scalar:
        return self.christoffel.get(a, {}).get(j, {}).get(k, self.bundle.ring.zero)


def base_label(variable: str) -> str:
    return f"∂{variable}"


def fibre_label(label: str) -> str:
    return f"∂{label}"


class VectorFieldModule(DgModule):
    """Vector fields with the differential ``[Q, -]``.

    :param bundle: The bundle.
    :param connection: The connection used for horizontal lifts. Flat in the
        trivialization when omitted.
    """

    def __init__(
        self, bundle: CurvedBundle, connection: FibreConnection | None = None
    ) -> None:
        self.bundle = bundle
        self.connection = connection or FibreConnection(bundle)
        algebra = bundle.algebra
        degrees = {base_label(x): 0 for x in bundle.ring.variables}
        degrees.update({fibre_label(e): bundle.degree(e) for e in bundle.labels})
        super().__init__(
            algebra, bundle.q, GradedVectorSpace.from_labels(degrees), name="X"
        )
        self.frame: dict[str, Derivation] = {}

        for a, x in enumerate(bundle.ring.variables):
            self.frame[base_label(x)] = self.horizontal_lift(a)

        for k, e in enumerate(bundle.labels):
            self.frame[fibre_label(e)] = Derivation.coordinate(algebra, k)

        q = bundle.q
        self._n = {
            label: self.from_derivation(q.commutator(frame))
            for label, frame in self.frame.items()
        }

    def horizontal_lift(self, a: int) -> Derivation:
        """``∂x_a`` with ``xi_k -> -sum_j Gamma^k_aj xi_j``."""
        algebra = self.algebra
        values: dict[int, Element] = {}

        for j, row in self.connection.christoffel.get(a, {}).items():
            for k, value in row.items():
                index = algebra.index(k)
                term = algebra.gen(j) * (-value)
                values[index] = values.get(index, algebra.zero) + term

        return Derivation(algebra, 0, values, {a: algebra.one})

    def to_derivation(self, section: Section) -> Derivation:
        """The derivation ``sum_e c_e frame_e`` of a homogeneous section."""
        result = Derivation.zero(self.algebra, section.degree())

        for e, c in section.coeffs.items():
            for part in c.components().values():
                result = result + self.frame[e].scale(part)

        return result

    def from_derivation(self, derivation: Derivation) -> Section:
        """Frame coefficients of a derivation."""
        algebra = self.algebra
        coeffs: dict[str, Element] = {}

        for a, x in enumerate(self.bundle.ring.variables):
            c = derivation(algebra.coordinate(a))

            if c:
                coeffs[base_label(x)] = c

        for k, e in enumerate(self.bundle.labels):
            c = derivation(algebra.gen(k))

            for a, x in enumerate(self.bundle.ring.variables):
                ca = coeffs.get(base_label(x))

                if ca:
                    c = c - ca * self.frame[base_label(x)](algebra.gen(k))

            if c:
                coeffs[fibre_label(e)] = c

        return Section(self, coeffs)


def tensor_power(module: DgModule, p: int) -> DgModule:
    """``module^(x)p``; the function module when ``p`` is 0."""
    if p == 0:
        return function_module(module.algebra, module.q)

    result = module

    for _ in range(p - 1):
        result = result.tensor(module)

    return result


def map_power(
    f: ModuleMap, p: int, source: DgModule, target: DgModule
) -> ModuleMap:
    """``f^(x)p`` between the given tensor powers of its source and target."""
    if p == 0:
        images = {"1": target.basis_section("1")}
        return ModuleMap(source, target, images, f.morphism)

    result = f
    left, right = f.source, f.target

    for i in range(p - 1):
        last = i == p - 2
        new_source = source if last else left.tensor(f.source)
        new_target = target if last else right.tensor(f.target)
        result = result.tensor(f, new_source, new_target)
        left, right = new_source, new_target

    return result


def tensor_label(output: str, inputs: t.Sequence[str]) -> str:
    if not inputs:
        return output

    return f"{output}({','.join(inputs)})"


class TensorModule(DgModule):
    """Function multilinear maps ``inputs^q -> output`` with the differential
    ``L_Q T = [D, T]``:

    ``(L_Q T)(X_1, ..., X_q) = D(T(X)) - (-1)^|T| sum_i (-1)^(|X_1| + ... +
    |X_(i-1)|) T(X_1, ..., D X_i, ..., X_q)``.

    :param inputs: The module the tensor eats, usually vector fields.
    :param arity: ``q``.
    :param output: The module of values.
    """

    def __init__(
        self, inputs: DgModule, arity: int, output: DgModule, name: str = ""
    ) -> None:
        if inputs.algebra != output.algebra:
            raise ValueError("inputs and output live over different algebras")

        self.inputs = inputs
        self.arity = arity
        self.output = output
        self.keys: dict[str, tuple[str, tuple[str, ...]]] = {}
        degrees: dict[str, int] = {}

        for o in output.fibre:
            for word in itertools.product(list(inputs.fibre), repeat=arity):
                label = tensor_label(o, word)
                self.keys[label] = (o, word)
                degrees[label] = output.fibre.degree(o) - sum(
                    inputs.fibre.degree(e) for e in word
                )

        self.labels_of = {key: label for label, key in self.keys.items()}
        super().__init__(
            inputs.algebra,
            inputs.q,
            GradedVectorSpace.from_labels(degrees),
            name=name or f"T({arity}, {output.name})",
        )
        self._n = {label: self._differential(label) for label in self.keys}

    def label(self, output: str, inputs: t.Sequence[str]) -> str:
        return self.labels_of[output, tuple(inputs)]

    def element(self, output: str, inputs: t.Sequence[str]) -> Section:
        return self.basis_section(self.label(output, inputs))

    def form_degree(self, section: Section) -> int:
        """Degree of a homogeneous form in the de Rham grading, where
        ``deg(dξ) = deg(ξ) + 1``. The differential uses the tensor grading.
        """
        return section.degree() + self.arity

    def _differential(self, label: str) -> Section:
        o, word = self.keys[label]
        degree = self.fibre.degree(label)
        fibre = self.inputs.fibre
        coeffs: dict[str, Element] = {}

        def add(key: str, value: Element) -> None:
            coeffs[key] = coeffs[key] + value if key in coeffs else value

        for o2, c in self.output.n(o).coeffs.items():
            add(self.label(o2, word), c)

        before = 0

        for i, slot in enumerate(word):
            for j in fibre:
                h = self.inputs.n(j).coefficient(slot)

                if not h:
                    continue

                hd = fibre.degree(j) + 1 - fibre.degree(slot)
                sign = signs.power((1 + hd) * (degree + before))
                replaced = (*word[:i], j, *word[i + 1 :])
                add(self.label(o, replaced), h * -sign)

            before += fibre.degree(slot)

        return Section(self, coeffs)

    def evaluate(self, tensor: Section, args: t.Sequence[Section]) -> Section:
        """``T(X_1, ..., X_q)`` for homogeneous arguments."""
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments")

        output = self.output
        fibre = self.inputs.fibre
        result = output.zero
        expansions = [list(x.coeffs.items()) for x in args]

        for label, c in tensor.coeffs.items():
            o, word = self.keys[label]
            degree = self.fibre.degree(label)

            for choice in itertools.product(*expansions):
                if tuple(e for e, _ in choice) != word:
                    continue

                coeff = c
                before = 0

                for e, a in choice:
                    coeff = coeff * a.twist(degree + before)
                    before += fibre.degree(e)

                result = result + output.basis_section(o).scale(coeff)

        return result

    def reconstruct(self, values: t.Callable[[tuple[str, ...]], Section]) -> Section:
        """The tensor taking the given values on frame words."""
        coeffs: dict[str, Element] = {}

        for word in itertools.product(list(self.inputs.fibre), repeat=self.arity):
            for o, c in values(word).coeffs.items():
                coeffs[self.label(o, word)] = c

        return Section(self, coeffs)

    def lie_derivative(self, tensor: Section) -> Section:
        """``L_Q T`` computed from its defining formula by evaluation on frame
        words. Agrees with :meth:`d`.
        """
        degree = tensor.degree()
        inputs = self.inputs

        def values(word: tuple[str, ...]) -> Section:
            args = [inputs.basis_section(e) for e in word]
            result = self.output.d(self.evaluate(tensor, args))
            before = 0

            for i, e in enumerate(word):
                changed = [*args[:i], inputs.n(e), *args[i + 1 :]]
                term = self.evaluate(tensor, changed)
                sign = signs.power(degree) * signs.power(before)
                result = result - (term if sign > 0 else -term)
                before += inputs.fibre.degree(e)

            return result

        return self.reconstruct(values)

    def permute(self, tensor: Section, order: t.Sequence[int]) -> Section:
        """Act on inputs by ``order`` with the Koszul sign of the frame degrees."""
        coeffs: dict[str, Element] = {}
        fibre = self.inputs.fibre

        for label, c in tensor.coeffs.items():
            o, word = self.keys[label]
            sign = signs.permutation_sign([fibre.degree(e) for e in word], order)
            key = self.label(o, [word[k] for k in order])
            value = c * sign
            coeffs[key] = coeffs[key] + value if key in coeffs else value

        return Section(self, coeffs)

    def symmetrize(self, tensor: Section, antisymmetric: bool = False) -> Section:
        """The projection onto symmetric (or antisymmetric) tensors."""
        result = self.zero
        orders = list(itertools.permutations(range(self.arity)))

        for order in orders:
            term = self.permute(tensor, order)

            if antisymmetric and signs.sign_of_permutation(order) < 0:
                term = -term

            result = result + term

        return result.scale(QQ(1, math.factorial(self.arity)))


def form_module(vector_fields: DgModule, arity: int) -> TensorModule:
    """``q``-forms, tensors with values in functions."""
    functions = function_module(vector_fields.algebra, vector_fields.q)
    return TensorModule(vector_fields, arity, functions, name=f"Ω{arity}")


def tensor_module(vector_fields: DgModule, p: int, q: int) -> TensorModule:
    """``(p, q)`` tensors: ``q`` vector field inputs, values in the ``p``-th tensor
    power of vector fields.
    """
    output = tensor_power(vector_fields, p)
    return TensorModule(vector_fields, q, output, name=f"T({p},{q})")


def pair(form: Section, module: TensorModule, vector: Section) -> Element:
    """``<omega, X>`` for a 1-form."""
    return module.evaluate(form, [vector]).coefficient("1")


def homogeneous_parts(section: Section) -> dict[int, Section]:
    """Split a section by total degree."""
    fibre = section.module.fibre
    parts: dict[int, dict[str, Element]] = {}

    for e, c in section.coeffs.items():
        for d, part in c.components().items():
            parts.setdefault(d + fibre.degree(e), {})[e] = part

    return {d: Section(section.module, coeffs) for d, coeffs in sorted(parts.items())}


def wedge(
    first: Section, second: Section, target: TensorModule | None = None
) -> Section:
    """``omega ^ eta = C(p + q, p) Alt(omega (x) eta)`` for a ``p``-form and a
    ``q``-form, with ``(omega (x) eta)(X, Y) = (-1)^(|eta||X|) omega(X) eta(Y)``.
    Swapping the factors costs ``(-1)^(|omega||eta| + p q)``.

    :param target: The module of ``p + q``-forms, built when omitted.
    """
    left, right = first.module, second.module

    if not isinstance(left, TensorModule) or not isinstance(right, TensorModule):
        raise TypeError("wedge needs forms")

    if left.inputs is not right.inputs:
        raise ValueError("forms on different vector fields")

    p, q = left.arity, right.arity
    inputs = left.inputs
    forms = target or form_module(inputs, p + q)
    result = forms.zero

    for degree, part in homogeneous_parts(second).items():

        def values(
            word: tuple[str, ...], part: Section = part, degree: int = degree
        ) -> Section:
            x = [inputs.basis_section(e) for e in word[:p]]
            y = [inputs.basis_section(e) for e in word[p:]]
            a = left.evaluate(first, x).coefficient("1")
            b = right.evaluate(part, y).coefficient("1")

            if not a or not b:
                return forms.output.zero

            moved = sum(inputs.fibre.degree(e) for e in word[:p])
            sign = signs.koszul(degree, moved)
            return forms.output.section({"1": a * b * sign})

        result = result + forms.reconstruct(values)

    return forms.symmetrize(result, antisymmetric=True).scale(QQ(math.comb(p + q, p)))


class Pushforward:
    """The modules and maps a morphism ``Psi: M -> N`` induces on vector fields.

    :param morphism: The morphism.
    :param source: Vector fields on ``M``.
    :param target: Vector fields on ``N``.
    """

    def __init__(
        self,
        morphism: LinftyMorphism,
        source: VectorFieldModule | None = None,
        target: VectorFieldModule | None = None,
    ) -> None:
        self.morphism = morphism
        self.source = source or VectorFieldModule(morphism.source)
        self.target = target or VectorFieldModule(morphism.target)
        self.psi: AlgebraMorphism = morphism.pullback
        self.pulled = self.target.pullback(self.psi, self.source.q)
        self.pulled.name = "Ψ*X"

    def apply(self, derivation: Derivation) -> Section:
        """``X o Psi*`` as a section of the pulled back vector fields."""
        target = self.target
        psi = self.psi
        coeffs: dict[str, Element] = {}
        base: dict[int, Element] = {}

        for b, y in enumerate(target.bundle.ring.variables):
            c = derivation(self.source.algebra.scalar(self.morphism.base_map[b]))

            if c:
                base[b] = c
                coeffs[base_label(y)] = c

        for j, e in enumerate(target.bundle.labels):
            c = derivation(psi(target.algebra.gen(j)))

            for b, cb in base.items():
                lift = target.frame[base_label(target.bundle.ring.variables[b])]
                c = c - cb * psi(lift(target.algebra.gen(j)))

            if c:
                coeffs[fibre_label(e)] = c

        return Section(self.pulled, coeffs)

    def pushforward(self) -> ModuleMap:
        """``Psi_*`` from vector fields on ``M`` to pulled back vector fields."""
        images = {e: self.apply(frame) for e, frame in self.source.frame.items()}
        return ModuleMap(self.source, self.pulled, images, name="Ψ_*")

    def gamma(self) -> dict[str, Section]:
        """Fibre components of ``Psi_*`` on horizontal lifts. They vanish for the
        adapted connection.
        """
        out = {}
        base = {base_label(y) for y in self.target.bundle.ring.variables}

        for x in self.source.bundle.ring.variables:
            image = self.apply(self.source.frame[base_label(x)])
            fibre = {e: c for e, c in image.coeffs.items() if e not in base}
            out[base_label(x)] = Section(self.pulled, fibre)

        return out

    def natural_map(self) -> ModuleMap:
        """``I(Z) = 1 (x) Z``, semilinear over ``Psi*``."""
        images = {e: self.pulled.basis_section(e) for e in self.target.fibre}
        return ModuleMap(self.target, self.pulled, images, self.psi, name="I")

    def mixed(self, p: int, q: int) -> TensorModule:
        """Tensors eating ``q`` vector fields on ``M`` with values in
        ``(Psi* X_N)^(x)p``.
        """
        return TensorModule(
            self.source, q, tensor_power(self.pulled, p), name=f"mixed({p},{q})"
        )

    def alpha(self, p: int, q: int) -> ModuleMap:
        """``alpha(F) = Psi_* o F``."""
        source = tensor_module(self.source, p, q)
        target = self.mixed(p, q)
        push = map_power(self.pushforward(), p, source.output, target.output)
        images = {
            label: Section(
                target,
                {
                    target.label(o2, word): c
                    for o2, c in push(source.output.basis_section(o)).coeffs.items()
                },
            )
            for label, (o, word) in source.keys.items()
        }
        return ModuleMap(source, target, images, name="α")

    def beta(self, p: int, q: int) -> ModuleMap:
        """``beta(G)(Y_1, ..., Y_q) = Psi*G(Psi_* Y_1, ..., Psi_* Y_q)``,
        semilinear over ``Psi*``.
        """
        source = tensor_module(self.target, p, q)
        target = self.mixed(p, q)
        pulled = TensorModule(self.pulled, q, target.output)
        push = self.pushforward()
        pushed = {e: push.image(e) for e in self.source.fibre}
        images = {}

        for label in source.keys:
            element = Section(pulled, {label: pulled.algebra.one})
            images[label] = target.reconstruct(
                lambda word, element=element: pulled.evaluate(
                    element, [pushed[e] for e in word]
                )
            )

        return ModuleMap(source, target, images, self.psi, name="β")


def adapted_connection(
    morphism: LinftyMorphism, target_connection: FibreConnection | None = None
) -> FibreConnection:
    """The connection on ``L`` for which ``gamma = 0``:
    ``Gamma^L_a = s o (f* Gamma^E)_a o phi_1`` with ``s`` a constant right inverse
    of ``phi_1``. Needs a linear morphism with constant ``phi_1``.
    """
    source, target = morphism.source, morphism.target
    target_connection = target_connection or FibreConnection(target)
    phi = constant_linear_part(morphism)
    ring = source.ring
    christoffel: dict[int, dict[str, dict[str, t.Any]]] = {}

    for a in range(ring.dimension):
        pulled: dict[str, dict[str, t.Any]] = {}

        for b in range(target.ring.dimension):
            weight = ring.diff(morphism.base_map[b], a)

            if not weight:
                continue

            for i, row in target_connection.christoffel.get(b, {}).items():
                for j, value in row.items():
                    image = target.ring.compose(value, morphism.base_map, ring)
                    entry = pulled.setdefault(i, {})
                    entry[j] = entry.get(j, ring.zero) + weight * image

        table: dict[str, dict[str, t.Any]] = {}

        for k in source.fibre.degrees:
            if k not in target.fibre.degrees:
                continue

            phik = phi.block(k)
            s = linalg.right_inverse(phik)
            ins = source.fibre.labels(k)
            outs = target.fibre.labels(k)

            for jj, j in enumerate(ins):
                for kk, out in enumerate(ins):
                    total = ring.zero

                    for r, i in enumerate(outs):
                        if not phik[r, jj]:
                            continue

                        for m, j2 in enumerate(outs):
                            if s[kk, m] and i in pulled and j2 in pulled[i]:
                                total = total + pulled[i][j2] * (s[kk, m] * phik[r, jj])

                    if total:
                        table.setdefault(j, {})[out] = total

        if table:
            christoffel[a] = table

    return FibreConnection(source, christoffel)


def constant_linear_part(morphism: LinftyMorphism) -> t.Any:
    """``phi_1`` as a constant graded map, or :class:`.MorphismError`."""
    ring = morphism.source.ring

    for table in morphism.taylor.get(1, {}).values():
        for value in table.values():
            if not ring.is_constant(value):
                raise MorphismError("φ₁ is not constant")

    return morphism.linear_part()


def kernel_complex(
    push: Pushforward, name: str = "ker Ψ_*"
) -> tuple[DgModule, ModuleMap]:
    """The submodule ``ker Psi_*`` of vector fields on ``M`` for a linear fibration
    whose pushforward has constant coefficients in the chosen frames, with its
    inclusion. Kernel vectors are labelled ``k1, k2, ...`` in degree order.

    :raises MorphismError: If the morphism is not a linear fibration or the
        pushforward is not constant.
    """
    morphism = push.morphism

    if not morphism.is_linear():
        raise MorphismError("not a linear fibration")

    f = push.pushforward()
    source = push.source
    target = push.pulled
    vectors: dict[str, dict[str, t.Any]] = {}
    count = 0

    for k in source.fibre.degrees:
        columns = []

        for e in source.fibre.labels(k):
            column = {}

            for label, c in f.image(e).coeffs.items():
                ring = source.algebra.ring

                if not c.is_scalar() or not ring.is_constant(c.constant):
                    raise MorphismError("Ψ_* is not constant in the chosen frames")

                column[target.fibre.labels(k).index(label)] = ring.constant(c.constant)

            columns.append(column)

        matrix = Matrix.from_columns(target.fibre.dim(k), columns)

        if linalg.rank(matrix) != target.fibre.dim(k):
            raise MorphismError("not a linear fibration")

        for vector in linalg.nullspace(matrix):
            count += 1
            labels = source.fibre.labels(k)
            vectors[f"k{count}"] = {labels[i]: v for i, v in vector.items()}

    logger.info("kernel complex has rank %d", count)
    return source.submodule(vectors, name=name)

