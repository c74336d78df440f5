"""Affine connections on a DG manifold, the Atiyah cocycle
``At(X, Y) = D(nabla_X Y) - nabla_(D X) Y - (-1)^|X| nabla_X (D Y)`` as a
``(1, 2)`` tensor, comparison of cocycle classes, scalar cocycles
``s_k = str(At^k)``, the Todd truncation, and the harness checking that a morphism
identifies the Atiyah cocycles of its source and target.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import typing as t

from sympy import QQ

from . import linalg
from . import signs
from .algebra import Element
from .config import Settings
from .config import default_settings
from .errors import HarnessError
from .errors import MorphismError
from .errors import NotMaterializableError
from .linalg import Matrix
from .modules import DgModule
from .modules import ModuleMap
from .modules import Section
from .morphism import LinftyMorphism
from .series import bernoulli
from .series import todd_polynomial
from .tensors import FibreConnection
from .tensors import Pushforward
from .tensors import TensorModule
from .tensors import VectorFieldModule
from .tensors import adapted_connection
from .tensors import form_module
from .tensors import tensor_module
from .tensors import wedge

logger = logging.getLogger(__name__)


class AffineConnection:
    """A connection on vector fields, given on frame elements:
    ``nabla_(e_a) e_b = table[a, b]``. It extends by
    ``nabla_(f X) Y = f nabla_X Y`` and
    ``nabla_X (g Y) = X(g) Y + (-1)^(|X||g|) g nabla_X Y``.

    :param vector_fields: The vector field module whose frame is used.
    :param table: Sections for frame pairs. Missing pairs are zero, which gives the
        flat connection of the frame.
    """

    def __init__(
        self,
        vector_fields: VectorFieldModule,
        table: t.Mapping[tuple[str, str], Section | t.Mapping[str, Element]]
        | None = None,
        name: str = "∇",
    ) -> None:
        self.vector_fields = vector_fields
        self.name = name
        self.table: dict[tuple[str, str], Section] = {}
        fibre = vector_fields.fibre

        for (a, b), value in (table or {}).items():
            if a not in fibre or b not in fibre:
                raise ValueError(f"unknown frame pair ({a}, {b})")

            coeffs = value.coeffs if isinstance(value, Section) else value
            section = Section(vector_fields, coeffs)

            if section and section.degree() != fibre.degree(a) + fibre.degree(b):
                raise ValueError(f"∇({a}, {b}) does not have degree |{a}| + |{b}|")

            if section:
                self.table[a, b] = section

    def __repr__(self) -> str:
        return f"AffineConnection({self.name}, {len(self.table)} symbols)"

    @classmethod
    def flat(cls, vector_fields: VectorFieldModule) -> AffineConnection:
        return cls(vector_fields, name="∇0")

    def symbol(self, a: str, b: str) -> Section:
        return self.table.get((a, b), self.vector_fields.zero)

    def covariant(self, x: Section, y: Section) -> Section:
        """``nabla_X Y``."""
        module = self.vector_fields
        frame = module.frame
        result = module.zero

        for a, f in x.coeffs.items():
            da = module.fibre.degree(a)

            for b, g in y.coeffs.items():
                derivative = frame[a](g)

                if derivative:
                    result = result + module.basis_section(b).scale(f * derivative)

                symbol = self.symbol(a, b)

                if symbol:
                    result = result + symbol.scale(f * g.twist(da))

        return result

    def shifted(self, tensor: Section) -> AffineConnection:
        """``nabla + A`` for a degree 0 ``(1, 2)`` tensor ``A``."""
        module = tensor_module(self.vector_fields, 1, 2)
        table: dict[tuple[str, str], Section] = dict(self.table)

        for a in module.inputs.fibre:
            for b in module.inputs.fibre:
                value = _value(module, tensor, a, b)

                if value:
                    table[a, b] = self.symbol(a, b) + value.relabel(self.vector_fields)

        return AffineConnection(self.vector_fields, table, name=f"{self.name}+A")

    def difference(self, other: AffineConnection) -> Section:
        """The tensor ``nabla - other``."""
        module = tensor_module(self.vector_fields, 1, 2)
        return module.reconstruct(
            lambda word: (self.symbol(*word) - other.symbol(*word)).relabel(
                module.output
            )
        )


def _value(module: TensorModule, tensor: Section, a: str, b: str) -> Section:
    inputs = module.inputs
    return module.evaluate(tensor, [inputs.basis_section(a), inputs.basis_section(b)])


def atiyah_value(connection: AffineConnection, x: Section, y: Section) -> Section:
    """``At(X, Y)`` from its defining formula, for homogeneous ``X``."""
    module = connection.vector_fields
    nabla = connection.covariant
    dx, dy = module.d(x), module.d(y)
    result = module.d(nabla(x, y)) - nabla(dx, y)
    last = nabla(x, dy)
    return result - last if signs.power(x.degree()) > 0 else result + last


@dataclasses.dataclass()
class AtiyahCocycle:
    connection: AffineConnection
    module: TensorModule
    tensor: Section
    checks: list[tuple[str, bool]] = dataclasses.field(default_factory=list)

    def value(self, x: Section, y: Section) -> Section:
        return self.module.evaluate(self.tensor, [x, y])

    @property
    def is_zero(self) -> bool:
        return not self.tensor

    def table(self) -> dict[str, str]:
        return cocycle_table(self.tensor)


def cocycle_table(section: Section) -> dict[str, str]:
    return {label: str(c) for label, c in sorted(section.coeffs.items())}


def atiyah_cocycle(
    connection: AffineConnection, functions: t.Sequence[Element] | None = None
) -> AtiyahCocycle:
    """Compute ``At`` on frame pairs and check that the formula is function
    bilinear against ``functions`` (every generator and base coordinate by default)
    and that ``L_Q At = 0``.

    :raises AssertionError: If either check fails.
    """
    vf = connection.vector_fields
    module = tensor_module(vf, 1, 2)
    tensor = module.reconstruct(
        lambda word: atiyah_value(
            connection, vf.basis_section(word[0]), vf.basis_section(word[1])
        ).relabel(module.output)
    )

    if functions is None:
        algebra = vf.algebra
        functions = [algebra.gen(i) for i in range(algebra.size)]
        functions += [algebra.coordinate(a) for a in range(algebra.ring.dimension)]

    bilinear = True

    for a in vf.fibre:
        for b in vf.fibre:
            x, y = vf.basis_section(a), vf.basis_section(b)

            for f in functions:
                for args in ((x.scale(f), y), (x, y.scale(f))):
                    direct = atiyah_value(connection, *args).relabel(module.output)

                    if direct != module.evaluate(tensor, list(args)):
                        bilinear = False

    checks = [("At is function bilinear", bilinear)]

    if tensor:
        checks.append(("At has degree 1", tensor.degree() == 1))

    closed = not module.d(tensor)
    checks.append(("L_Q At = 0", closed))
    agrees = module.lie_derivative(tensor) == module.d(tensor)
    checks.append(("L_Q agrees with [D, -]", agrees))
    failed = [name for name, ok in checks if not ok]

    if failed:
        raise AssertionError(f"Atiyah cocycle checks failed: {failed}")

    logger.info(
        "Atiyah cocycle of %s has %d entries", connection.name, len(tensor.coeffs)
    )
    return AtiyahCocycle(connection, module, tensor, checks)


@dataclasses.dataclass()
class ClassComparison:
    """Outcome of solving ``first - second = D h`` in a fixed degree.

    ``rank`` and ``augmented_rank`` are the ranks of ``D`` into that degree without
    and with the difference appended; they differ exactly when the classes are
    distinct.
    """

    cohomologous: bool
    degree: int
    witness: Section | None
    rank: int
    augmented_rank: int


def compare_classes(
    first: Section, second: Section, module: DgModule, degree: int | None = None
) -> ClassComparison:
    """Decide whether two cocycles of a module over a point base are cohomologous.

    :raises NotMaterializableError: Over an affine base.
    :raises ValueError: If the cocycles have different degrees or are not closed.
    """
    if not module.algebra.is_materializable():
        raise NotMaterializableError("cocycle classes over an affine base")

    found = {s.degree() for s in (first, second) if s}

    if degree is not None:
        found.add(degree)

    if len(found) > 1:
        raise ValueError(f"degree mismatch: {sorted(found)}")

    degree = found.pop() if found else 0
    first, second = first.relabel(module), second.relabel(module)

    for s in (first, second):
        if module.d(s):
            raise ValueError("comparison needs cocycles")

    difference = first - second
    matrix = module.differential(degree - 1)
    rank = linalg.rank(matrix)

    if not difference:
        return ClassComparison(True, degree, module.zero, rank, rank)

    rhs = module.vector(difference, degree)
    columns = [matrix.column(j) for j in range(matrix.ncols)] + [rhs]
    augmented = linalg.rank(Matrix.from_columns(matrix.nrows, columns))
    solution = linalg.solve(matrix, rhs)

    if solution is None:
        logger.info("classes in degree %d are distinct", degree)
        return ClassComparison(False, degree, None, rank, augmented)

    witness = module.from_vector(solution, degree - 1)

    if module.d(witness) != difference:
        raise AssertionError("witness does not bound the difference")

    return ClassComparison(True, degree, witness, rank, augmented)


def scalar_cocycle(cocycle: AtiyahCocycle, k: int) -> Section:
    """``s_k = str(At^k)``: on frame words the supertrace of the composite
    ``At(e_1) o ... o At(e_k)``, projected onto antisymmetric forms.
    """
    vf = cocycle.connection.vector_fields
    forms = form_module(vf, k)
    module = cocycle.module

    def values(word: tuple[str, ...]) -> Section:
        total = vf.algebra.zero

        for b in vf.fibre:
            current = vf.basis_section(b)

            for e in reversed(word):
                current = module.evaluate(
                    cocycle.tensor, [vf.basis_section(e), current]
                ).relabel(vf)

            c = current.coefficient(b)

            if c:
                total = total + c * signs.supertrace_sign(vf.fibre.degree(b))

        return forms.output.section({"1": total} if total else {})

    raw = forms.reconstruct(values)
    return forms.symmetrize(raw, antisymmetric=True)


@dataclasses.dataclass()
class ToddTruncation:
    """Scalar cocycles and the Todd class ``exp(-sum_k B_k / (k k!) s_k)`` up to
    weight ``order``. ``pieces[j]`` is the weight ``j`` piece as a ``j``-form and
    ``root[j]`` the one of the square root ``exp(-sum_k B_k / (2 k k!) s_k)``.
    ``vanishing`` names every scalar cocycle and piece that is identically zero.
    """

    order: int
    bernoulli: tuple[t.Any, ...]
    scalars: dict[int, Section]
    pieces: dict[int, Section]
    root: dict[int, Section]
    characteristic: dict[int, dict[str, t.Any]]
    form_degrees: dict[int, int]
    vanishing: list[str]
    checks: list[tuple[str, bool]] = dataclasses.field(default_factory=list)

    @property
    def is_trivial(self) -> bool:
        """``Td = 1``."""
        return all(not piece for j, piece in self.pieces.items() if j)


def _todd_pieces(
    vf: VectorFieldModule,
    scalars: t.Mapping[int, Section],
    order: int,
    scale: t.Any = 1,
) -> dict[int, Section]:
    """Multiply out the weight pieces of the Todd polynomial with :func:`.wedge`."""
    _, weights = todd_polynomial(order, scale)
    unit = form_module(vf, 0).basis_section("1")
    pieces: dict[int, Section] = {0: unit}
    modules: dict[int, TensorModule] = {}

    for j in range(1, order + 1):
        modules[j] = forms = form_module(vf, j)
        piece = forms.zero

        for monom, coeff in weights[j].terms():
            if any(e and not scalars[k + 1] for k, e in enumerate(monom)):
                continue

            product, arity = unit, 0

            for k, e in enumerate(monom):
                for _ in range(e):
                    arity += k + 1
                    product = wedge(product, scalars[k + 1], modules.get(arity))

            piece = piece + product.relabel(forms).scale(coeff)

        pieces[j] = piece

    return pieces


def assemble_todd(
    vf: VectorFieldModule, scalars: t.Mapping[int, Section], order: int
) -> ToddTruncation:
    """The Todd truncation from scalar cocycles ``s_1..s_order``, given as closed
    forms on ``vf``. Checks that each ``s_k`` and each piece is closed.

    :raises AssertionError: If a closure check fails.
    """
    if order < 1:
        raise ValueError("order must be at least 1")

    missing = [k for k in range(1, order + 1) if k not in scalars]

    if missing:
        raise ValueError(f"missing scalar cocycles {missing}")

    checks: list[tuple[str, bool]] = []
    vanishing: list[str] = []
    form_degrees: dict[int, int] = {}
    scalars = {k: scalars[k] for k in range(1, order + 1)}

    for k, s in scalars.items():
        forms = form_module(vf, k)
        checks.append((f"s{k} is closed", not forms.d(s)))

        if s:
            form_degrees[k] = forms.form_degree(s)
        else:
            vanishing.append(f"s{k}")

    pieces = _todd_pieces(vf, scalars, order)
    root = _todd_pieces(vf, scalars, order, QQ(1, 2))

    for j in range(1, order + 1):
        piece = pieces[j]
        checks.append((f"Td{j} is closed", not piece.module.d(piece)))

        if not piece:
            vanishing.append(f"Td{j}")

    failed = [name for name, ok in checks if not ok]

    if failed:
        raise AssertionError(f"scalar cocycle checks failed: {failed}")

    characteristic = {
        k: {
            "factor": QQ(1, math.factorial(k)),
            "tag": f"(i/2π)^{k}",
            "cocycle": s,
        }
        for k, s in scalars.items()
    }
    logger.info(
        "Todd truncation to order %d: %d vanishing pieces", order, len(vanishing)
    )
    return ToddTruncation(
        order,
        bernoulli(order),
        scalars,
        pieces,
        root,
        characteristic,
        form_degrees,
        vanishing,
        checks,
    )


def todd_truncation(
    cocycle: AtiyahCocycle,
    order: int | None = None,
    *,
    settings: Settings = default_settings,
) -> ToddTruncation:
    """Scalar cocycles ``s_1..s_K`` of the Atiyah cocycle, the characteristic
    cocycles ``c_k = (1/k!) (i/2pi)^k s_k`` and the Todd pieces.

    In positive amplitude every coefficient of ``s_k`` would have degree at least
    ``k``, so the scalar cocycles vanish and the truncation is ``1``.
    """
    if order is None:
        order = settings.todd_order

    if order < 1:
        raise ValueError("order must be at least 1")

    scalars = {k: scalar_cocycle(cocycle, k) for k in range(1, order + 1)}
    return assemble_todd(cocycle.connection.vector_fields, scalars, order)


@dataclasses.dataclass()
class InvarianceCertificate:
    """Both sides of ``alpha(At^M) = beta(At^N)`` and of the scalar analogues."""

    source_connection: AffineConnection
    target_connection: AffineConnection
    source: AtiyahCocycle
    target: AtiyahCocycle
    alpha: Section
    beta: Section
    scalar_sides: dict[int, tuple[Section, Section]]
    checks: list[tuple[str, bool]]
    first_difference: str | None = None

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)


def invariance_harness(
    morphism: LinftyMorphism,
    target_connection: AffineConnection | None = None,
    *,
    splitting: ModuleMap | None = None,
    order: int | None = None,
    settings: Settings = default_settings,
) -> InvarianceCertificate:
    """Build a connection on the source compatible with ``target_connection`` and
    check that the morphism identifies the two Atiyah cocycles.

    With ``sigma`` a right inverse of ``Psi_*`` and ``pi = id - sigma Psi_*`` the
    projection onto the kernel, the source connection is
    ``nabla_X Y = pi(nabla0_X (pi Y)) + sigma(pullback nabla_X (Psi_* Y))`` where
    ``nabla0`` is the flat connection of the frame. ``sigma`` is computed when
    ``Psi_*`` has constant coefficients; otherwise pass ``splitting``.

    :raises HarnessError: If no splitting is available.
    """
    if order is None:
        order = settings.todd_order

    try:
        fibre_connection = adapted_connection(morphism)
    except MorphismError:
        if splitting is None:
            raise HarnessError("φ₁ is not constant; supply a splitting") from None

        fibre_connection = FibreConnection(morphism.source)

    if target_connection is None:
        target_connection = AffineConnection.flat(VectorFieldModule(morphism.target))

    source_vf = (
        splitting.target
        if isinstance(splitting, ModuleMap)
        and isinstance(splitting.target, VectorFieldModule)
        else VectorFieldModule(morphism.source, fibre_connection)
    )
    push = Pushforward(morphism, source_vf, target_connection.vector_fields)
    psi_star = push.pushforward()
    sigma = splitting if splitting is not None else _constant_splitting(push, psi_star)
    sigma = ModuleMap(push.pulled, source_vf, sigma.images, name="σ")

    if not all(
        psi_star(sigma.image(z)).coeffs == push.pulled.basis_section(z).coeffs
        for z in push.pulled.fibre
    ):
        raise HarnessError("splitting is not a right inverse of Ψ_*")

    connection = _source_connection(push, psi_star, sigma, target_connection)
    source = atiyah_cocycle(connection)
    target = atiyah_cocycle(target_connection)
    alpha = push.alpha(1, 2)(source.tensor)
    beta = push.beta(1, 2)(target.tensor)
    checks = [("α(At^M) = β(At^N)", alpha.coeffs == beta.coeffs)]
    first = _first_difference(alpha, beta)
    scalar_sides: dict[int, tuple[Section, Section]] = {}

    for k in range(1, order + 1):
        left = push.alpha(0, k)(scalar_cocycle(source, k))
        right = push.beta(0, k)(scalar_cocycle(target, k))
        scalar_sides[k] = (left, right)
        checks.append((f"α(s{k}^M) = β(s{k}^N)", left.coeffs == right.coeffs))

    certificate = InvarianceCertificate(
        connection,
        target_connection,
        source,
        target,
        alpha,
        beta,
        scalar_sides,
        checks,
        first,
    )
    logger.info("invariance harness: %s", "holds" if certificate.passed else "fails")
    return certificate


def _constant_splitting(push: Pushforward, psi_star: ModuleMap) -> ModuleMap:
    source, target = push.source, push.pulled
    ring = source.algebra.ring
    images: dict[str, Section] = {}

    for k in target.fibre.degrees:
        rows = target.fibre.labels(k)
        cols = source.fibre.labels(k)
        index = {z: r for r, z in enumerate(rows)}
        columns = []

        for e in cols:
            column = {}

            for z, c in psi_star.image(e).coeffs.items():
                constant = c.is_scalar() and ring.is_constant(c.constant)

                if not constant or z not in index:
                    raise HarnessError("Ψ_* is not constant; supply a splitting")

                column[index[z]] = ring.constant(c.constant)

            columns.append(column)

        matrix = Matrix.from_columns(len(rows), columns)

        if linalg.rank(matrix) != len(rows):
            raise HarnessError(f"Ψ_* is not surjective in degree {k}")

        inverse = linalg.right_inverse(matrix)

        for r, z in enumerate(rows):
            vector = {cols[c]: inverse[c, r] for c in range(len(cols)) if inverse[c, r]}
            images[z] = source.constant_section(vector)

    return ModuleMap(target, source, images, name="σ")


def _source_connection(
    push: Pushforward,
    psi_star: ModuleMap,
    sigma: ModuleMap,
    target_connection: AffineConnection,
) -> AffineConnection:
    vf = push.source
    flat = AffineConnection.flat(vf)

    def project(y: Section) -> Section:
        return y - sigma(psi_star(y))

    table: dict[tuple[str, str], Section] = {}

    for a in vf.fibre:
        x = vf.basis_section(a)

        for b in vf.fibre:
            y = vf.basis_section(b)
            kernel_part = project(flat.covariant(x, project(y)))
            pulled = _pulled_covariant(push, target_connection, a, psi_star(y))
            value = kernel_part + sigma(pulled)

            if value:
                table[a, b] = value

    return AffineConnection(vf, table, name="∇^M")


def _pulled_covariant(
    push: Pushforward, connection: AffineConnection, a: str, section: Section
) -> Section:
    """The pullback connection along the frame element ``a`` of the source:
    ``nabla_a (g Z) = a(g) Z + (-1)^(|a||g|) g Psi*(nabla^N_(Psi_* a) Z)``.
    """
    vf = push.source
    pulled = push.pulled
    derivation = vf.frame[a]
    da = vf.fibre.degree(a)
    direction = push.apply(derivation)
    result = pulled.zero

    for z, g in section.coeffs.items():
        derivative = derivation(g)

        if derivative:
            result = result + pulled.basis_section(z).scale(derivative)

        inner = pulled.zero

        for w, h in direction.coeffs.items():
            symbol = connection.symbol(w, z)

            if symbol:
                coeffs = {e: push.psi(c) for e, c in symbol.coeffs.items()}
                moved = Section(pulled, coeffs)
                inner = inner + moved.scale(h)

        if inner:
            result = result + inner.scale(g.twist(da))

    return result


def _first_difference(left: Section, right: Section) -> str | None:
    for label in sorted(set(left.coeffs) | set(right.coeffs)):
        a = left.coefficient(label)
        b = right.coefficient(label)

        if a != b:
            return f"{label}: {a} != {b}"

    return None
