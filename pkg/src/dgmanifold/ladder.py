"""Decomposition of the kernel complex of an acyclic linear fibration into a ladder
of intermediate complexes ``E(b), ..., E(1)``, each the direct sum of the previous
one and an acyclic factor ``F(n)`` after conjugation by an automorphism.

Write ``K^i`` for the part of the kernel fibre in degree ``i`` and ``d_ij`` for the
block of the kernel differential from ``K^j`` to ``K^i``. The sub-diagonal blocks
``lambda_i = -d_(i+1,i)`` must be constant. The sequence ``K^0 -> ... -> K^b`` is
split by ``delta_(b-1) = lambda_(b-1)`` and
``delta_r = lambda_r - eta_(r+1) lambda_(r+1) lambda_r``, with ``eta_r`` splitting
``delta_r`` on ``ker delta_(r+1)``. Then ``kappa^n = ker delta_n`` and
``E(n) = functions (x) (K^0 + ... + K^(n-1) + kappa^n)``.
"""

from __future__ import annotations

import dataclasses
import logging
import typing as t

from . import linalg
from .config import Settings
from .config import default_settings
from .contraction import ContractionData
from .contraction import check_exact
from .contraction import splitting
from .errors import LadderError
from .graded import GradedVectorSpace
from .graded import cohomology_dimensions
from .graded import shift_label
from .linalg import Matrix
from .modules import DgModule
from .modules import ModuleMap
from .modules import Section
from .morphism import LinftyMorphism
from .tensors import Pushforward
from .tensors import VectorFieldModule
from .tensors import adapted_connection
from .tensors import kernel_complex

logger = logging.getLogger(__name__)

Check = tuple[str, bool]


@dataclasses.dataclass()
class LadderStage:
    """One rung ``E(n)`` of the ladder.

    ``automorphism`` is ``alpha = id - sum_j alpha_(n-1,j)`` with
    ``alpha_(n-1,j) = eta_(n-1) d_nj``, and ``conjugated`` carries the differential
    ``alpha D(n) alpha^-1`` on the same fibre.
    """

    n: int
    module: DgModule
    kappa: dict[str, dict[str, t.Any]]
    automorphism: ModuleMap
    inverse: ModuleMap
    conjugated: DgModule
    previous: DgModule | None
    lowering: Matrix
    """``eta_(n-1): K^n -> K^(n-1)``."""
    previous_kappa: dict[str, dict[str, t.Any]]
    lower_labels: tuple[str, ...]
    upper_labels: tuple[str, ...]
    checks: list[Check] = dataclasses.field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)


@dataclasses.dataclass()
class AcyclicFactor:
    """``F(n) = functions (x) (kappa^n[1] + kappa^n)`` with
    ``D(k[1]) = -k``, so ``D(c k[1]) = Q(c) k[1] + (-1)^(|c|+1) c k``.
    """

    n: int
    module: DgModule
    homotopy: ModuleMap
    identification: ModuleMap
    cohomology: dict[int, int] | None
    checks: list[Check] = dataclasses.field(default_factory=list)

    @property
    def is_zero(self) -> bool:
        return not len(self.module.fibre)

    @property
    def acyclic(self) -> bool:
        if self.cohomology is None:
            return self.passed

        return not any(self.cohomology.values())

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)


@dataclasses.dataclass()
class Ladder:
    kernel: DgModule
    amplitude: int
    contraction: ContractionData
    stages: dict[int, LadderStage]
    checks: list[Check] = dataclasses.field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks) and all(
            s.passed for s in self.stages.values()
        )


def build_ladder(
    morphism: LinftyMorphism, *, connection: t.Any | None = None
) -> Ladder:
    """Build the ladder for the kernel of ``Psi_*`` of a linear fibration. Vector
    fields on the source use the adapted connection unless one is given.

    :raises NotExactError: If the kernel sequence is not exact.
    :raises LadderError: If a sub-diagonal block is not constant.
    """
    if connection is None:
        connection = adapted_connection(morphism)

    source = VectorFieldModule(morphism.source, connection)
    kernel, _ = kernel_complex(Pushforward(morphism, source))
    return ladder_of_kernel(kernel, morphism.source.amplitude)


def ladder_of_kernel(kernel: DgModule, amplitude: int) -> Ladder:
    """Build every stage of the ladder for a triangular kernel module supported in
    fibre degrees ``0..amplitude``.
    """
    b = amplitude

    if b < 1:
        raise LadderError(f"amplitude must be positive: {b}")

    if any(k < 0 or k > b for k in kernel.fibre.degrees):
        raise LadderError("kernel fibre is not supported in degrees 0..b")

    if not kernel.is_triangular():
        raise LadderError("kernel differential is not triangular")

    layers = [kernel.fibre.labels(i) for i in range(b + 1)]
    lambdas = [-_block(kernel, layers[i], layers[i + 1]) for i in range(b)]
    contraction = _split(lambdas, [len(layer) for layer in layers])
    checks: list[Check] = []

    for i in range(b):
        eta, delta = contraction.etas[i], contraction.deltas[i]
        checks.append((f"η{i}∘δ{i}=η{i}∘λ{i}", eta @ delta == eta @ lambdas[i]))
        checks.append((f"δ{i}∘η{i}∘δ{i}=δ{i}", delta @ eta @ delta == delta))

    checks.extend(contraction.identities())
    kappas = {n: _kappa(contraction, layers, n, b) for n in range(1, b + 1)}
    stages: dict[int, LadderStage] = {}
    modules: dict[int, DgModule] = {}

    for n in range(b, 0, -1):
        modules[n] = _stage_module(kernel, layers, contraction, kappas[n], n)

    for n in range(b, 0, -1):
        stages[n] = _stage(kernel, layers, contraction, kappas, modules, n)

    top = modules[b]
    same = all(top.n(e).coeffs == kernel.n(e).coeffs for e in kernel.fibre)
    same = same and set(top.labels) == set(kernel.labels)
    checks.append(("E(b) is the kernel complex", same))
    ladder = Ladder(kernel, b, contraction, stages, checks)
    logger.info(
        "built ladder with %d stages, identities %s",
        len(stages),
        "hold" if ladder.passed else "fail",
    )
    return ladder


def extract_acyclic_factor(
    stage: LadderStage,
    *,
    window: tuple[int, int] | None = None,
    settings: Settings = default_settings,
) -> AcyclicFactor:
    """The factor ``F(n)`` split off at ``stage``, with its contracting homotopy
    ``h(k) = -k[1]`` and the chain isomorphism ``E(n-1) + F(n) -> (E(n), alpha D
    alpha^-1)``. Cohomology is computed on the window over a point base.
    """
    n = stage.n
    module = stage.module
    degrees: dict[str, int] = {}

    for k in stage.kappa:
        degrees[shift_label(k, 1)] = n - 1
        degrees[k] = n

    factor = DgModule(
        module.algebra,
        module.q,
        GradedVectorSpace.from_labels(degrees),
        {shift_label(k, 1): {k: -module.algebra.one} for k in stage.kappa},
        name=f"F({n})",
    )
    homotopy = ModuleMap(
        factor,
        factor,
        {k: -factor.basis_section(shift_label(k, 1)) for k in stage.kappa},
        degree=-1,
        name="h",
    )
    checks: list[Check] = [("D(n) of F(n) squares to zero", factor.square_is_zero())]
    ok = all(
        factor.d(homotopy(factor.basis_section(e))) + homotopy(factor.n(e))
        == factor.basis_section(e)
        for e in factor.fibre
    )
    checks.append(("D∘h+h∘D=id on F(n)", ok))
    zero = all(not homotopy(homotopy(factor.basis_section(e))) for e in factor.fibre)
    checks.append(("h∘h=0 on F(n)", zero))

    identification = _identification(stage, factor)
    checks.append(("E(n-1)⊕F(n)→E(n) is a chain map", identification.is_chain_map()))
    checks.append(("E(n-1)⊕F(n)→E(n) is bijective", _is_bijective(identification)))
    cohomology = None

    if module.algebra.is_materializable():
        if window is None:
            window = settings.window(n)

        cohomology = cohomology_dimensions(factor, window)
        acyclic = not any(cohomology.values())
        checks.append((f"F({n}) acyclic on {list(window)}", acyclic))

    result = AcyclicFactor(n, factor, homotopy, identification, cohomology, checks)
    logger.info("factor F(%d) of rank %d: %s", n, len(stage.kappa), result.passed)
    return result


def certify_ladder(
    ladder: Ladder,
    *,
    window: tuple[int, int] | None = None,
    settings: Settings = default_settings,
) -> dict[str, t.Any]:
    """Run every check of the ladder and its factors, returning a table of named
    identities with their outcome, per stage.
    """
    if window is None:
        window = settings.window(ladder.amplitude)

    stages = []
    passed = ladder.passed

    for n in sorted(ladder.stages, reverse=True):
        stage = ladder.stages[n]
        factor = extract_acyclic_factor(stage, window=window)
        passed = passed and factor.passed
        stages.append(
            {
                "n": n,
                "kappa_rank": len(stage.kappa),
                "automorphism_trivial": _is_identity(stage.automorphism),
                "identities": _table(stage.checks + factor.checks),
                "factor_cohomology": None
                if factor.cohomology is None
                else {str(k): v for k, v in sorted(factor.cohomology.items())},
            }
        )

    kernel_checks = list(ladder.checks)

    if ladder.kernel.algebra.is_materializable():
        dims = cohomology_dimensions(ladder.kernel, window)
        ok = not any(dims.values())
        kernel_checks.append((f"kernel complex acyclic on {list(window)}", ok))
        passed = passed and ok

    return {
        "amplitude": ladder.amplitude,
        "window": list(window),
        "identities": _table(kernel_checks),
        "stages": stages,
        "passed": passed,
    }


def _table(checks: t.Iterable[Check]) -> list[dict[str, t.Any]]:
    return [{"name": name, "passed": ok} for name, ok in checks]


def _block(
    kernel: DgModule, sources: t.Sequence[str], targets: t.Sequence[str]
) -> Matrix:
    ring = kernel.algebra.ring
    rows: list[list[t.Any]] = [[ring.zero] * len(sources) for _ in targets]
    index = {e: r for r, e in enumerate(targets)}

    for c, e in enumerate(sources):
        for label, coeff in kernel.n(e).coeffs.items():
            if label not in index:
                continue

            value = coeff.constant

            if not coeff.is_scalar() or not ring.is_constant(value):
                raise LadderError(f"sub-diagonal kernel block is not constant: D({e})")

            rows[index[label]][c] = ring.constant(value)

    return Matrix.from_dense(rows, len(sources))


def _split(lambdas: list[Matrix], dims: list[int]) -> ContractionData:
    b = len(lambdas)
    deltas: list[Matrix] = [Matrix.zeros(0, 0)] * b
    etas: list[Matrix] = [Matrix.zeros(0, 0)] * b

    for r in reversed(range(b)):
        if r == b - 1:
            deltas[r] = lambdas[r]
            projector = Matrix.identity(dims[r + 1])
        else:
            deltas[r] = lambdas[r] - etas[r + 1] @ lambdas[r + 1] @ lambdas[r]
            projector = Matrix.identity(dims[r + 1]) - etas[r + 1] @ deltas[r + 1]

        etas[r] = splitting(deltas[r]) @ projector

    try:
        check_exact(dims, deltas)
    except ValueError as e:
        raise LadderError(f"corrected kernel sequence is not a complex: {e}") from None

    return ContractionData(dims, deltas, etas)


def _kappa(
    contraction: ContractionData,
    layers: list[tuple[str, ...]],
    n: int,
    b: int,
) -> dict[str, dict[str, t.Any]]:
    labels = layers[n]

    if n == b:
        return {e: {e: 1} for e in labels}

    vectors = linalg.nullspace(contraction.deltas[n])
    return {
        f"κ{n}.{m + 1}": {labels[i]: v for i, v in vector.items()}
        for m, vector in enumerate(vectors)
    }


def _apply(
    matrix: Matrix,
    coeffs: t.Mapping[str, t.Any],
    sources: t.Sequence[str],
    targets: t.Sequence[str],
    twist: bool = False,
) -> dict[str, t.Any]:
    """Apply a constant matrix to a coefficient vector of sections. With ``twist``
    the matrix has odd degree and moves past each coefficient.
    """
    index = {e: i for i, e in enumerate(sources)}
    out: dict[str, t.Any] = {}

    for e, c in coeffs.items():
        if twist:
            c = c.twist()

        for r, target in enumerate(targets):
            entry = matrix[r, index[e]]

            if entry:
                out[target] = out[target] + c * entry if target in out else c * entry

    return {e: c for e, c in out.items() if c}


def _stage_module(
    kernel: DgModule,
    layers: list[tuple[str, ...]],
    contraction: ContractionData,
    kappa: dict[str, dict[str, t.Any]],
    n: int,
) -> DgModule:
    fibre = kernel.fibre
    degrees = {e: fibre.degree(e) for e in fibre if fibre.degree(e) < n}
    degrees.update({k: n for k in kappa})
    upper = layers[n]
    names = list(kappa)
    w = _columns(kappa, upper)
    left = linalg.left_inverse(w) if names else Matrix.zeros(0, len(upper))
    projector = contraction.projector(n)
    differential: dict[str, dict[str, t.Any]] = {}

    for e in degrees:
        if e in kappa:
            continue

        image = kernel.n(e).coeffs
        keep = {k: c for k, c in image.items() if fibre.degree(k) < n}
        top = {k: c for k, c in image.items() if fibre.degree(k) == n}

        if top:
            projected = _apply(projector, top, upper, upper)
            coords = _apply(left, projected, upper, names)

            if _apply(w, coords, names, upper) != projected:
                raise LadderError(f"projected block leaves κ{n}: D({e})")

            keep.update(coords)

        differential[e] = keep

    return DgModule(
        kernel.algebra,
        kernel.q,
        GradedVectorSpace.from_labels(degrees),
        differential,
        name=f"E({n})",
    )


def _columns(
    vectors: t.Mapping[str, t.Mapping[str, t.Any]], labels: t.Sequence[str]
) -> Matrix:
    index = {e: i for i, e in enumerate(labels)}
    return Matrix.from_columns(
        len(labels),
        [{index[e]: v for e, v in vector.items()} for vector in vectors.values()],
    )


def _stage(
    kernel: DgModule,
    layers: list[tuple[str, ...]],
    contraction: ContractionData,
    kappas: dict[int, dict[str, dict[str, t.Any]]],
    modules: dict[int, DgModule],
    n: int,
) -> LadderStage:
    module = modules[n]
    previous = modules.get(n - 1)
    fibre = kernel.fibre
    lower, upper = layers[n - 1], layers[n]
    eta = contraction.etas[n - 1]
    checks: list[Check] = [(f"D({n})∘D({n})=0", module.square_is_zero())]
    rhs = contraction.deltas[n - 1] @ eta
    checks.append(
        (f"id-η{n}∘δ{n}=δ{n - 1}∘η{n - 1}", contraction.projector(n) == rhs)
    )
    forward: dict[str, Section] = {}
    backward: dict[str, Section] = {}

    for e in module.fibre:
        unit = module.basis_section(e)

        if e in kappas[n] or fibre.degree(e) > n - 2:
            forward[e] = backward[e] = unit
            continue

        top = {k: c for k, c in kernel.n(e).coeffs.items() if fibre.degree(k) == n}
        correction = Section(module, _apply(eta, top, upper, lower, twist=True))
        forward[e] = unit - correction
        backward[e] = unit + correction

    automorphism = ModuleMap(module, module, forward, name="α")
    inverse = ModuleMap(module, module, backward, name="α⁻¹")
    checks.append(("α∘α⁻¹=id", _is_identity(automorphism @ inverse)))
    checks.append(("α⁻¹∘α=id", _is_identity(inverse @ automorphism)))
    conjugated = DgModule(module.algebra, module.q, module.fibre, name=f"E({n})^α")
    conjugated._n = {
        e: automorphism(module.d(inverse(module.basis_section(e)))).relabel(conjugated)
        for e in module.fibre
    }

    if previous is not None:
        inclusion = _inclusion(previous, conjugated, kappas[n - 1])
        checks.append(
            (f"α D({n}) α⁻¹ restricts to D({n - 1})", inclusion.is_chain_map())
        )

    return LadderStage(
        n,
        module,
        kappas[n],
        automorphism,
        inverse,
        conjugated,
        previous,
        eta,
        kappas.get(n - 1, {}),
        lower,
        upper,
        checks,
    )


def _inclusion(
    previous: DgModule,
    target: DgModule,
    kappa: t.Mapping[str, t.Mapping[str, t.Any]],
) -> ModuleMap:
    images = {}

    for e in previous.fibre:
        if e in kappa:
            images[e] = target.constant_section(kappa[e])
        else:
            images[e] = target.basis_section(e)

    return ModuleMap(previous, target, images, name="E(n-1)→E(n)")


def _identification(stage: LadderStage, factor: DgModule) -> ModuleMap:
    target = stage.conjugated
    previous = stage.previous
    source = factor if previous is None else previous.direct_sum(factor)
    images: dict[str, Section] = {}

    if previous is not None:
        inclusion = _inclusion(previous, target, stage.previous_kappa)
        images.update(inclusion.images)

    for k, vector in stage.kappa.items():
        coeffs = {e: target.algebra.scalar(v) for e, v in vector.items()}
        lowered = _apply(stage.lowering, coeffs, stage.upper_labels, stage.lower_labels)
        images[shift_label(k, 1)] = Section(target, lowered)
        images[k] = target.basis_section(k)

    return ModuleMap(source, target, images, name="Θ")


def _is_bijective(f: ModuleMap) -> bool:
    source, target = f.source.fibre, f.target.fibre

    if len(source) != len(target):
        return False

    rows = {e: i for i, e in enumerate(target)}
    columns = []

    for e in source:
        column = {}

        for label, c in f.image(e).coeffs.items():
            if not c.is_scalar() or not c.algebra.ring.is_constant(c.constant):
                return False

            column[rows[label]] = c.algebra.ring.constant(c.constant)

        columns.append(column)

    return linalg.rank(Matrix.from_columns(len(target), columns)) == len(target)


def _is_identity(f: ModuleMap) -> bool:
    return all(f.image(e) == f.source.basis_section(e) for e in f.source.fibre)
