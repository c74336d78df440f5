"""One function per command. Each takes a parsed document and returns a JSON ready
report body with a ``passed`` flag; :func:`run` adds the command name and status.
"""

from __future__ import annotations

import logging
import typing as t

from .atiyah import atiyah_cocycle
from .atiyah import cocycle_table
from .atiyah import compare_classes
from .atiyah import invariance_harness
from .atiyah import todd_truncation
from .bundle import StructureReport
from .bundle import tangent_complex_at
from .bundle import validate_structure
from .config import Settings
from .config import default_settings
from .document import Document
from .errors import DgManifoldError
from .errors import MorphismError
from .graded import cohomology_dimensions
from .hochschild import hkr_check
from .hochschild import windowed_hh
from .ladder import build_ladder
from .ladder import certify_ladder
from .modules import DgModule
from .modules import function_module
from .morphism import LinftyMorphism
from .morphism import check_classical
from .morphism import classify_morphism
from .scalars import format_rational
from .tensors import Pushforward
from .tensors import VectorFieldModule
from .tensors import adapted_connection
from .tensors import form_module
from .tensors import kernel_complex
from .tensors import tensor_module

logger = logging.getLogger(__name__)

Window = t.Optional[t.Tuple[int, int]]
Body = t.Dict[str, t.Any]


class Command(t.Protocol):
    def __call__(
        self, document: Document, *, settings: Settings, window: Window
    ) -> Body: ...


def _relations(report: StructureReport) -> list[dict[str, t.Any]]:
    return [
        {"name": r.name, "passed": r.passed, "detail": r.detail}
        for r in report.relations
    ]


def _identities(checks: t.Iterable[tuple[str, bool]]) -> list[dict[str, t.Any]]:
    return [{"name": name, "passed": ok} for name, ok in checks]


def _dims(dims: t.Mapping[int, int]) -> dict[str, int]:
    return {str(k): v for k, v in sorted(dims.items())}


def _window(
    document: Document, window: Window, settings: Settings
) -> tuple[int, int]:
    if window is None:
        return settings.window(document.bundle.amplitude)

    return window


def _morphism(document: Document) -> LinftyMorphism:
    if document.morphism is None:
        raise MorphismError("the document has no morphism")

    return document.morphism


def validate(document: Document, *, settings: Settings, window: Window) -> Body:
    """Structure relations of the bundle, the target and the morphism."""
    body: Body = {"bundle": _relations(validate_structure(document.bundle))}
    passed = all(r["passed"] for r in body["bundle"])

    if document.target is not None:
        body["target"] = _relations(validate_structure(document.target))
        passed = passed and all(r["passed"] for r in body["target"])

    if document.morphism is not None:
        body["morphism"] = _relations(document.morphism.validate())
        passed = passed and all(r["passed"] for r in body["morphism"])

    body["passed"] = passed
    return body


def tangent_complex(document: Document, *, settings: Settings, window: Window) -> Body:
    """Dimensions and cohomology of the tangent complex at each supplied point. A
    point base uses the point itself.
    """
    bundle = document.bundle
    points = document.points() or ([()] if bundle.ring.is_point else [])
    check_classical(bundle, points)
    out = []

    for p in points:
        complex = tangent_complex_at(bundle, p)
        span = (0, bundle.amplitude)
        dims = {str(k): len(complex.basis(k)) for k in range(span[1] + 1)}
        out.append(
            {
                "point": [format_rational(v) for v in p],
                "dimensions": dims,
                "cohomology": _dims(cohomology_dimensions(complex, span)),
            }
        )

    return {"points": out, "passed": True}


def classify(document: Document, *, settings: Settings, window: Window) -> Body:
    result = classify_morphism(
        _morphism(document),
        document.points(),
        document.points("target_points"),
        document.correspondence(),
    )
    return {
        "checks": [
            {"name": c.name, "passed": c.passed, "detail": c.detail, "scope": c.scope}
            for c in result.checks
        ],
        "is_fibration": result.is_fibration,
        "is_linear": result.is_linear,
        "is_weak_equivalence": result.is_weak_equivalence,
        "is_acyclic_linear_fibration": result.is_acyclic_linear_fibration,
        "scope": result.scope,
        "passed": result.passed,
    }


def _module(document: Document) -> DgModule:
    bundle = document.bundle
    kind = document.params.get("complex", "functions")

    if kind == "functions":
        return function_module(bundle.algebra, bundle.q)

    vector_fields = document.vector_fields()

    if kind == "vector-fields":
        return vector_fields

    if kind == "forms":
        return form_module(vector_fields, document.params.get("arity", 1))

    p, q = document.params.get("tensor", [1, 2])
    return tensor_module(vector_fields, p, q)


def cohomology(document: Document, *, settings: Settings, window: Window) -> Body:
    """Cohomology dimensions of the chosen complex on the window."""
    window = _window(document, window, settings)
    module = _module(document)
    dims = cohomology_dimensions(module, window)
    return {
        "complex": module.name,
        "window": list(window),
        "cohomology": _dims(dims),
        "acyclic": not any(dims.values()),
        "passed": True,
    }


def kernel_acyclicity(
    document: Document, *, settings: Settings, window: Window
) -> Body:
    """Acyclicity of ``ker Psi_*`` and of the cone of ``Psi_*`` on the window."""
    window = _window(document, window, settings)
    morphism = _morphism(document)
    target = document.target
    assert target is not None
    target_connection = document.fibre_connection("target_connection", target)
    source_connection = adapted_connection(morphism, target_connection)
    push = Pushforward(
        morphism,
        VectorFieldModule(morphism.source, source_connection),
        VectorFieldModule(target, target_connection),
    )
    kernel, inclusion = kernel_complex(push)
    psi = push.pushforward()
    kernel_dims = cohomology_dimensions(kernel, window)
    cone_dims = cohomology_dimensions(psi.target.cone(psi), window)
    checks = [
        ("inclusion is a chain map", inclusion.is_chain_map()),
        ("Ψ_* is a chain map", psi.is_chain_map()),
        ("ker Ψ_* is acyclic", not any(kernel_dims.values())),
        ("cone(Ψ_*) is acyclic", not any(cone_dims.values())),
    ]
    return {
        "window": list(window),
        "kernel_rank": len(kernel.labels),
        "kernel_cohomology": _dims(kernel_dims),
        "cone_cohomology": _dims(cone_dims),
        "identities": _identities(checks),
        "passed": all(ok for _, ok in checks),
    }


def ladder(document: Document, *, settings: Settings, window: Window) -> Body:
    morphism = _morphism(document)
    result = build_ladder(morphism)
    return certify_ladder(
        result, window=_window(document, window, settings), settings=settings
    )


def atiyah(document: Document, *, settings: Settings, window: Window) -> Body:
    cocycle = atiyah_cocycle(document.affine_connection())
    return {
        "connection": cocycle.connection.name,
        "cocycle": cocycle.table(),
        "is_zero": cocycle.is_zero,
        "identities": _identities(cocycle.checks),
        "passed": all(ok for _, ok in cocycle.checks),
    }


def compare(document: Document, *, settings: Settings, window: Window) -> Body:
    """Compare the Atiyah classes of ``connection`` and ``other_connection``."""
    vector_fields = document.vector_fields()
    first = atiyah_cocycle(document.affine_connection(vector_fields=vector_fields))
    second = atiyah_cocycle(
        document.affine_connection("other_connection", vector_fields=vector_fields)
    )
    result = compare_classes(first.tensor, second.tensor, first.module)
    return {
        "cohomologous": result.cohomologous,
        "degree": result.degree,
        "rank": result.rank,
        "augmented_rank": result.augmented_rank,
        "witness": None if result.witness is None else cocycle_table(result.witness),
        "passed": result.cohomologous,
    }


def todd(document: Document, *, settings: Settings, window: Window) -> Body:
    cocycle = atiyah_cocycle(document.affine_connection())
    result = todd_truncation(cocycle, settings.todd_order, settings=settings)
    return {
        "order": result.order,
        "bernoulli": [format_rational(b) for b in result.bernoulli],
        "characteristic": {
            str(k): {
                "factor": format_rational(entry["factor"]),
                "tag": entry["tag"],
                "cocycle": cocycle_table(entry["cocycle"]),
            }
            for k, entry in sorted(result.characteristic.items())
        },
        "pieces": {str(j): cocycle_table(p) for j, p in sorted(result.pieces.items())},
        "root": {str(j): cocycle_table(p) for j, p in sorted(result.root.items())},
        "form_degrees": {str(k): d for k, d in sorted(result.form_degrees.items())},
        "vanishing": result.vanishing,
        "trivial": result.is_trivial,
        "identities": _identities(result.checks),
        "passed": all(ok for _, ok in result.checks),
    }


def invariance(document: Document, *, settings: Settings, window: Window) -> Body:
    morphism = _morphism(document)
    target = document.target
    assert target is not None
    target_connection = document.affine_connection("target_connection", target)
    result = invariance_harness(
        morphism, target_connection, order=settings.todd_order, settings=settings
    )
    return {
        "source_connection": result.source_connection.name,
        "target_connection": result.target_connection.name,
        "alpha": cocycle_table(result.alpha),
        "beta": cocycle_table(result.beta),
        "scalars": {
            str(k): {"alpha": cocycle_table(a), "beta": cocycle_table(b)}
            for k, (a, b) in sorted(result.scalar_sides.items())
        },
        "identities": _identities(result.checks),
        "first_difference": result.first_difference,
        "passed": result.passed,
    }


def hkr(document: Document, *, settings: Settings, window: Window) -> Body:
    result = hkr_check(
        document.bundle,
        _window(document, window, settings),
        arity=settings.truncate_arity,
        settings=settings,
    )
    return {
        "window": list(result.degrees),
        "arity": result.arity,
        "samples": result.samples,
        "identities": _identities(result.checks),
        "passed": result.passed,
    }


def hochschild_window(
    document: Document, *, settings: Settings, window: Window
) -> Body:
    result = windowed_hh(
        document.bundle,
        _window(document, window, settings),
        arity=settings.truncate_arity,
        order=settings.truncate_order,
        settings=settings,
    )
    return {
        "window": list(result.window),
        "arity": result.arity,
        "order": result.order,
        "cells": result.table(),
        "inconclusive": result.inconclusive,
        "passed": result.agrees,
    }


COMMANDS: dict[str, Command] = {
    "validate": validate,
    "tangent-complex": tangent_complex,
    "classify": classify,
    "cohomology": cohomology,
    "kernel-acyclicity": kernel_acyclicity,
    "ladder": ladder,
    "atiyah": atiyah,
    "compare-classes": compare,
    "todd": todd,
    "invariance": invariance,
    "hkr-check": hkr,
    "hochschild-window": hochschild_window,
}


def run(
    name: str,
    document: Document,
    *,
    settings: Settings = default_settings,
    window: Window = None,
) -> Body:
    """Run a command and return its report. ``status`` is ``pass``, ``fail``, or
    ``inconclusive`` when some window cell did not stabilize. Engine errors and
    failed internal identities are reported as failures with their message.
    """
    try:
        body = COMMANDS[name](document, settings=settings, window=window)
    except (DgManifoldError, AssertionError) as e:
        logger.info("%s failed: %s", name, e)
        body = {"error": str(e), "passed": False}

    if not body["passed"]:
        status = "fail"
    elif body.get("inconclusive"):
        status = "inconclusive"
    else:
        status = "pass"

    return {"command": name, "status": status, **body}
