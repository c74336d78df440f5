from __future__ import annotations

import typing as t


class DgManifoldError(Exception):
    """Base class for errors raised by the engine. The first line of the message is
    a fixed phrase that identifies the failure; details follow after a colon.
    """


class NotMaterializableError(DgManifoldError):
    """A degree component is infinite dimensional, for example a function algebra over
    an affine base.
    """

    def __init__(self, detail: str = "") -> None:
        message = "degree component not finitely materializable"

        if detail:
            message = f"{message}: {detail}"

        super().__init__(message)


class NotExactError(DgManifoldError):
    """A sequence passed to :func:`.build_contraction` is not exact.

    :param position: The position where exactness fails.
    :param defect: ``dim ker - rank`` at that position.
    """

    def __init__(self, position: int, defect: int) -> None:
        super().__init__(f"not exact at position {position}: rank defect {defect}")
        self.position = position
        self.defect = defect


class NotChainMapError(DgManifoldError):
    """A map does not commute with the differentials.

    :param degree: The first offending degree, or ``None`` if the check was done on
        generators.
    """

    def __init__(self, degree: int | None, detail: str = "") -> None:
        where = "on generators" if degree is None else f"at degree {degree}"
        message = f"not a chain map {where}"

        if detail:
            message = f"{message}: {detail}"

        super().__init__(message)
        self.degree = degree


class StructureError(DgManifoldError):
    """A curved bundle or morphism fails one of its structure relations. The report
    lists every relation with its outcome.
    """

    def __init__(self, report: t.Any) -> None:
        first = report.failures[0]
        super().__init__(f"relation {first.name} fails: {first.detail}")
        self.report = report


class NotClassicalError(DgManifoldError):
    def __init__(self, point: t.Sequence[t.Any]) -> None:
        super().__init__(f"not a classical point: {tuple(str(v) for v in point)}")
        self.point = tuple(point)


class MorphismError(DgManifoldError):
    """Shape or correspondence problems with a morphism and its loci."""


class LadderError(DgManifoldError):
    """The kernel data does not admit the ladder construction."""


class HarnessError(DgManifoldError):
    """The invariance harness can't build the splitting it needs."""


class DocumentError(DgManifoldError):
    """A document could not be parsed. ``errors`` maps document paths to messages."""

    def __init__(self, errors: dict[str, str]) -> None:
        detail = "; ".join(f"{k}: {v}" for k, v in errors.items())
        super().__init__(f"invalid document: {detail}")
        self.errors = errors
