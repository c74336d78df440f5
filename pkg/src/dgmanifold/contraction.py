from __future__ import annotations

import dataclasses
import logging
import typing as t

from . import linalg
from .errors import NotExactError
from .graded import FiniteComplex
from .linalg import Matrix

logger = logging.getLogger(__name__)


@dataclasses.dataclass()
class ContractionData:
    """Splitting data for an exact sequence ``0 -> V_0 -> ... -> V_b -> 0``.
    ``deltas[i]: V_i -> V_(i+1)`` are the maps of the sequence and
    ``etas[i]: V_(i+1) -> V_i`` satisfy

    - ``etas[i] @ etas[i + 1] == 0``
    - ``etas[0] @ deltas[0] == id``
    - ``deltas[i] @ etas[i] + etas[i + 1] @ deltas[i + 1] == id`` on ``V_(i+1)``,
      where the second term is absent at the top.
    """

    dims: list[int]
    deltas: list[Matrix]
    etas: list[Matrix]

    @property
    def length(self) -> int:
        return len(self.deltas)

    def projector(self, position: int) -> Matrix:
        """``P_i = id - eta_i delta_i`` on ``V_i``, the projector onto
        ``ker delta_i = im delta_(i-1)``. ``P_b`` is the identity.
        """
        identity = Matrix.identity(self.dims[position])

        if position >= self.length:
            return identity

        return identity - self.etas[position] @ self.deltas[position]

    def identities(self) -> list[tuple[str, bool]]:
        """Every identity the data must satisfy, with its outcome."""
        out: list[tuple[str, bool]] = []
        b = self.length

        for i in range(b - 1):
            product = self.etas[i] @ self.etas[i + 1]
            out.append((f"η{i}∘η{i + 1}=0", product.is_zero()))

        if b:
            ok = self.etas[0] @ self.deltas[0] == Matrix.identity(self.dims[0])
            out.append(("η0∘δ0=id", ok))

        for i in range(b):
            total = self.deltas[i] @ self.etas[i]

            if i + 1 < b:
                total = total + self.etas[i + 1] @ self.deltas[i + 1]

            ok = total == Matrix.identity(self.dims[i + 1])
            out.append((f"δ{i}∘η{i}+η{i + 1}∘δ{i + 1}=id", ok))

        return out

    def verify(self) -> bool:
        return all(ok for _, ok in self.identities())


def check_exact(dims: t.Sequence[int], maps: t.Sequence[Matrix]) -> None:
    """Raise :class:`.NotExactError` at the first position of
    ``0 -> V_0 -> ... -> V_b -> 0`` where the sequence is not exact.
    """
    for i, d in enumerate(maps):
        if d.shape != (dims[i + 1], dims[i]):
            raise ValueError(f"map {i} has shape {d.shape}")

    for i in range(len(maps) - 1):
        if not (maps[i + 1] @ maps[i]).is_zero():
            raise ValueError(f"consecutive maps at position {i + 1} don't compose to 0")

    ranks = [linalg.rank(d) for d in maps]

    for i, dim in enumerate(dims):
        incoming = ranks[i - 1] if i > 0 else 0
        outgoing = ranks[i] if i < len(maps) else 0
        defect = dim - incoming - outgoing

        if defect:
            raise NotExactError(i, defect)


def splitting(d: Matrix) -> Matrix:
    """``G`` with ``d G y = y`` for every ``y`` in the image of ``d``. ``G`` is the
    inverse of ``d`` restricted to the span of its pivot columns.
    """
    pivots = linalg.column_basis(d)

    if not pivots:
        return Matrix.zeros(d.ncols, d.nrows)

    restricted = d.submatrix(list(range(d.nrows)), pivots)
    inv = linalg.left_inverse(restricted)
    rows = {pivots[k]: row for k, row in inv.rows.items()}
    return Matrix(d.ncols, d.nrows, rows)


def build_contraction(
    maps: t.Sequence[Matrix], dims: t.Sequence[int] | None = None
) -> ContractionData:
    """Split an exact sequence of vector spaces by downward induction. The top
    ``eta`` splits the last surjection; each lower ``eta_r`` splits ``delta_r`` on
    the image of the projector ``P_(r+1) = id - eta_(r+1) delta_(r+1)``, which is
    ``ker delta_(r+1)``. Splittings use the pivot columns found by elimination, so
    the output is deterministic.

    :param maps: ``delta_0, ..., delta_(b-1)``.
    :param dims: Dimensions of ``V_0, ..., V_b``. Inferred from the maps if
        omitted.
    """
    if dims is None:
        if not maps:
            raise ValueError("dims are required for an empty sequence")

        dims = [maps[0].ncols, *(d.nrows for d in maps)]

    dims = list(dims)
    maps = list(maps)
    check_exact(dims, maps)
    b = len(maps)
    etas: list[Matrix] = [Matrix.zeros(0, 0)] * b

    for r in reversed(range(b)):
        if r == b - 1:
            projector = Matrix.identity(dims[r + 1])
        else:
            projector = Matrix.identity(dims[r + 1]) - etas[r + 1] @ maps[r + 1]

        etas[r] = splitting(maps[r]) @ projector

    data = ContractionData(dims, maps, etas)

    if not data.verify():
        failed = [name for name, ok in data.identities() if not ok]
        raise AssertionError(f"contraction identities failed: {failed}")

    logger.debug("built contraction of length %d with dims %s", b, dims)
    return data


def contraction_of_complex(complex: FiniteComplex) -> ContractionData:
    """Contraction of a finite exact complex supported in consecutive degrees."""
    degrees = complex.degrees

    if not degrees:
        return ContractionData([], [], [])

    low, high = degrees[0], degrees[-1]
    dims = [complex.space.dim(k) for k in range(low, high + 1)]
    maps = [complex.differential(k) for k in range(low, high)]
    return build_contraction(maps, dims)
