"""Sparse exact matrices over ``QQ``. Rank uses fraction-free integer elimination;
reduced row echelon form, nullspaces and solving use exact rationals.
"""

from __future__ import annotations

import math
import typing as t

from sympy import QQ

Row = dict[int, t.Any]


class Matrix:
    """A sparse ``nrows x ncols`` matrix with entries in ``QQ``. Rows are stored as
    maps from column index to nonzero entries. Treat instances as immutable.

    :param nrows: Number of rows.
    :param ncols: Number of columns.
    :param rows: Map from row index to that row's nonzero entries.
    """

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(
        self,
        nrows: int,
        ncols: int,
        rows: t.Mapping[int, t.Mapping[int, t.Any]] | None = None,
    ) -> None:
        self.nrows = nrows
        self.ncols = ncols
        self.rows: dict[int, Row] = {}

        if rows:
            for i, row in rows.items():
                clean = {j: QQ.convert(v) for j, v in row.items() if v}

                if clean:
                    self.rows[i] = clean

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> Matrix:
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls(n, n, {i: {i: QQ.one} for i in range(n)})

    @classmethod
    def from_dense(
        cls, data: t.Sequence[t.Sequence[t.Any]], ncols: int | None = None
    ) -> Matrix:
        nrows = len(data)

        if ncols is None:
            ncols = len(data[0]) if nrows else 0

        rows = {i: dict(enumerate(row)) for i, row in enumerate(data)}
        return cls(nrows, ncols, rows)

    @classmethod
    def from_columns(
        cls, nrows: int, columns: t.Sequence[t.Mapping[int, t.Any]]
    ) -> Matrix:
        rows: dict[int, Row] = {}

        for j, column in enumerate(columns):
            for i, v in column.items():
                if v:
                    rows.setdefault(i, {})[j] = v

        return cls(nrows, len(columns), rows)

    @classmethod
    def blocks(
        cls,
        row_sizes: t.Sequence[int],
        col_sizes: t.Sequence[int],
        parts: t.Mapping[tuple[int, int], Matrix],
    ) -> Matrix:
        """Assemble a block matrix. Missing blocks are zero."""
        row_offsets = [sum(row_sizes[:i]) for i in range(len(row_sizes))]
        col_offsets = [sum(col_sizes[:j]) for j in range(len(col_sizes))]
        rows: dict[int, Row] = {}

        for (bi, bj), part in parts.items():
            if (part.nrows, part.ncols) != (row_sizes[bi], col_sizes[bj]):
                raise ValueError(f"block {(bi, bj)} has the wrong shape")

            for i, row in part.rows.items():
                target = rows.setdefault(row_offsets[bi] + i, {})

                for j, v in row.items():
                    target[col_offsets[bj] + j] = v

        return cls(sum(row_sizes), sum(col_sizes), rows)

    def __repr__(self) -> str:
        return f"Matrix({self.nrows}, {self.ncols}, {self.to_dense()!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented

        left = (self.nrows, self.ncols, self.rows)
        return left == (other.nrows, other.ncols, other.rows)

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def is_zero(self) -> bool:
        return not self.rows

    def __getitem__(self, key: tuple[int, int]) -> t.Any:
        i, j = key
        return self.rows.get(i, {}).get(j, QQ.zero)

    def to_dense(self) -> list[list[t.Any]]:
        return [
            [self.rows.get(i, {}).get(j, QQ.zero) for j in range(self.ncols)]
            for i in range(self.nrows)
        ]

    def column(self, j: int) -> dict[int, t.Any]:
        return {i: row[j] for i, row in self.rows.items() if j in row}

    def transpose(self) -> Matrix:
        rows: dict[int, Row] = {}

        for i, row in self.rows.items():
            for j, v in row.items():
                rows.setdefault(j, {})[i] = v

        return Matrix(self.ncols, self.nrows, rows)

    @property
    def T(self) -> Matrix:
        return self.transpose()

    def __add__(self, other: Matrix) -> Matrix:
        self._check_same_shape(other)
        rows = {i: dict(row) for i, row in self.rows.items()}

        for i, row in other.rows.items():
            target = rows.setdefault(i, {})

            for j, v in row.items():
                target[j] = target.get(j, QQ.zero) + v

        return Matrix(self.nrows, self.ncols, rows)

    def __neg__(self) -> Matrix:
        rows = {i: {j: -v for j, v in row.items()} for i, row in self.rows.items()}
        return Matrix(self.nrows, self.ncols, rows)

    def __sub__(self, other: Matrix) -> Matrix:
        return self + (-other)

    def scale(self, factor: t.Any) -> Matrix:
        factor = QQ.convert(factor)
        rows = {
            i: {j: factor * v for j, v in row.items()} for i, row in self.rows.items()
        }
        return Matrix(self.nrows, self.ncols, rows)

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.ncols != other.nrows:
            raise ValueError(f"can't multiply {self.shape} by {other.shape}")

        rows: dict[int, Row] = {}

        for i, row in self.rows.items():
            out: Row = {}

            for k, a in row.items():
                other_row = other.rows.get(k)

                if other_row is None:
                    continue

                for j, b in other_row.items():
                    out[j] = out.get(j, QQ.zero) + a * b

            rows[i] = out

        return Matrix(self.nrows, other.ncols, rows)

    def apply(self, vector: t.Mapping[int, t.Any]) -> dict[int, t.Any]:
        """Multiply a sparse column vector."""
        out: dict[int, t.Any] = {}

        for i, row in self.rows.items():
            total = QQ.zero

            for j, v in row.items():
                if j in vector:
                    total += v * vector[j]

            if total:
                out[i] = total

        return out

    def submatrix(self, rows: t.Sequence[int], cols: t.Sequence[int]) -> Matrix:
        col_index = {c: k for k, c in enumerate(cols)}
        out: dict[int, Row] = {}

        for new_i, i in enumerate(rows):
            row = self.rows.get(i)

            if row:
                out[new_i] = {col_index[j]: v for j, v in row.items() if j in col_index}

        return Matrix(len(rows), len(cols), out)

    def _check_same_shape(self, other: Matrix) -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} and {other.shape}")


def _integer_row(row: Row) -> dict[int, int]:
    denominator = 1

    for v in row.values():
        denominator = math.lcm(denominator, int(QQ.denom(v)))

    out = {
        j: int(QQ.numer(v)) * (denominator // int(QQ.denom(v))) for j, v in row.items()
    }
    return _primitive(out)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0

    for v in row.values():
        g = math.gcd(g, v)

    if g > 1:
        return {j: v // g for j, v in row.items()}

    return row


def rank(matrix: Matrix) -> int:
    """Rank by fraction-free elimination on integer rows. Each row is scaled to
    primitive integers first, and after every elimination step.
    """
    rows = [_integer_row(row) for row in matrix.rows.values() if row]
    result = 0

    while rows:
        # pivot on the row with the smallest leading column, fewest entries
        pivot_index = min(range(len(rows)), key=lambda k: (min(rows[k]), len(rows[k])))
        pivot = rows.pop(pivot_index)
        col = min(pivot)
        p = pivot[col]
        result += 1
        remaining = []

        for row in rows:
            r = row.get(col)

            if r is None:
                remaining.append(row)
                continue

            new: dict[int, int] = {}

            for j in set(row) | set(pivot):
                v = p * row.get(j, 0) - r * pivot.get(j, 0)

                if v:
                    new[j] = v

            if new:
                remaining.append(_primitive(new))

        rows = remaining

    return result


def rref(matrix: Matrix) -> tuple[list[Row], list[int]]:
    """Reduced row echelon form. Returns the nonzero rows in order and the pivot
    column of each. Pivots are chosen by smallest column, then smallest row index.
    """
    rows = [dict(matrix.rows[i]) for i in sorted(matrix.rows)]
    done: list[Row] = []
    pivots: list[int] = []

    while rows:
        col = min(min(row) for row in rows)
        k = next(k for k, row in enumerate(rows) if col in row)
        pivot = rows.pop(k)
        inv = QQ.one / pivot[col]
        pivot = {j: v * inv for j, v in pivot.items()}
        reduced = []

        for row in rows:
            r = row.get(col)

            if r is None:
                reduced.append(row)
                continue

            new = _axpy(row, pivot, -r)

            if new:
                reduced.append(new)

        for k2, row in enumerate(done):
            r = row.get(col)

            if r is not None:
                done[k2] = _axpy(row, pivot, -r)

        done.append(pivot)
        pivots.append(col)
        rows = reduced

    return done, pivots


def _axpy(row: Row, other: Row, factor: t.Any) -> Row:
    out = dict(row)

    for j, v in other.items():
        w = out.get(j, QQ.zero) + factor * v

        if w:
            out[j] = w
        else:
            out.pop(j, None)

    return out


def nullspace(matrix: Matrix) -> list[dict[int, t.Any]]:
    """Basis of ``{x : A x = 0}`` as sparse vectors, one per free column in
    ascending order, with a 1 in that free column.
    """
    rows, pivots = rref(matrix)
    pivot_set = set(pivots)
    basis = []

    for free in range(matrix.ncols):
        if free in pivot_set:
            continue

        vector = {free: QQ.one}

        for row, col in zip(rows, pivots):
            v = row.get(free)

            if v:
                vector[col] = -v

        basis.append(vector)

    return basis


def solve(matrix: Matrix, rhs: t.Mapping[int, t.Any]) -> dict[int, t.Any] | None:
    """Some solution of ``A x = b``, or ``None`` if the system is inconsistent.
    Free variables are set to zero.
    """
    augmented_col = matrix.ncols
    rows = {i: dict(row) for i, row in matrix.rows.items()}

    for i, v in rhs.items():
        if v:
            rows.setdefault(i, {})[augmented_col] = QQ.convert(v)

    reduced, pivots = rref(Matrix(matrix.nrows, matrix.ncols + 1, rows))

    if augmented_col in pivots:
        return None

    return {
        col: row[augmented_col]
        for row, col in zip(reduced, pivots)
        if augmented_col in row
    }


def solve_matrix(matrix: Matrix, rhs: Matrix) -> Matrix | None:
    """Solve ``A X = B`` column by column."""
    columns = []

    for j in range(rhs.ncols):
        x = solve(matrix, rhs.column(j))

        if x is None:
            return None

        columns.append(x)

    return Matrix.from_columns(matrix.ncols, columns)


def inverse(matrix: Matrix) -> Matrix:
    if matrix.nrows != matrix.ncols:
        raise ValueError("only square matrices are invertible")

    result = solve_matrix(matrix, Matrix.identity(matrix.nrows))

    if result is None or rank(matrix) != matrix.nrows:
        raise ValueError("matrix is singular")

    return result


def left_inverse(matrix: Matrix) -> Matrix:
    """``L`` with ``L A = I`` for an injective ``A``. Uses the first independent rows
    of ``A`` found by elimination on its transpose.
    """
    _, rows = rref(matrix.T)

    if len(rows) != matrix.ncols:
        raise ValueError("matrix is not injective")

    square = matrix.submatrix(rows, list(range(matrix.ncols)))
    inv = inverse(square)
    out: dict[int, Row] = {}

    for i, row in inv.rows.items():
        out[i] = {rows[k]: v for k, v in row.items()}

    return Matrix(matrix.ncols, matrix.nrows, out)


def right_inverse(matrix: Matrix) -> Matrix:
    """``R`` with ``A R = I`` for a surjective ``A``."""
    return left_inverse(matrix.T).T


def column_basis(matrix: Matrix) -> list[int]:
    """Indices of the pivot columns, a basis of the column space."""
    return rref(matrix)[1]
