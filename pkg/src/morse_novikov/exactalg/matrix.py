"""Immutable dictionary-of-keys sparse matrices with exact entries."""

from __future__ import annotations

from ..exceptions import UsageError


class SparseMatrix:
    """A ``rows x cols`` matrix storing only nonzero entries.

    Entries may be Python ints, Fractions, prime-field residues or
    :class:`LaurentPoly` values; zero entries (anything falsy) are dropped at
    construction so equality is structural.
    """

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, rows, cols, entries=None):
        if rows < 0 or cols < 0:
            raise UsageError("matrix dimensions must be nonnegative")
        self.rows = int(rows)
        self.cols = int(cols)
        clean = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise UsageError(f"entry ({i}, {j}) outside a {rows}x{cols} matrix")
            if v:
                clean[(int(i), int(j))] = v
        self._entries = clean

    @classmethod
    def from_dense(cls, data):
        data = [list(r) for r in data]
        rows = len(data)
        cols = len(data[0]) if rows else 0
        if any(len(r) != cols for r in data):
            raise UsageError("ragged dense matrix")
        return cls(rows, cols, {(i, j): v for i, r in enumerate(data) for j, v in enumerate(r)})

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def identity(cls, n, one=1):
        return cls(n, n, {(i, i): one for i in range(n)})

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def entries(self):
        return dict(self._entries)

    def items(self):
        return self._entries.items()

    @property
    def nnz(self):
        return len(self._entries)

    def get(self, i, j, default=0):
        return self._entries.get((i, j), default)

    def __getitem__(self, key):
        return self._entries.get(key, 0)

    def is_zero(self):
        return not self._entries

    def row_dicts(self):
        out = [dict() for _ in range(self.rows)]
        for (i, j), v in self._entries.items():
            out[i][j] = v
        return out

    def col_dicts(self):
        out = [dict() for _ in range(self.cols)]
        for (i, j), v in self._entries.items():
            out[j][i] = v
        return out

    def transpose(self):
        return SparseMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self._entries.items()})

    @property
    def T(self):
        return self.transpose()

    def map(self, fn):
        return SparseMatrix(self.rows, self.cols, {k: fn(v) for k, v in self._entries.items()})

    def __matmul__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise UsageError(f"cannot multiply {self.shape} by {other.shape}")
        rows_b = other.row_dicts()
        acc = {}
        for (i, k), a in self._entries.items():
            for j, b in rows_b[k].items():
                key = (i, j)
                prod = a * b
                acc[key] = acc[key] + prod if key in acc else prod
        return SparseMatrix(self.rows, other.cols, acc)

    def to_dense(self, zero=0):
        out = [[zero] * self.cols for _ in range(self.rows)]
        for (i, j), v in self._entries.items():
            out[i][j] = v
        return out

    def submatrix(self, rows, cols):
        rmap = {r: a for a, r in enumerate(rows)}
        cmap = {c: b for b, c in enumerate(cols)}
        return SparseMatrix(
            len(rows),
            len(cols),
            {(rmap[i], cmap[j]): v for (i, j), v in self._entries.items() if i in rmap and j in cmap},
        )

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self):
        return hash((self.shape, frozenset(self._entries.items())))

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz})"
