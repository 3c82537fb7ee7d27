"""Bit-packed Boolean matrices, read as bipartite graphs between a row part
and a column part.

Rows are packed little-endian into 64-bit words: column ``c`` of a row is bit
``c % 64`` of word ``c // 64``.  Padding bits past ``cols`` are always zero so
popcounts over whole words are exact.

Densities and degrees come back as :class:`fractions.Fraction`; every
threshold comparison elsewhere in the package is done on those exact values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

WORD_BITS = 64

__all__ = [
    "BoolMatrix",
    "TripartiteGraph",
    "index_set",
    "density",
    "row_degree",
    "col_degree",
    "transpose",
    "submatrix",
    "zero_rectangle",
    "bool_product",
    "count_product",
    "popcount",
]


def popcount(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words)


def _n_words(cols: int) -> int:
    return max(1, -(-cols // WORD_BITS))


def _pack(dense: np.ndarray) -> np.ndarray:
    rows, cols = dense.shape
    nw = _n_words(cols)
    padded = np.zeros((rows, nw * WORD_BITS), dtype=bool)
    padded[:, :cols] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").reshape(rows, nw)


def _unpack(words: np.ndarray, rows: int, cols: int) -> np.ndarray:
    if rows == 0:
        return np.zeros((0, cols), dtype=bool)
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8).reshape(rows, -1)
    return np.unpackbits(raw, axis=1, count=cols, bitorder="little").astype(bool)


def index_set(members, size: int | None = None) -> np.ndarray:
    """Validate and normalise a strictly increasing array of node indices."""
    arr = np.asarray(members, dtype=np.int64).reshape(-1)
    if arr.size > 1 and np.any(np.diff(arr) <= 0):
        raise ValueError("index set must be strictly increasing")
    if arr.size and arr[0] < 0:
        raise ValueError("negative index in index set")
    if size is not None and arr.size and arr[-1] >= size:
        raise IndexError(f"index {int(arr[-1])} out of range for part of size {size}")
    return arr


class BoolMatrix:
    """Immutable 0/1 matrix with optional global labels for rows and columns.

    ``row_labels[i]`` names the node of the ambient part that local row ``i``
    stands for; pieces cut out of a matrix always carry labels in the
    coordinates of the original parts.
    """

    __slots__ = ("rows", "cols", "words", "row_labels", "col_labels", "_dense")

    def __init__(self, words, rows, cols, row_labels=None, col_labels=None):
        words = np.asarray(words, dtype=np.uint64)
        if words.shape != (rows, _n_words(cols)):
            raise ValueError(f"word array shape {words.shape} does not fit {rows}x{cols}")
        rem = cols % WORD_BITS
        if rem and rows and np.any(words[:, -1] >> np.uint64(rem)):
            raise ValueError("padding bits beyond the last column must be zero")
        if cols == 0 and rows and np.any(words):
            raise ValueError("padding bits beyond the last column must be zero")
        self.rows = int(rows)
        self.cols = int(cols)
        self.words = words
        self.words.flags.writeable = False
        self.row_labels = None if row_labels is None else index_set(row_labels)
        self.col_labels = None if col_labels is None else index_set(col_labels)
        if self.row_labels is not None and self.row_labels.size != self.rows:
            raise ValueError("row label count does not match rows")
        if self.col_labels is not None and self.col_labels.size != self.cols:
            raise ValueError("column label count does not match cols")
        self._dense = None

    # construction -----------------------------------------------------

    @classmethod
    def from_dense(cls, dense, row_labels=None, col_labels=None) -> "BoolMatrix":
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise ValueError("expected a 2-d array")
        dense = dense.astype(bool, copy=False)
        m = cls(_pack(dense), dense.shape[0], dense.shape[1], row_labels, col_labels)
        cached = dense.copy()
        cached.flags.writeable = False
        m._dense = cached
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BoolMatrix":
        return cls(np.zeros((rows, _n_words(cols)), dtype=np.uint64), rows, cols)

    @classmethod
    def ones(cls, rows: int, cols: int) -> "BoolMatrix":
        return cls.from_dense(np.ones((rows, cols), dtype=bool))

    @classmethod
    def identity(cls, n: int) -> "BoolMatrix":
        return cls.from_dense(np.eye(n, dtype=bool))

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries) -> "BoolMatrix":
        dense = np.zeros((rows, cols), dtype=bool)
        for r, c in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside {rows}x{cols}")
            dense[r, c] = True
        return cls.from_dense(dense)

    @classmethod
    def random(cls, rows: int, cols: int, p, rng) -> "BoolMatrix":
        """Each entry independently 1 with probability ``p`` (float or Fraction)."""
        return cls.from_dense(rng.random((rows, cols)) < float(p))

    # views ------------------------------------------------------------

    @property
    def dense(self) -> np.ndarray:
        """Read-only ``bool`` array view (unpacked once and cached)."""
        if self._dense is None:
            d = _unpack(self.words, self.rows, self.cols)
            d.flags.writeable = False
            self._dense = d
        return self._dense

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def T(self) -> "BoolMatrix":
        return transpose(self)

    def global_rows(self) -> np.ndarray:
        return np.arange(self.rows, dtype=np.int64) if self.row_labels is None else self.row_labels

    def global_cols(self) -> np.ndarray:
        return np.arange(self.cols, dtype=np.int64) if self.col_labels is None else self.col_labels

    def with_labels(self, row_labels=None, col_labels=None) -> "BoolMatrix":
        m = BoolMatrix(self.words, self.rows, self.cols, row_labels, col_labels)
        m._dense = self._dense
        return m

    def nnz(self) -> int:
        return int(popcount(self.words).sum())

    def row_counts(self) -> np.ndarray:
        return popcount(self.words).sum(axis=1, dtype=np.int64)

    def col_counts(self) -> np.ndarray:
        return self.dense.sum(axis=0, dtype=np.int64)

    def entries(self) -> list[tuple[int, int]]:
        """1-entries in row-major order."""
        r, c = np.nonzero(self.dense)
        return list(zip(r.tolist(), c.tolist()))

    def row_int(self, x: int) -> int:
        """Row ``x`` as a Python int bitset (bit ``c`` = column ``c``)."""
        return int.from_bytes(self.words[x].astype("<u8").tobytes(), "little")

    def __getitem__(self, key) -> bool:
        r, c = key
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"({r}, {c}) outside {self.rows}x{self.cols}")
        return bool((int(self.words[r, c // WORD_BITS]) >> (c % WORD_BITS)) & 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoolMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.words, other.words)

    def __hash__(self):
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BoolMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


@dataclass(frozen=True)
class TripartiteGraph:
    """Parts X, Y, Z with edge matrices A: X x Y, B: Y x Z and C: X x Z."""

    A: BoolMatrix
    B: BoolMatrix
    C: BoolMatrix

    def __post_init__(self):
        if self.A.cols != self.B.rows or self.A.rows != self.C.rows or self.B.cols != self.C.cols:
            raise ValueError(
                f"incompatible shapes A{self.A.shape} B{self.B.shape} C{self.C.shape}"
            )

    @property
    def nx(self) -> int:
        return self.A.rows

    @property
    def ny(self) -> int:
        return self.A.cols

    @property
    def nz(self) -> int:
        return self.B.cols

    @classmethod
    def random(cls, nx, ny, nz, p, rng) -> "TripartiteGraph":
        return cls(
            BoolMatrix.random(nx, ny, p, rng),
            BoolMatrix.random(ny, nz, p, rng),
            BoolMatrix.random(nx, nz, p, rng),
        )

    @classmethod
    def complete(cls, nx, ny, nz) -> "TripartiteGraph":
        return cls(BoolMatrix.ones(nx, ny), BoolMatrix.ones(ny, nz), BoolMatrix.ones(nx, nz))


def density(A: BoolMatrix) -> Fraction:
    """Fraction of 1-entries."""
    if A.rows * A.cols == 0:
        raise ValueError("density of an empty matrix is undefined")
    return Fraction(A.nnz(), A.rows * A.cols)


def row_degree(A: BoolMatrix, x: int) -> Fraction:
    if not 0 <= x < A.rows:
        raise IndexError(f"row {x} out of range")
    if A.cols == 0:
        raise ValueError("degree in a matrix without columns is undefined")
    return Fraction(int(popcount(A.words[x]).sum()), A.cols)


def col_degree(A: BoolMatrix, y: int) -> Fraction:
    if not 0 <= y < A.cols:
        raise IndexError(f"column {y} out of range")
    if A.rows == 0:
        raise ValueError("degree in a matrix without rows is undefined")
    return Fraction(int(A.dense[:, y].sum()), A.rows)


def transpose(A: BoolMatrix) -> BoolMatrix:
    return BoolMatrix.from_dense(A.dense.T, A.col_labels, A.row_labels)


def _local(idx, size) -> np.ndarray:
    if idx is None:
        return np.arange(size, dtype=np.int64)
    return index_set(idx, size)


def submatrix(A: BoolMatrix, rows=None, cols=None) -> BoolMatrix:
    """Induced submatrix on local row/column index sets (``None`` keeps all).

    The result's labels are composed through ``A``'s labels.
    """
    r = _local(rows, A.rows)
    c = _local(cols, A.cols)
    return BoolMatrix.from_dense(
        A.dense[np.ix_(r, c)], A.global_rows()[r], A.global_cols()[c]
    )


def zero_rectangle(A: BoolMatrix, rows=None, cols=None) -> BoolMatrix:
    """Copy of ``A`` with the entries of ``rows x cols`` cleared."""
    r = _local(rows, A.rows)
    c = _local(cols, A.cols)
    d = A.dense.copy()
    d[np.ix_(r, c)] = False
    return BoolMatrix.from_dense(d, A.row_labels, A.col_labels)


def bool_product(A: BoolMatrix, B: BoolMatrix) -> BoolMatrix:
    """Boolean product over (OR, AND): row x of the result is the OR of the
    packed rows of ``B`` selected by row x of ``A``."""
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.shape} x {B.shape}")
    out = np.zeros((A.rows, B.words.shape[1]), dtype=np.uint64)
    Ad = A.dense
    for x in range(A.rows):
        nbrs = np.flatnonzero(Ad[x])
        if nbrs.size:
            out[x] = np.bitwise_or.reduce(B.words[nbrs], axis=0)
    return BoolMatrix(out, A.rows, B.cols, A.row_labels, B.col_labels)


def count_product(A: BoolMatrix, B: BoolMatrix) -> np.ndarray:
    """Integer 2-path counts ``|{y : A(x,y) = B(y,z) = 1}|`` as an int64 array."""
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.shape} x {B.shape}")
    # float64 matmul is exact for counts below 2**53
    prod = A.dense.astype(np.float64) @ B.dense.astype(np.float64)
    return np.rint(prod).astype(np.int64)
