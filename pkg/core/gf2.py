import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence

import numpy as np

from core.exceptions import CodeFormatError, DimensionError

logger = logging.getLogger(__name__)

WORD_BITS = 64


def _word_count(cols: int) -> int:
    return -(-cols // WORD_BITS)


def _pack(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D 0/1 array into big-endian 64-bit words (column 0 is the top bit)."""
    bits = (np.asarray(bits) != 0).astype(np.uint8)
    rows, cols = bits.shape
    words = _word_count(cols)
    if words == 0:
        return np.zeros((rows, 0), dtype=np.uint64)
    padded = np.zeros((rows, words * 8), dtype=np.uint8)
    packed = np.packbits(bits, axis=1)
    padded[:, :packed.shape[1]] = packed
    return padded.view('>u8').astype(np.uint64)


def _unpack(data: np.ndarray, cols: int) -> np.ndarray:
    rows = data.shape[0]
    if cols == 0 or data.shape[1] == 0:
        return np.zeros((rows, cols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(data.astype('>u8')).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1)[:, :cols]


def _bit_mask(col: int) -> np.uint64:
    return np.uint64(1 << (WORD_BITS - 1 - (col % WORD_BITS)))


class BitMatrix:
    """Immutable GF(2) matrix whose rows are packed into 64-bit words."""

    __slots__ = ('rows', 'cols', 'data')

    def __init__(self, data: np.ndarray, cols: int):
        data = np.array(data, dtype=np.uint64, copy=True, ndmin=2)
        if data.shape[1] != _word_count(cols):
            raise DimensionError(
                f"{data.shape[1]} words per row cannot hold exactly {cols} columns"
            )
        tail = cols % WORD_BITS
        if tail and data.shape[0]:
            # padding bits stay zero
            data[:, -1] &= np.uint64(((1 << tail) - 1) << (WORD_BITS - tail))
        data.setflags(write=False)
        self.rows = data.shape[0]
        self.cols = cols
        self.data = data

    @classmethod
    def from_dense(cls, bits, cols: int = None) -> 'BitMatrix':
        """Build from a 2-D array-like of 0/1 values."""
        array = np.asarray(bits)
        if array.size == 0 and array.ndim < 2:
            return cls.zeros(0, cols or 0)
        if array.ndim != 2:
            raise DimensionError(f"expected a 2-D array, got {array.ndim} dimensions")
        return cls(_pack(array), array.shape[1])

    @classmethod
    def from_rows(cls, rows: Sequence[str], cols: int = None) -> 'BitMatrix':
        """Build from strings such as '1110100'."""
        if not rows:
            return cls.zeros(0, cols or 0)
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise CodeFormatError(f"ragged rows with widths {sorted(widths)}")
        try:
            dense = np.array([[int(ch) for ch in r] for r in rows], dtype=np.uint8)
        except ValueError as e:
            raise CodeFormatError(f"rows must contain only 0 and 1: {str(e)}") from e
        if dense.size and dense.max() > 1:
            raise CodeFormatError("rows must contain only 0 and 1")
        return cls.from_dense(dense)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'BitMatrix':
        return cls(np.zeros((rows, _word_count(cols)), dtype=np.uint64), cols)

    @classmethod
    def identity(cls, n: int) -> 'BitMatrix':
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_text(cls, text: str) -> 'BitMatrix':
        """Parse the `rows cols` header followed by one 0/1 line per row."""
        lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
        if not lines:
            raise CodeFormatError("empty matrix text")
        try:
            rows, cols = (int(token) for token in lines[0].split())
        except ValueError as e:
            raise CodeFormatError(f"bad matrix header '{lines[0]}'") from e
        body = lines[1:]
        if len(body) != rows:
            raise CodeFormatError(f"header announces {rows} rows, found {len(body)}")
        for index, line in enumerate(body):
            if len(line) != cols:
                raise CodeFormatError(f"row {index} has {len(line)} columns, expected {cols}")
        return cls.from_rows(body, cols) if rows else cls.zeros(0, cols)

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        lines.extend(self.row_strings())
        return '\n'.join(lines) + '\n'

    def row_strings(self) -> List[str]:
        return [''.join('1' if bit else '0' for bit in row) for row in self.to_dense()]

    def to_dense(self) -> np.ndarray:
        return _unpack(self.data, self.cols)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def row(self, index: int) -> np.ndarray:
        return _unpack(self.data[index:index + 1], self.cols)[0]

    def row_weights(self) -> np.ndarray:
        return np.bitwise_count(self.data).sum(axis=1, dtype=np.int64)

    def column_weights(self) -> np.ndarray:
        return self.to_dense().sum(axis=0, dtype=np.int64)

    def is_zero(self) -> bool:
        return not self.data.any()

    def select_columns(self, columns: Iterable[int]) -> 'BitMatrix':
        columns = np.asarray(list(columns), dtype=np.intp)
        return BitMatrix.from_dense(self.to_dense()[:, columns].reshape(self.rows, len(columns)))

    def select_rows(self, rows: Iterable[int]) -> 'BitMatrix':
        rows = np.asarray(list(rows), dtype=np.intp)
        return BitMatrix(self.data[rows].reshape(len(rows), self.data.shape[1]), self.cols)

    def vstack(self, *others: 'BitMatrix') -> 'BitMatrix':
        for other in others:
            if other.cols != self.cols:
                raise DimensionError(f"cannot stack {other.cols} columns under {self.cols}")
        return BitMatrix(np.vstack([self.data] + [o.data for o in others]), self.cols)

    def hstack(self, *others: 'BitMatrix') -> 'BitMatrix':
        for other in others:
            if other.rows != self.rows:
                raise DimensionError(f"cannot place {other.rows} rows beside {self.rows}")
        return BitMatrix.from_dense(np.hstack([self.to_dense()] + [o.to_dense() for o in others]))

    @property
    def T(self) -> 'BitMatrix':
        return BitMatrix.from_dense(self.to_dense().T)

    def __matmul__(self, other: 'BitMatrix') -> 'BitMatrix':
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        product = self.to_dense().astype(np.int64) @ other.to_dense().astype(np.int64)
        return BitMatrix.from_dense(product % 2)

    def add_row(self, target: int, source: int) -> 'BitMatrix':
        """Return a copy with row `source` added (XORed) into row `target`."""
        data = self.data.copy()
        data[target] ^= data[source]
        return BitMatrix(data, self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    __hash__ = None

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


@dataclass
class RrefResult:
    """Reduced row-echelon form together with its pivots and row swaps."""
    matrix: BitMatrix
    pivot_cols: List[int] = field(default_factory=list)
    row_perm_applied: List[int] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.pivot_cols)


def rank(m: BitMatrix) -> int:
    """Dimension of the row space over GF(2)."""
    work = m.data[m.data.any(axis=1)].copy()
    result = 0
    while work.shape[0]:
        pivot = work[0]
        word = int(np.flatnonzero(pivot)[0])
        mask = np.uint64(1 << (int(pivot[word]).bit_length() - 1))
        rest = work[1:]
        hit = (rest[:, word] & mask) != 0
        rest[hit] ^= pivot
        work = rest[rest.any(axis=1)]
        result += 1
    return result


def rref(m: BitMatrix) -> RrefResult:
    """Gauss-Jordan elimination scanning columns left to right.

    The pivot for each column is the lowest-index remaining row with that bit set,
    so the output is deterministic.
    """
    work = m.data.copy()
    order = list(range(m.rows))
    pivots = []
    row = 0
    for col in range(m.cols):
        if row == m.rows:
            break
        word, mask = col // WORD_BITS, _bit_mask(col)
        hits = np.flatnonzero(work[row:, word] & mask)
        if hits.size == 0:
            continue
        chosen = row + int(hits[0])
        if chosen != row:
            work[[row, chosen]] = work[[chosen, row]]
            order[row], order[chosen] = order[chosen], order[row]
        others = np.flatnonzero(work[:, word] & mask)
        others = others[others != row]
        work[others] ^= work[row]
        pivots.append(col)
        row += 1
    return RrefResult(BitMatrix(work, m.cols), pivots, order)


def nullspace_basis(m: BitMatrix) -> BitMatrix:
    """Basis of {z : m z = 0}, one row per free column in ascending order."""
    reduced = rref(m)
    pivots = reduced.pivot_cols
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    basis = np.zeros((len(free), m.cols), dtype=np.uint8)
    if free:
        basis[np.arange(len(free)), free] = 1
        if pivots:
            dense = reduced.matrix.to_dense()[:len(pivots)]
            basis[:, pivots] = dense[:, free].T
    return BitMatrix.from_dense(basis) if free else BitMatrix.zeros(0, m.cols)


class RowSpace:
    """Cached row reduction for repeated membership tests against one matrix."""

    def __init__(self, m: BitMatrix):
        self.cols = m.cols
        reduced = rref(m)
        self.pivots = reduced.pivot_cols
        self.basis = reduced.matrix.data[:len(self.pivots)]

    @property
    def dimension(self) -> int:
        return len(self.pivots)

    def reduce(self, v) -> np.ndarray:
        """Residue of `v` after eliminating every pivot column, as a 0/1 vector."""
        vector = np.asarray(v).reshape(-1)
        if vector.shape[0] != self.cols:
            raise DimensionError(f"vector of length {vector.shape[0]} against {self.cols} columns")
        words = _pack(vector.reshape(1, -1))[0]
        for index, col in enumerate(self.pivots):
            if words[col // WORD_BITS] & _bit_mask(col):
                words ^= self.basis[index]
        return _unpack(words.reshape(1, -1), self.cols)[0]

    def contains(self, v) -> bool:
        return not self.reduce(v).any()


def in_row_space(m: BitMatrix, v) -> bool:
    """True iff `v` is a GF(2) combination of the rows of `m`."""
    return RowSpace(m).contains(v)
