import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.css_codes import CssCode, logical_z_operators
from core.exceptions import DimensionError, OracleSizeError, ParameterError
from core.gf2 import BitMatrix, RowSpace, nullspace_basis, rank, rref

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_MAX_QUBITS = 14
DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Bipartition:
    """Split of n qubits; A is stored, B is its complement."""
    n: int
    a_set: Tuple[int, ...] = ()

    def __post_init__(self):
        a_set = tuple(self.a_set)
        if any(later <= earlier for earlier, later in zip(a_set, a_set[1:])):
            raise DimensionError(f"subsystem indices must be strictly increasing: {a_set}")
        if a_set and (a_set[0] < 0 or a_set[-1] >= self.n):
            raise DimensionError(f"subsystem indices must lie in 0..{self.n - 1}")
        object.__setattr__(self, 'a_set', a_set)

    @classmethod
    def of(cls, n: int, qubits: Iterable[int]) -> 'Bipartition':
        """Build from any iterable of indices, sorting and dropping repeats."""
        return cls(n, tuple(sorted(set(int(q) for q in qubits))))

    @property
    def n_a(self) -> int:
        return len(self.a_set)

    @property
    def b_set(self) -> Tuple[int, ...]:
        inside = set(self.a_set)
        return tuple(q for q in range(self.n) if q not in inside)

    def complement(self) -> 'Bipartition':
        return Bipartition(self.n, self.b_set)

    def with_qubit(self, qubit: int) -> 'Bipartition':
        return Bipartition.of(self.n, self.a_set + (qubit,))


@dataclass(frozen=True)
class LogicalConstraint:
    """Logical-Z supports appended to hz to fix the logical computational basis state."""
    rows: BitMatrix

    def check(self, code: CssCode) -> bool:
        """True iff every row commutes with hx and none is a stabilizer."""
        if self.rows.cols != code.n:
            raise DimensionError(f"constraint width {self.rows.cols} does not match n={code.n}")
        commuting = (code.hx @ self.rows.T).is_zero()
        stabilizers = RowSpace(code.hz)
        return commuting and not any(stabilizers.contains(self.rows.row(i)) for i in range(self.rows.rows))


@dataclass
class Spectrum:
    eigenvalues: np.ndarray

    def entropy(self, tolerance: float = DEFAULT_TOLERANCE) -> float:
        values = self.eigenvalues[self.eigenvalues > tolerance]
        return float(-np.sum(values * np.log2(values)))

    def total(self) -> float:
        return float(np.sum(self.eigenvalues))


@dataclass
class CanonicalBlocks:
    """Block form (I W~A 0 0 / 0 WA WB 0 / 0 0 W~B I) of a check matrix.

    Columns are ordered by `col_perm` = deleted_a + kept A + kept B + deleted_b. Rows
    are the A-only block, the boundary block and the B-only block; `boundary_rows`
    lists the source rows that seeded the boundary block before the deleted columns
    were cleared from it.
    """
    col_perm: List[int]
    row_blocks: Tuple[int, int, int]
    boundary_rows: List[int]
    wa: BitMatrix
    wb: BitMatrix
    tilde_wa: BitMatrix
    tilde_wb: BitMatrix
    deleted_a: List[int] = field(default_factory=list)
    deleted_b: List[int] = field(default_factory=list)
    kept_a: List[int] = field(default_factory=list)
    kept_b: List[int] = field(default_factory=list)
    a_set: Tuple[int, ...] = ()

    @property
    def entropy(self) -> int:
        return rank(self.wa)

    def reassemble(self) -> BitMatrix:
        """Full block matrix in `col_perm` column order."""
        s_a, s_ab, s_b = self.row_blocks
        left, right = len(self.deleted_a), len(self.deleted_b)
        t_a, t_b = len(self.kept_a), len(self.kept_b)
        blocks = np.zeros((s_a + s_ab + s_b, left + t_a + t_b + right), dtype=np.uint8)
        blocks[:s_a, :left] = np.eye(s_a, dtype=np.uint8)
        blocks[:s_a, left:left + t_a] = self.tilde_wa.to_dense()
        blocks[s_a:s_a + s_ab, left:left + t_a] = self.wa.to_dense()
        blocks[s_a:s_a + s_ab, left + t_a:left + t_a + t_b] = self.wb.to_dense()
        blocks[s_a + s_ab:, left + t_a:left + t_a + t_b] = self.tilde_wb.to_dense()
        blocks[s_a + s_ab:, left + t_a + t_b:] = np.eye(s_b, dtype=np.uint8)
        return BitMatrix.from_dense(blocks)


def _stacked(hz: BitMatrix, constraints: Optional[LogicalConstraint]) -> BitMatrix:
    if constraints is None or constraints.rows.rows == 0:
        return hz
    if constraints.rows.cols != hz.cols:
        raise DimensionError(f"constraint width {constraints.rows.cols} does not match {hz.cols}")
    return hz.vstack(constraints.rows)


def _check_width(matrix: BitMatrix, part: Bipartition):
    if matrix.cols != part.n:
        raise DimensionError(f"matrix has {matrix.cols} columns but the partition covers {part.n} qubits")


def logical_constraint(code: CssCode, selection: Union[str, Sequence[int]] = 'all',
                       reduction_passes: int = 4) -> Optional[LogicalConstraint]:
    """Constraint from all, none, or the listed logical-Z operators of a code."""
    if selection == 'none':
        return None
    logicals = logical_z_operators(code, reduction_passes)
    if selection == 'all':
        return LogicalConstraint(logicals)
    indices = [int(i) for i in selection]
    bad = [i for i in indices if not 0 <= i < logicals.rows]
    if bad:
        raise ParameterError(f"logical indices {bad} outside 0..{logicals.rows - 1} for {code.name}")
    return LogicalConstraint(logicals.select_rows(indices))


class EntropyCalculator:
    """Evaluates the rank formula for many bipartitions of one check matrix."""

    def __init__(self, hz: BitMatrix, constraints: Optional[LogicalConstraint] = None):
        self.logger = logging.getLogger(__name__)
        self.matrix = _stacked(hz, constraints)
        self.n = self.matrix.cols
        self.dense = self.matrix.to_dense()
        self.rank_total = rank(self.matrix)

    def restricted_rank(self, columns: Sequence[int]) -> int:
        if len(columns) == 0:
            return 0
        return rank(BitMatrix.from_dense(self.dense[:, np.asarray(columns, dtype=np.intp)]))

    def entropy(self, part: Bipartition) -> int:
        """S_A = rank(H_A) + rank(H_B) - rank(H)."""
        _check_width(self.matrix, part)
        if part.n_a == 0 or part.n_a == self.n:
            return 0
        return self.restricted_rank(part.a_set) + self.restricted_rank(part.b_set) - self.rank_total


def entropy_rank(hz: BitMatrix, part: Bipartition, constraints: Optional[LogicalConstraint] = None) -> int:
    return EntropyCalculator(hz, constraints).entropy(part)


def entropy_codespace_identity(hz: BitMatrix, part: Bipartition,
                               constraints: Optional[LogicalConstraint] = None) -> int:
    """dim C - dim C_A - dim C_B, with C_A the codewords supported inside A."""
    matrix = _stacked(hz, constraints)
    _check_width(matrix, part)
    whole = nullspace_basis(matrix).rows
    inside_a = nullspace_basis(matrix.select_columns(part.a_set)).rows
    inside_b = nullspace_basis(matrix.select_columns(part.b_set)).rows
    return whole - inside_a - inside_b


def _supported_rows(dense: np.ndarray, inside: Sequence[int], outside: Sequence[int]) -> Tuple[np.ndarray, List[int]]:
    """Reduced basis of the row-space vectors vanishing on `outside`, with their pivot qubits."""
    order = list(outside) + list(inside)
    reduced = rref(BitMatrix.from_dense(dense[:, order].reshape(dense.shape[0], len(order))))
    picks = [(row, col) for row, col in enumerate(reduced.pivot_cols) if col >= len(outside)]
    if not picks:
        return np.zeros((0, dense.shape[1]), dtype=np.uint8), []
    reordered = reduced.matrix.to_dense()[[row for row, _ in picks]]
    rows = np.zeros((len(picks), dense.shape[1]), dtype=np.uint8)
    rows[:, order] = reordered
    return rows, [order[col] for _, col in picks]


class _EchelonBasis:
    """Incremental span test; each stored row is zero on every earlier pivot."""

    def __init__(self):
        self.rows = []
        self.pivots = []

    def reduce(self, vector: np.ndarray) -> np.ndarray:
        vector = vector.copy()
        for pivot, row in zip(self.pivots, self.rows):
            if vector[pivot]:
                vector ^= row
        return vector

    def add(self, vector: np.ndarray) -> bool:
        residue = self.reduce(vector)
        nonzero = np.flatnonzero(residue)
        if nonzero.size == 0:
            return False
        self.rows.append(residue)
        self.pivots.append(int(nonzero[0]))
        return True


def canonicalize(hz: BitMatrix, part: Bipartition,
                 constraints: Optional[LogicalConstraint] = None) -> CanonicalBlocks:
    """Bring the check matrix into the A-only / boundary / B-only block form.

    A-only rows come first and delete their lowest-index qubit, then B-only rows, then
    the boundary rows, from which every deleted column is eliminated. rank(wa) and
    rank(wb) both equal the entanglement entropy.
    """
    matrix = _stacked(hz, constraints)
    _check_width(matrix, part)
    dense = matrix.to_dense()
    a_set, b_set = list(part.a_set), list(part.b_set)

    a_rows, deleted_a = _supported_rows(dense, a_set, b_set)
    b_rows, deleted_b = _supported_rows(dense, b_set, a_set)

    span = _EchelonBasis()
    for row in np.vstack([a_rows, b_rows]):
        span.add(row)
    boundary_rows, boundary = [], []
    for index, row in enumerate(dense):
        if span.add(row):
            boundary_rows.append(index)
            boundary.append(row.copy())
    boundary = np.array(boundary, dtype=np.uint8).reshape(len(boundary), matrix.cols)

    for rows, pivots in ((a_rows, deleted_a), (b_rows, deleted_b)):
        for row, qubit in zip(rows, pivots):
            hit = boundary[:, qubit] == 1
            boundary[hit] ^= row

    removed = set(deleted_a) | set(deleted_b)
    kept_a = [q for q in a_set if q not in removed]
    kept_b = [q for q in b_set if q not in removed]

    def block(rows: np.ndarray, columns: List[int]) -> BitMatrix:
        return BitMatrix.from_dense(rows[:, columns].reshape(rows.shape[0], len(columns)))

    blocks = CanonicalBlocks(
        col_perm=deleted_a + kept_a + kept_b + deleted_b,
        row_blocks=(len(a_rows), len(boundary), len(b_rows)),
        boundary_rows=boundary_rows,
        wa=block(boundary, kept_a),
        wb=block(boundary, kept_b),
        tilde_wa=block(a_rows, kept_a),
        tilde_wb=block(b_rows, kept_b),
        deleted_a=deleted_a,
        deleted_b=deleted_b,
        kept_a=kept_a,
        kept_b=kept_b,
        a_set=part.a_set,
    )
    logger.debug(f"Canonical form with row blocks {blocks.row_blocks}")
    return blocks


def dense_oracle(code: CssCode, part: Bipartition, constraints: Optional[LogicalConstraint] = None,
                 max_qubits: int = DEFAULT_ORACLE_MAX_QUBITS,
                 tolerance: float = DEFAULT_TOLERANCE) -> Spectrum:
    """Eigenvalues of the reduced density matrix on A of the uniform codeword superposition."""
    n = code.n
    if n > max_qubits:
        raise OracleSizeError(f"dense oracle holds at most {max_qubits} qubits, code has {n}")
    _check_width(code.hz, part)
    basis = nullspace_basis(_stacked(code.hz, constraints)).to_dense().astype(np.int64)
    dimension = basis.shape[0]
    coefficients = (np.arange(2 ** dimension)[:, None] >> np.arange(dimension)[::-1]) & 1
    codewords = (coefficients @ basis) % 2
    places = np.int64(1) << np.arange(n, dtype=np.int64)[::-1]
    state = np.zeros(2 ** n)
    state[codewords @ places] = 1.0 / np.sqrt(2 ** dimension)

    order = list(part.a_set) + list(part.b_set)
    amplitudes = state.reshape((2,) * n).transpose(order).reshape(2 ** part.n_a, 2 ** (n - part.n_a))
    if part.n_a <= n - part.n_a:
        gram = amplitudes @ amplitudes.T
    else:
        gram = amplitudes.T @ amplitudes
    eigenvalues = np.linalg.eigvalsh(gram)
    return Spectrum(eigenvalues[eigenvalues > tolerance])
