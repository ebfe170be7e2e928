import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.exceptions import DimensionError, ParameterError
from core.gf2 import BitMatrix, RowSpace, nullspace_basis, rank

logger = logging.getLogger(__name__)

# distance sampling draws coefficient vectors in fixed-size blocks so that the first
# s samples never depend on the requested total
_SAMPLE_BLOCK = 1024


@dataclass(frozen=True)
class CssCode:
    """A pair of parity-check matrices sharing n qubit columns."""
    name: str
    hx: BitMatrix
    hz: BitMatrix

    def __post_init__(self):
        if self.hx.cols != self.hz.cols:
            raise DimensionError(
                f"hx has {self.hx.cols} columns but hz has {self.hz.cols}"
            )

    @property
    def n(self) -> int:
        return self.hx.cols

    @cached_property
    def rank_hx(self) -> int:
        return rank(self.hx)

    @cached_property
    def rank_hz(self) -> int:
        return rank(self.hz)

    @cached_property
    def k(self) -> int:
        return self.n - self.rank_hx - self.rank_hz


@dataclass(frozen=True)
class ToricParams:
    d: int

    def validate(self):
        if self.d < 2:
            raise ParameterError(f"toric lattice side must be at least 2, got d={self.d}")


@dataclass(frozen=True)
class BbParams:
    """Bivariate-bicycle parameters for A = x^a + y^b + y^c and B = y^d + x^e + x^f."""
    l: int
    m: int
    a: int
    b: int
    c: int
    d: int
    e: int
    f: int

    def normalized(self) -> 'BbParams':
        if self.l < 1 or self.m < 1:
            raise ParameterError(f"cyclic dimensions must be positive, got l={self.l}, m={self.m}")
        l, m = self.l, self.m
        reduced = BbParams(l, m, self.a % l, self.b % m, self.c % m,
                           self.d % m, self.e % l, self.f % l)
        a_terms = {(reduced.a, 0), (0, reduced.b), (0, reduced.c)}
        b_terms = {(0, reduced.d), (reduced.e, 0), (reduced.f, 0)}
        if len(a_terms) != 3 or len(b_terms) != 3:
            raise ParameterError(f"polynomials of {self} do not have three distinct monomials")
        return reduced


@dataclass(frozen=True)
class QcParams:
    P: int
    sigma: int
    tau: int
    J: int
    K: int

    @property
    def r(self) -> int:
        return multiplicative_order(self.sigma, self.P)

    def validate(self):
        P, sigma, tau = self.P, self.sigma, self.tau
        if P < 2:
            raise ParameterError(f"circulant size must be at least 2, got P={P}")
        if gcd(sigma, P) != 1 or gcd(tau, P) != 1:
            raise ParameterError(f"sigma={sigma} and tau={tau} must both be units modulo {P}")
        r = self.r
        powers = [pow(sigma, i, P) for i in range(r)]
        for i in range(1, r):
            if gcd(powers[i] - 1, P) != 1:
                raise ParameterError(f"sigma^{i} - 1 shares a factor with P={P}")
        if tau % P in powers:
            raise ParameterError(f"tau={tau} is a power of sigma={sigma} modulo {P}")
        if not (1 <= self.J <= r and 1 <= self.K <= r):
            raise ParameterError(f"J={self.J} and K={self.K} must lie in 1..{r}")

    def predicted_k(self) -> int:
        L, P = 2 * self.r, self.P
        return L * P - (self.J * P + self.K * P - self.J - self.K + 2)


@dataclass
class ValidationReport:
    n: int
    k: int
    rank_hx: int
    rank_hz: int
    commutation_ok: bool
    anticommuting_pairs: int
    hx_row_weights: Dict[int, int] = field(default_factory=dict)
    hx_col_weights: Dict[int, int] = field(default_factory=dict)
    hz_row_weights: Dict[int, int] = field(default_factory=dict)
    hz_col_weights: Dict[int, int] = field(default_factory=dict)

    @property
    def is_valid(self) -> bool:
        return self.commutation_ok


BB_TABLE: Dict[str, BbParams] = {
    '[[72,12,6]]': BbParams(6, 6, 3, 1, 2, 3, 1, 2),
    '[[90,8,10]]': BbParams(15, 3, 9, 1, 2, 0, 2, 7),
    '[[108,8,10]]': BbParams(9, 6, 3, 1, 2, 3, 1, 2),
    '[[144,12,12]]': BbParams(12, 6, 3, 1, 2, 3, 1, 2),
    '[[288,12,18]]': BbParams(12, 12, 3, 2, 7, 3, 1, 2),
    '[[360,12,<=24]]': BbParams(30, 6, 9, 1, 2, 3, 25, 26),
    '[[756,16,<=34]]': BbParams(21, 18, 3, 10, 17, 5, 3, 19),
}

QC_TABLE: Dict[str, QcParams] = {
    '[[42,4]]': QcParams(7, 2, 5, 3, 3),
    '[[78,4]]': QcParams(13, 3, 2, 3, 3),
    '[[114,4]]': QcParams(19, 7, 2, 3, 3),
    '[[258,4]]': QcParams(43, 6, 2, 3, 3),
    '[[582,4]]': QcParams(97, 35, 2, 3, 3),
    '[[104,6]]': QcParams(13, 5, 2, 4, 4),
    '[[136,6]]': QcParams(17, 4, 2, 4, 4),
    '[[232,6]]': QcParams(29, 12, 2, 4, 4),
    '[[424,6]]': QcParams(53, 23, 2, 4, 4),
    '[[584,6]]': QcParams(73, 27, 2, 4, 4),
}


def shift_matrix(size: int) -> np.ndarray:
    """Cyclic shift S with row i holding its one at column (i+1) mod size."""
    return np.roll(np.eye(size, dtype=np.int64), 1, axis=1)


def multiplicative_order(value: int, modulus: int) -> int:
    if modulus < 2 or gcd(value, modulus) != 1:
        raise ParameterError(f"{value} has no multiplicative order modulo {modulus}")
    order, power = 1, value % modulus
    while power != 1:
        power = power * value % modulus
        order += 1
    return order


def build_toric(p: ToricParams) -> CssCode:
    """Toric code on a d x d periodic lattice.

    Horizontal edge (i, j) joins vertices (i, j)-(i, j+1) and has index i*d + j; vertical
    edge (i, j) joins (i, j)-(i+1, j) and has index d*d + i*d + j. Plaquette (i, j) sits
    below-right of vertex (i, j).
    """
    p.validate()
    d = p.d
    n = 2 * d * d

    def horizontal(i: int, j: int) -> int:
        return (i % d) * d + (j % d)

    def vertical(i: int, j: int) -> int:
        return d * d + (i % d) * d + (j % d)

    hz = np.zeros((d * d, n), dtype=np.uint8)
    hx = np.zeros((d * d, n), dtype=np.uint8)
    for i in range(d):
        for j in range(d):
            row = i * d + j
            hz[row, [horizontal(i, j), horizontal(i + 1, j), vertical(i, j), vertical(i, j + 1)]] = 1
            hx[row, [horizontal(i, j), horizontal(i, j - 1), vertical(i, j), vertical(i - 1, j)]] = 1
    code = CssCode(f"toric-d{d}", BitMatrix.from_dense(hx), BitMatrix.from_dense(hz))
    logger.info(f"Built {code.name} with n={n}")
    return code


def build_bb(p: BbParams) -> CssCode:
    """Bivariate-bicycle code with hx = [A|B] and hz = [B^T|A^T]."""
    q = p.normalized()
    x = np.kron(shift_matrix(q.l), np.eye(q.m, dtype=np.int64))
    y = np.kron(np.eye(q.l, dtype=np.int64), shift_matrix(q.m))

    def power(base: np.ndarray, exponent: int) -> np.ndarray:
        return np.linalg.matrix_power(base, exponent)

    a_block = (power(x, q.a) + power(y, q.b) + power(y, q.c)) % 2
    b_block = (power(y, q.d) + power(x, q.e) + power(x, q.f)) % 2
    hx = np.hstack([a_block, b_block])
    hz = np.hstack([b_block.T, a_block.T])
    code = CssCode(f"bb-{q.l}x{q.m}", BitMatrix.from_dense(hx), BitMatrix.from_dense(hz))
    logger.info(f"Built {code.name} with n={code.n}")
    return code


def qc_model_matrices(p: QcParams) -> Tuple[np.ndarray, np.ndarray]:
    """Integer model matrices (C for the Z checks, D for the X checks), entries in Z_P."""
    p.validate()
    P, sigma, tau, r = p.P, p.sigma, p.tau, p.r
    width = 2 * r
    c_model = np.zeros((p.J, width), dtype=np.int64)
    d_model = np.zeros((p.K, width), dtype=np.int64)
    for i in range(p.J):
        for j in range(width):
            unit = pow(sigma, (j - i) % r, P)
            c_model[i, j] = unit if j < r else tau * unit % P
    for i in range(p.K):
        for j in range(width):
            unit = pow(sigma, (i - j) % r, P)
            d_model[i, j] = (-tau * unit) % P if j < r else (-unit) % P
    return c_model, d_model


def _expand_model(model: np.ndarray, P: int) -> np.ndarray:
    identity = np.eye(P, dtype=np.uint8)
    return np.block([[np.roll(identity, int(e), axis=1) for e in row] for row in model])


def build_qc(p: QcParams) -> CssCode:
    """Quasi-cyclic code from circulant-permutation substitution of the model matrices."""
    c_model, d_model = qc_model_matrices(p)
    hz = _expand_model(c_model, p.P)
    hx = _expand_model(d_model, p.P)
    code = CssCode(f"qc-P{p.P}-s{p.sigma}-t{p.tau}", BitMatrix.from_dense(hx), BitMatrix.from_dense(hz))
    logger.info(f"Built {code.name} with n={code.n}")
    return code


def build_named(label: str) -> CssCode:
    """Build a tabulated code by its [[n,k,...]] label."""
    if label in BB_TABLE:
        return build_bb(BB_TABLE[label])
    if label in QC_TABLE:
        return build_qc(QC_TABLE[label])
    raise ParameterError(f"unknown code label {label}; known: {sorted(BB_TABLE) + sorted(QC_TABLE)}")


def _histogram(weights: np.ndarray) -> Dict[int, int]:
    return dict(sorted(Counter(int(w) for w in weights).items()))


def validate(code: CssCode) -> ValidationReport:
    """Check commutation and recompute k; failures are carried in the report."""
    overlap = code.hx @ code.hz.T
    pairs = int(overlap.row_weights().sum())
    report = ValidationReport(
        n=code.n,
        k=code.k,
        rank_hx=code.rank_hx,
        rank_hz=code.rank_hz,
        commutation_ok=pairs == 0,
        anticommuting_pairs=pairs,
        hx_row_weights=_histogram(code.hx.row_weights()),
        hx_col_weights=_histogram(code.hx.column_weights()),
        hz_row_weights=_histogram(code.hz.row_weights()),
        hz_col_weights=_histogram(code.hz.column_weights()),
    )
    if not report.commutation_ok:
        logger.warning(f"{code.name}: {pairs} anticommuting check pairs")
    return report


def logical_z_operators(code: CssCode, reduction_passes: int = 4) -> BitMatrix:
    """Independent logical-Z supports, one per logical qubit.

    Z candidates span ker(hx) and X candidates span ker(hz). Each Z candidate is paired
    with the first remaining X candidate it anticommutes with; the rest of both pools is
    then made to commute with the new pair. Unpaired Z candidates lie in rowspace(hz).
    """
    z_pool = nullspace_basis(code.hx).to_dense().astype(np.int64)
    x_pool = nullspace_basis(code.hz).to_dense().astype(np.int64)
    z_alive = np.ones(len(z_pool), dtype=bool)
    x_alive = np.ones(len(x_pool), dtype=bool)
    logicals = []
    for index in range(len(z_pool)):
        z_alive[index] = False
        g = z_pool[index].copy()
        hits = np.flatnonzero(((x_pool @ g) % 2).astype(bool) & x_alive)
        if hits.size == 0:
            continue
        partner = x_pool[hits[0]].copy()
        x_alive[hits[0]] = False
        logicals.append(g)
        z_flip = ((z_pool @ partner) % 2).astype(bool) & z_alive
        z_pool[z_flip] ^= g
        x_flip = ((x_pool @ g) % 2).astype(bool) & x_alive
        x_pool[x_flip] ^= partner
        if len(logicals) == code.k:
            break

    stabilizers = code.hz.to_dense().astype(np.int64)
    stabilizer_space = RowSpace(code.hz)
    reduced = []
    for row in logicals:
        row = _reduce_weight(row, stabilizers, reduction_passes)
        if stabilizer_space.contains(row):
            continue
        reduced.append(row)
    logger.debug(f"{code.name}: found {len(reduced)} logical Z operators")
    if not reduced:
        return BitMatrix.zeros(0, code.n)
    return BitMatrix.from_dense(np.array(reduced, dtype=np.uint8))


def _reduce_weight(row: np.ndarray, stabilizers: np.ndarray, passes: int) -> np.ndarray:
    """Greedy stabilizer multiplication while the weight keeps dropping."""
    best = row.copy()
    for _ in range(passes):
        if not len(stabilizers):
            break
        candidates = best ^ stabilizers
        weights = candidates.sum(axis=1)
        choice = int(np.argmin(weights))
        if weights[choice] >= best.sum():
            break
        best = candidates[choice]
    return best


def estimate_distance_ub(code: CssCode, samples: int, seed: int) -> Optional[int]:
    """Minimum weight over random differences of ker(hx) codewords outside rowspace(hz)."""
    if samples < 0:
        raise ParameterError(f"samples must be non-negative, got {samples}")
    if samples == 0:
        return None
    basis = nullspace_basis(code.hx).to_dense().astype(np.int64)
    dual = nullspace_basis(code.hz).to_dense().astype(np.int64)
    rng = np.random.default_rng(seed)
    best = None
    drawn = 0
    while drawn < samples:
        first = rng.integers(0, 2, size=(_SAMPLE_BLOCK, len(basis)))
        second = rng.integers(0, 2, size=(_SAMPLE_BLOCK, len(basis)))
        take = min(_SAMPLE_BLOCK, samples - drawn)
        words = ((first ^ second)[:take] @ basis) % 2
        logical = ((words @ dual.T) % 2).any(axis=1)
        if logical.any():
            weight = int(words[logical].sum(axis=1).min())
            best = weight if best is None else min(best, weight)
        drawn += take
    logger.debug(f"{code.name}: distance upper bound {best} from {samples} samples")
    return best
