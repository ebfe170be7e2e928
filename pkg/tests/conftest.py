from functools import lru_cache

import numpy as np
import pytest

from core.css_codes import CssCode, ToricParams, build_toric
from core.gf2 import BitMatrix, nullspace_basis

HAMMING_ROWS = ['1110100', '1101010', '1011001']


class ToricLattice:
    """Edge indices of the d x d periodic lattice used by build_toric."""

    def __init__(self, d: int):
        self.d = d
        self.code = _toric(d)

    @property
    def n(self) -> int:
        return 2 * self.d * self.d

    def h(self, i: int, j: int) -> int:
        d = self.d
        return (i % d) * d + (j % d)

    def v(self, i: int, j: int) -> int:
        d = self.d
        return d * d + (i % d) * d + (j % d)

    def plaquette(self, i: int, j: int):
        return [self.h(i, j), self.h(i + 1, j), self.v(i, j), self.v(i, j + 1)]

    def star(self, i: int, j: int):
        return [self.h(i, j), self.h(i, j - 1), self.v(i, j), self.v(i - 1, j)]


@lru_cache(maxsize=None)
def _toric(d: int) -> CssCode:
    return build_toric(ToricParams(d))


def random_css_code(n: int, z_rows: int, x_rows: int, seed: int) -> CssCode:
    """hz at random, hx drawn from combinations of ker(hz) so the checks commute."""
    rng = np.random.default_rng(seed)
    hz = BitMatrix.from_dense(rng.integers(0, 2, size=(z_rows, n)))
    kernel = nullspace_basis(hz).to_dense().astype(np.int64)
    if len(kernel) == 0:
        hx = BitMatrix.zeros(0, n)
    else:
        mix = rng.integers(0, 2, size=(x_rows, len(kernel)))
        hx = BitMatrix.from_dense((mix @ kernel) % 2)
    return CssCode(f"random-{seed}", hx, hz)


@pytest.fixture
def toric_lattice():
    return ToricLattice


@pytest.fixture
def toric_code():
    return _toric


@pytest.fixture
def hamming_code():
    checks = BitMatrix.from_rows(HAMMING_ROWS)
    return CssCode('hamming-7', checks, checks)


@pytest.fixture
def random_code():
    return random_css_code


@pytest.fixture
def code_file(tmp_path):
    """Write a code to a .css file inside tmp_path and return the path."""
    from core.code_io import write_code

    def _write(code: CssCode, name: str = 'code.css'):
        path = tmp_path / name
        write_code(code, path)
        return path
    return _write
