import logging
from pathlib import Path
from typing import List, Union

from core.code_graph import LabeledGraph
from core.css_codes import CssCode
from core.exceptions import CodeFormatError
from core.gf2 import BitMatrix

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def format_code(code: CssCode) -> str:
    """Text of a `.css` file: name, n, then the HX and HZ blocks."""
    lines = [code.name, str(code.n), f"HX {code.hx.rows}"]
    lines.extend(code.hx.row_strings())
    lines.append(f"HZ {code.hz.rows}")
    lines.extend(code.hz.row_strings())
    return '\n'.join(lines) + '\n'


def parse_code(text: str) -> CssCode:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if len(lines) < 3:
        raise CodeFormatError("a code file needs a name, n and an HX block")
    name = lines[0]
    try:
        n = int(lines[1])
    except ValueError as e:
        raise CodeFormatError(f"qubit count '{lines[1]}' is not an integer") from e
    hx, cursor = _parse_block(lines, 2, 'HX', n)
    hz, cursor = _parse_block(lines, cursor, 'HZ', n)
    if cursor != len(lines):
        raise CodeFormatError(f"{len(lines) - cursor} unexpected trailing lines")
    return CssCode(name, hx, hz)


def _parse_block(lines: List[str], cursor: int, tag: str, n: int):
    if cursor >= len(lines):
        raise CodeFormatError(f"missing '{tag} <rows>' line")
    header = lines[cursor].split()
    if len(header) != 2 or header[0] != tag:
        raise CodeFormatError(f"expected '{tag} <rows>', got '{lines[cursor]}'")
    try:
        rows = int(header[1])
    except ValueError as e:
        raise CodeFormatError(f"row count '{header[1]}' is not an integer") from e
    body = lines[cursor + 1:cursor + 1 + rows]
    if len(body) != rows:
        raise CodeFormatError(f"{tag} announces {rows} rows, found {len(body)}")
    for index, row in enumerate(body):
        if len(row) != n:
            raise CodeFormatError(f"{tag} row {index} has {len(row)} columns, expected {n}")
    matrix = BitMatrix.from_rows(body) if rows else BitMatrix.zeros(0, n)
    return matrix, cursor + 1 + rows


def read_code(path: PathLike) -> CssCode:
    code = parse_code(Path(path).read_text(encoding='utf-8'))
    logger.info(f"Read {code.name} (n={code.n}) from {path}")
    return code


def write_code(code: CssCode, path: PathLike):
    Path(path).write_text(format_code(code), encoding='utf-8')
    logger.info(f"Wrote {code.name} to {path}")


def read_matrix(path: PathLike) -> BitMatrix:
    return BitMatrix.from_text(Path(path).read_text(encoding='utf-8'))


def write_matrix(matrix: BitMatrix, path: PathLike):
    Path(path).write_text(matrix.to_text(), encoding='utf-8')


def write_graph(graph: LabeledGraph, path: PathLike):
    Path(path).write_text(graph.to_text(), encoding='utf-8')


def read_graph(path: PathLike) -> LabeledGraph:
    return LabeledGraph.from_text(Path(path).read_text(encoding='utf-8'))


def parse_index_list(text: str) -> List[int]:
    """Qubit indices separated by commas and/or whitespace."""
    tokens = text.replace(',', ' ').split()
    try:
        return [int(token) for token in tokens]
    except ValueError as e:
        raise CodeFormatError(f"subsystem entries must be integers: {str(e)}") from e


def read_subsystem(spec: str) -> List[int]:
    """Indices from `0,1,2` or from `@path` naming a file of indices."""
    if spec.startswith('@'):
        return parse_index_list(Path(spec[1:]).read_text(encoding='utf-8'))
    return parse_index_list(spec)
