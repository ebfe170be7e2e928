import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx
import numpy as np

from core.entropy import CanonicalBlocks
from core.exceptions import CodeFormatError, ParameterError, WeightError
from core.gf2 import BitMatrix

logger = logging.getLogger(__name__)


@dataclass
class DuplicatedChecks:
    """Check matrix with heavy columns split; every column remembers its qubit."""
    matrix: BitMatrix
    labels: List[int]
    duplicate: List[bool]


@dataclass
class LabeledGraph:
    """Multigraph with one edge per check-matrix column.

    Vertices 0..row_vertices-1 are matrix rows. Weight-1 columns end on the shared
    `boundary_vertex`; weight-0 columns join two fresh vertices of their own.
    """
    vertex_count: int
    edges: List[Tuple[int, int, int]]
    duplicate: List[bool] = field(default_factory=list)
    row_vertices: int = 0
    boundary_vertex: Optional[int] = None

    def __post_init__(self):
        if not self.duplicate:
            self.duplicate = [False] * len(self.edges)
        for u, v, _ in self.edges:
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise CodeFormatError(f"edge ({u}, {v}) leaves the {self.vertex_count} vertices")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def all_edges(self) -> FrozenSet[int]:
        return frozenset(range(len(self.edges)))

    def qubit_edges(self) -> Dict[int, List[int]]:
        grouped: Dict[int, List[int]] = {}
        for index, (_, _, qubit) in enumerate(self.edges):
            grouped.setdefault(qubit, []).append(index)
        return grouped

    def touched_vertices(self, edge_subset: Iterable[int]) -> Set[int]:
        touched = set()
        for index in edge_subset:
            u, v, _ = self.edges[index]
            touched.add(u)
            touched.add(v)
        return touched

    def subgraph(self, edge_subset: Iterable[int]) -> nx.MultiGraph:
        """networkx view of the edge subset, keyed by edge index, touched vertices only."""
        graph = nx.MultiGraph()
        for index in sorted(edge_subset):
            u, v, qubit = self.edges[index]
            graph.add_edge(u, v, key=index, qubit=qubit)
        return graph

    def to_text(self) -> str:
        lines = [f"vertices {self.vertex_count}"]
        for (u, v, qubit), dup in zip(self.edges, self.duplicate):
            lines.append(f"{u} {v} {qubit}" + (" dup" if dup else ""))
        return '\n'.join(lines) + '\n'

    @classmethod
    def from_text(cls, text: str) -> 'LabeledGraph':
        lines = [line.split() for line in text.strip().splitlines() if line.strip()]
        if not lines or len(lines[0]) != 2 or lines[0][0] != 'vertices':
            raise CodeFormatError("graph text must start with 'vertices <count>'")
        edges, duplicate = [], []
        try:
            count = int(lines[0][1])
            for tokens in lines[1:]:
                if len(tokens) not in (3, 4) or (len(tokens) == 4 and tokens[3] != 'dup'):
                    raise CodeFormatError(f"bad edge line '{' '.join(tokens)}'")
                edges.append((int(tokens[0]), int(tokens[1]), int(tokens[2])))
                duplicate.append(len(tokens) == 4)
        except ValueError as e:
            raise CodeFormatError(f"non-integer token in graph text: {str(e)}") from e
        return cls(count, edges, duplicate)


@dataclass(frozen=True)
class GraphPartition:
    a_edges: FrozenSet[int]

    @classmethod
    def from_qubits(cls, graph: LabeledGraph, qubits: Iterable[int]) -> 'GraphPartition':
        """All edges, duplicates included, whose qubit label lies in `qubits`."""
        inside = set(qubits)
        return cls(frozenset(i for i, (_, _, q) in enumerate(graph.edges) if q in inside))

    def b_edges(self, graph: LabeledGraph) -> FrozenSet[int]:
        return graph.all_edges() - self.a_edges

    def check(self, graph: LabeledGraph):
        for qubit, indices in graph.qubit_edges().items():
            sides = {index in self.a_edges for index in indices}
            if len(sides) > 1:
                raise ParameterError(f"duplicates of qubit {qubit} are split between A and B")


def split_heavy_columns(matrix: BitMatrix, labels: Optional[List[int]] = None) -> DuplicatedChecks:
    """Split every column of weight w > 2 into ceil(w/2) columns of at most two ones.

    Ones are peeled in pairs from the lowest row index; the first piece keeps the
    column's place and the remaining pieces follow it as duplicates.
    """
    labels = list(range(matrix.cols)) if labels is None else list(labels)
    dense = matrix.to_dense()
    columns, out_labels, duplicate = [], [], []
    for col in range(matrix.cols):
        ones = np.flatnonzero(dense[:, col])
        if len(ones) <= 2:
            columns.append(dense[:, col])
            out_labels.append(labels[col])
            duplicate.append(False)
            continue
        for start in range(0, len(ones), 2):
            piece = np.zeros(matrix.rows, dtype=np.uint8)
            piece[ones[start:start + 2]] = 1
            columns.append(piece)
            out_labels.append(labels[col])
            duplicate.append(start > 0)
    if columns:
        result = BitMatrix.from_dense(np.column_stack(columns))
    else:
        result = BitMatrix.zeros(matrix.rows, 0)
    return DuplicatedChecks(result, out_labels, duplicate)


def duplicate_qubits(blocks: CanonicalBlocks) -> DuplicatedChecks:
    """Duplicate heavy columns of the reassembled canonical matrix."""
    duplicated = split_heavy_columns(blocks.reassemble(), blocks.col_perm)
    logger.debug(f"Duplication produced {duplicated.matrix.cols} columns from {len(blocks.col_perm)}")
    return duplicated


def incidence_graph(m: BitMatrix, labels: Optional[List[int]] = None,
                    duplicate: Optional[List[bool]] = None) -> LabeledGraph:
    """Read a column-weight <= 2 matrix as a vertex-edge incidence matrix."""
    weights = m.column_weights()
    heavy = np.flatnonzero(weights > 2)
    if heavy.size:
        raise WeightError(f"columns {heavy.tolist()} have weight above 2")
    labels = list(range(m.cols)) if labels is None else list(labels)
    dense = m.to_dense()
    vertex_count = m.rows
    boundary = None
    edges = []
    for col in range(m.cols):
        ones = np.flatnonzero(dense[:, col]).tolist()
        if len(ones) == 2:
            edges.append((ones[0], ones[1], labels[col]))
        elif len(ones) == 1:
            if boundary is None:
                boundary = vertex_count
                vertex_count += 1
            edges.append((ones[0], boundary, labels[col]))
        else:
            edges.append((vertex_count, vertex_count + 1, labels[col]))
            vertex_count += 2
    return LabeledGraph(vertex_count, edges, list(duplicate) if duplicate else [],
                        row_vertices=m.rows, boundary_vertex=boundary)


def duplicated_graph(checks: DuplicatedChecks) -> LabeledGraph:
    return incidence_graph(checks.matrix, checks.labels, checks.duplicate)


def connected_components(g: LabeledGraph, edge_subset: Iterable[int]) -> int:
    """Components of the subgraph formed by the edges; untouched vertices do not count."""
    return nx.number_connected_components(g.subgraph(edge_subset))


def spanning_forest(g: LabeledGraph, edge_subset: Iterable[int]) -> FrozenSet[int]:
    """Edge indices of a spanning forest (Kruskal over unit weights, edge order)."""
    forest = nx.minimum_spanning_edges(g.subgraph(edge_subset), algorithm='kruskal', keys=True, data=False)
    return frozenset(key for _, _, key in forest)


def cyclomatic_number(g: LabeledGraph, edge_subset: Iterable[int]) -> int:
    """|E| - |V| + K of the edge subset."""
    subgraph = g.subgraph(edge_subset)
    return (subgraph.number_of_edges() - subgraph.number_of_nodes()
            + nx.number_connected_components(subgraph))


def entropy_graph(g: LabeledGraph, part: GraphPartition) -> int:
    """S_A = |V_AB| - K_1 - K_2 + K."""
    part.check(g)
    a_edges = part.a_edges
    b_edges = part.b_edges(g)
    if not a_edges or not b_edges:
        return 0
    shared = g.touched_vertices(a_edges) & g.touched_vertices(b_edges)
    return (len(shared) - connected_components(g, a_edges) - connected_components(g, b_edges)
            + connected_components(g, g.all_edges()))


def joint_forest_entropy(g: LabeledGraph, part: GraphPartition) -> int:
    """Independent cycles in the union of the spanning forests of A and B."""
    part.check(g)
    joint = spanning_forest(g, part.a_edges) | spanning_forest(g, part.b_edges(g))
    return cyclomatic_number(g, joint)
