import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

import networkx as nx
import numpy as np

from core.code_graph import GraphPartition, LabeledGraph, connected_components
from core.css_codes import CssCode
from core.entropy import Bipartition, EntropyCalculator
from core.exceptions import ClassificationError, ParameterError

logger = logging.getLogger(__name__)

SMALL_A = 'small-A'
LARGE_A = 'large-A'
UNCLASSIFIED = 'unclassified'

# (class, sorted endpoint degrees) -> (case, predicted change of the discrepancy)
# small-A degrees count A-edges at each endpoint, large-A degrees count B-edges
SMALL_A_TABLE: Dict[Tuple[str, Tuple[int, int]], Tuple[int, int]] = {
    ('I', (0, 0)): (1, 0),
    ('II', (0, 1)): (2, 0),
    ('II', (0, 2)): (3, 0),
    ('II', (0, 3)): (4, 1),
    ('III', (1, 1)): (5, 0),
    ('III', (1, 2)): (6, 0),
    ('III', (2, 2)): (7, 0),
    ('III', (1, 3)): (8, 1),
    ('III', (2, 3)): (9, 1),
    ('IV', (1, 1)): (10, 1),
    ('IV', (1, 2)): (11, 1),
    ('IV', (2, 2)): (12, 1),
    ('IV', (1, 3)): (13, 2),
    ('IV', (2, 3)): (14, 2),
}

LARGE_A_TABLE: Dict[Tuple[str, Tuple[int, int]], Tuple[int, int]] = {
    ('I', (1, 1)): (1, 2),
    ('II', (1, 2)): (2, 2),
    ('II', (1, 3)): (3, 2),
    ('II', (1, 4)): (4, 1),
    ('III', (2, 2)): (5, 2),
    ('III', (2, 3)): (6, 2),
    ('III', (2, 4)): (7, 1),
    ('III', (3, 4)): (8, 1),
    ('III', (4, 4)): (9, 1),
    ('IV', (2, 2)): (10, 1),
    ('IV', (2, 3)): (11, 1),
    ('IV', (2, 4)): (12, 0),
    ('IV', (3, 4)): (13, 0),
    ('IV', (4, 4)): (14, 0),
}


@dataclass
class GrowthState:
    waiting_set: List[int] = field(default_factory=list)
    visited_stabilizers: Set[int] = field(default_factory=set)
    a_set: Set[int] = field(default_factory=set)
    history: List[Tuple[int, Optional[int]]] = field(default_factory=list)
    checkpoints: List[Bipartition] = field(default_factory=list)


@dataclass(frozen=True)
class TransferCase:
    class_id: str
    case_id: int
    predicted_delta_i: Optional[int]
    regime: str
    degrees: Tuple[int, int] = (0, 0)

    @property
    def classified(self) -> bool:
        return self.class_id != UNCLASSIFIED


def derive_seed(master_seed: int, *indices: int) -> int:
    """Independent 63-bit seed for one sample, fanned out from the master seed."""
    if master_seed < 0 or any(i < 0 for i in indices):
        raise ParameterError(f"seeds and sample indices must be non-negative: {master_seed}, {indices}")
    sequence = np.random.SeedSequence(master_seed, spawn_key=tuple(indices))
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def random_subsystem(n: int, n_a: int, seed: int) -> Bipartition:
    """Uniformly random subsystem of n_a of the n qubits."""
    if not 0 <= n_a <= n:
        raise ParameterError(f"subsystem size {n_a} outside 0..{n}")
    if seed < 0:
        raise ParameterError(f"seed must be non-negative, got {seed}")
    rng = np.random.default_rng(seed)
    return Bipartition.of(n, rng.choice(n, size=n_a, replace=False))


def grow_subsystem(code: CssCode, seed: int, calculator: Optional[EntropyCalculator] = None) -> GrowthState:
    """Absorb stabilizer supports from a waiting set until A holds half the qubits.

    Waiting stabilizers are processed in ascending row order, one checkpoint per
    stabilizer that enlarges A. The next waiting set is every unvisited stabilizer
    touching A.
    """
    dense = code.hz.to_dense()
    supports = [np.flatnonzero(row).tolist() for row in dense]
    touching = [np.flatnonzero(dense[:, q]).tolist() for q in range(code.n)]
    candidates = [row for row, support in enumerate(supports) if support]
    state = GrowthState()
    if not candidates:
        return state

    rng = np.random.default_rng(seed)
    state.waiting_set = [int(rng.choice(candidates))]
    half = code.n / 2
    while state.waiting_set:
        for row in state.waiting_set:
            state.visited_stabilizers.add(row)
            before = len(state.a_set)
            state.a_set.update(supports[row])
            if len(state.a_set) == before:
                continue
            part = Bipartition.of(code.n, state.a_set)
            entropy = calculator.entropy(part) if calculator is not None else None
            state.checkpoints.append(part)
            state.history.append((part.n_a, entropy))
            if part.n_a >= half:
                state.waiting_set = []
                return state
        neighbours = set()
        for qubit in state.a_set:
            neighbours.update(touching[qubit])
        state.waiting_set = sorted(neighbours - state.visited_stabilizers)
    return state


def grown_subsystem_sequence(code: CssCode, seed: int) -> List[Bipartition]:
    return grow_subsystem(code, seed).checkpoints


def _require_toric_style(g: LabeledGraph):
    if g.boundary_vertex is not None or g.vertex_count != g.row_vertices:
        raise ClassificationError("transfer classification needs every column to have weight 2")
    degree = np.zeros(g.vertex_count, dtype=np.int64)
    for u, v, _ in g.edges:
        degree[u] += 1
        degree[v] += 1
    if np.any(degree != 4):
        raise ClassificationError("transfer classification needs a 4-regular graph")


def _transfer_edge(g: LabeledGraph, part: GraphPartition, qubit: int) -> int:
    indices = g.qubit_edges().get(qubit, [])
    if len(indices) != 1:
        raise ClassificationError(f"qubit {qubit} must label exactly one edge, found {len(indices)}")
    if indices[0] in part.a_edges:
        raise ClassificationError(f"qubit {qubit} is already in A")
    return indices[0]


def _degree(g: LabeledGraph, edge_subset, vertex: int) -> int:
    return sum((u == vertex) + (v == vertex) for u, v, _ in (g.edges[i] for i in edge_subset))


def _connected_between(g: LabeledGraph, edge_subset, u: int, v: int) -> bool:
    sub = g.subgraph(edge_subset)
    return u in sub and v in sub and nx.has_path(sub, u, v)


def _small_a_ready(g: LabeledGraph, part: GraphPartition, edge: int) -> bool:
    b_edges = part.b_edges(g)
    rest = b_edges - {edge}
    return (connected_components(g, b_edges) == 1 and bool(rest)
            and connected_components(g, rest) == 1)


def _large_a_ready(g: LabeledGraph, part: GraphPartition) -> bool:
    return connected_components(g, part.a_edges) == 1


def infer_regime(g: LabeledGraph, part: GraphPartition, qubit: int) -> Optional[str]:
    """Regime whose preconditions the transfer meets, small-A first; None if neither."""
    edge = _transfer_edge(g, part, qubit)
    if _small_a_ready(g, part, edge):
        return SMALL_A
    if _large_a_ready(g, part):
        return LARGE_A
    return None


def classify_transfer(g: LabeledGraph, part: GraphPartition, qubit: int, regime: str) -> TransferCase:
    """Table case of moving one qubit from B to A on a toric-style graph."""
    _require_toric_style(g)
    edge = _transfer_edge(g, part, qubit)
    u, v, _ = g.edges[edge]
    if regime == SMALL_A:
        if not _small_a_ready(g, part, edge):
            raise ClassificationError("small-A regime needs B connected before and after the transfer")
        degrees = tuple(sorted((_degree(g, part.a_edges, u), _degree(g, part.a_edges, v))))
        if degrees[1] == 0:
            class_id = 'I'
        elif degrees[0] == 0:
            class_id = 'II'
        elif _connected_between(g, part.a_edges, u, v):
            class_id = 'IV'
        else:
            class_id = 'III'
        table = SMALL_A_TABLE
    elif regime == LARGE_A:
        if not _large_a_ready(g, part):
            raise ClassificationError("large-A regime needs A connected")
        b_edges = part.b_edges(g)
        degrees = tuple(sorted((_degree(g, b_edges, u), _degree(g, b_edges, v))))
        bridge = not _connected_between(g, b_edges - {edge}, u, v)
        if not bridge:
            class_id = 'IV'
        elif degrees == (1, 1):
            class_id = 'I'
        elif degrees[0] == 1:
            class_id = 'II'
        else:
            class_id = 'III'
        table = LARGE_A_TABLE
    else:
        raise ClassificationError(f"unknown regime '{regime}'")

    entry = table.get((class_id, degrees))
    if entry is None:
        logger.debug(f"{regime} transfer of qubit {qubit} with degrees {degrees} is not tabulated")
        return TransferCase(UNCLASSIFIED, 0, None, regime, degrees)
    return TransferCase(class_id, entry[0], entry[1], regime, degrees)


def measure_delta_i(calculator: EntropyCalculator, part: Bipartition, qubit: int) -> int:
    """Change of the discrepancy n_A - S_A when `qubit` joins A."""
    before = calculator.entropy(part)
    after = calculator.entropy(part.with_qubit(qubit))
    return 1 - (after - before)
