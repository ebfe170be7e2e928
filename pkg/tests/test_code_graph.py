import numpy as np
import pytest

from core.code_graph import (GraphPartition, LabeledGraph, connected_components, cyclomatic_number,
                             duplicate_qubits, duplicated_graph, entropy_graph, incidence_graph,
                             joint_forest_entropy, spanning_forest, split_heavy_columns)
from core.css_codes import logical_z_operators
from core.entropy import Bipartition, EntropyCalculator, LogicalConstraint, canonicalize, entropy_rank
from core.exceptions import CodeFormatError, ParameterError, WeightError
from core.gf2 import BitMatrix

TRIANGLES = [(0, 1, 0), (1, 2, 1), (2, 0, 2), (3, 4, 3), (4, 5, 4), (5, 3, 5)]
# square 0-1-2-3 with the chord 0-2
FOUR_CYCLE_WITH_CHORD = [(0, 1, 0), (1, 2, 1), (2, 3, 2), (3, 0, 3), (0, 2, 4)]


class TestIncidenceGraph:
    def test_toric_grid(self, toric_code):
        graph = incidence_graph(toric_code(3).hz)
        assert graph.vertex_count == 9
        assert graph.edge_count == 18
        assert graph.boundary_vertex is None

    def test_heavy_column(self, hamming_code):
        with pytest.raises(WeightError):
            incidence_graph(hamming_code.hz)

    def test_weight_one_columns_share_a_vertex(self):
        graph = incidence_graph(BitMatrix.from_rows(['11']))
        assert graph.vertex_count == 2
        assert graph.edges == [(0, 1, 0), (0, 1, 1)]
        part = GraphPartition.from_qubits(graph, [0])
        assert entropy_graph(graph, part) == entropy_rank(BitMatrix.from_rows(['11']), Bipartition.of(2, [0])) == 1

    def test_weight_zero_column(self):
        graph = incidence_graph(BitMatrix.from_rows(['10', '10']))
        assert graph.edges == [(0, 1, 0), (2, 3, 1)]
        assert graph.vertex_count == 4

    def test_text_round_trip(self):
        graph = LabeledGraph(3, [(0, 1, 0), (1, 2, 0), (0, 2, 1)], [False, True, False])
        text = graph.to_text()
        assert text.splitlines()[0] == 'vertices 3'
        assert text.splitlines()[2] == '1 2 0 dup'
        parsed = LabeledGraph.from_text(text)
        assert parsed.edges == graph.edges
        assert parsed.duplicate == graph.duplicate

    @pytest.mark.parametrize('text', ['edges 3\n', 'vertices 2\n0 5 0\n', 'vertices 2\n0 1 x\n', 'vertices 2\n0 1 0 copy\n'])
    def test_bad_text(self, text):
        with pytest.raises(CodeFormatError):
            LabeledGraph.from_text(text)


class TestGraphQuantities:
    def test_components(self):
        graph = LabeledGraph(6, TRIANGLES)
        assert connected_components(graph, []) == 0
        assert connected_components(graph, [0]) == 1
        assert connected_components(graph, graph.all_edges()) == 2

    def test_spanning_forest_of_triangle(self):
        graph = LabeledGraph(3, TRIANGLES[:3])
        forest = spanning_forest(graph, graph.all_edges())
        assert len(forest) == 2
        assert cyclomatic_number(graph, forest) == 0

    def test_tree_is_its_own_forest(self):
        graph = LabeledGraph(4, [(0, 1, 0), (1, 2, 1), (1, 3, 2)])
        assert spanning_forest(graph, graph.all_edges()) == graph.all_edges()

    def test_four_cycle_with_chord(self):
        graph = LabeledGraph(4, FOUR_CYCLE_WITH_CHORD)
        assert len(spanning_forest(graph, graph.all_edges())) == 3
        assert cyclomatic_number(graph, graph.all_edges()) == 2

    def test_disjoint_triangles_cyclomatic(self):
        graph = LabeledGraph(6, TRIANGLES)
        assert cyclomatic_number(graph, graph.all_edges()) == 2

    def test_empty_side_gives_zero(self):
        graph = LabeledGraph(6, TRIANGLES)
        assert entropy_graph(graph, GraphPartition(frozenset())) == 0
        assert entropy_graph(graph, GraphPartition(graph.all_edges())) == 0


class TestToricGraphEntropy:
    def test_primal_region_with_one_interior_vertex(self, toric_lattice):
        # vertex star, the far half of one adjacent plaquette and one tail edge
        lattice = toric_lattice(5)
        qubits = lattice.star(2, 2) + [lattice.h(3, 2), lattice.v(2, 3), lattice.h(3, 3)]
        graph = incidence_graph(lattice.code.hx)
        part = GraphPartition.from_qubits(graph, qubits)
        shared = graph.touched_vertices(part.a_edges) & graph.touched_vertices(part.b_edges(graph))
        assert len(part.a_edges) == 7
        assert len(shared) == 6
        assert connected_components(graph, part.a_edges) == 1
        assert entropy_graph(graph, part) == 5
        assert entropy_rank(lattice.code.hx, Bipartition.of(lattice.n, qubits)) == 5

    @pytest.mark.parametrize('d', [2, 3, 4, 5, 6])
    def test_graph_rank_agreement(self, toric_code, d):
        code = toric_code(d)
        graph = incidence_graph(code.hz)
        calculator = EntropyCalculator(code.hz)
        rng = np.random.default_rng(d)
        for _ in range(200):
            n_a = int(rng.integers(0, code.n + 1))
            part = Bipartition.of(code.n, rng.choice(code.n, size=n_a, replace=False))
            edges = GraphPartition.from_qubits(graph, part.a_set)
            expected = calculator.entropy(part)
            assert entropy_graph(graph, edges) == expected
            assert joint_forest_entropy(graph, edges) == expected


class TestDuplication:
    def test_split_rule(self):
        column = BitMatrix.from_dense(np.ones((5, 1), dtype=np.uint8))
        checks = split_heavy_columns(column)
        assert checks.matrix.cols == 3
        assert checks.labels == [0, 0, 0]
        assert checks.duplicate == [False, True, True]
        assert checks.matrix.to_dense().T.tolist() == [[1, 1, 0, 0, 0], [0, 0, 1, 1, 0], [0, 0, 0, 0, 1]]

    def test_light_matrix_unchanged(self, toric_code):
        hz = toric_code(3).hz
        checks = split_heavy_columns(hz)
        assert checks.matrix == hz
        assert not any(checks.duplicate)

    def test_hamming_logical_state(self, hamming_code):
        constraint = LogicalConstraint(logical_z_operators(hamming_code))
        part = Bipartition.of(7, [0, 1, 6])
        checks = duplicate_qubits(canonicalize(hamming_code.hz, part, constraint))
        assert checks.matrix.cols == 9
        assert checks.matrix.column_weights().max() <= 2
        assert sorted(q for q, dup in zip(checks.labels, checks.duplicate) if dup) == [1, 5]
        graph = duplicated_graph(checks)
        assert graph.edge_count == 9
        edges = GraphPartition.from_qubits(graph, part.a_set)
        assert entropy_graph(graph, edges) == 2
        assert entropy_rank(hamming_code.hz, part, constraint) == 2

    def test_entropy_survives_duplication(self, random_code, hamming_code):
        codes = [hamming_code] + [random_code(9, 4, 2, seed) for seed in range(50)]
        rng = np.random.default_rng(21)
        for code in codes:
            n_a = int(rng.integers(1, code.n))
            part = Bipartition.of(code.n, rng.choice(code.n, size=n_a, replace=False))
            graph = duplicated_graph(duplicate_qubits(canonicalize(code.hz, part)))
            edges = GraphPartition.from_qubits(graph, part.a_set)
            assert entropy_graph(graph, edges) == entropy_rank(code.hz, part)

    def test_split_duplicates_rejected(self):
        graph = LabeledGraph(3, [(0, 1, 0), (1, 2, 0)], [False, True])
        with pytest.raises(ParameterError):
            entropy_graph(graph, GraphPartition(frozenset({0})))
