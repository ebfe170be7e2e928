import networkx as nx
import numpy as np
import pytest

from core.code_graph import GraphPartition, incidence_graph
from core.css_codes import ToricParams, build_named, build_toric
from core.entropy import Bipartition, EntropyCalculator
from core.exceptions import ClassificationError, ParameterError
from core.sampling import (LARGE_A, LARGE_A_TABLE, SMALL_A, SMALL_A_TABLE, classify_transfer, derive_seed,
                           grow_subsystem, grown_subsystem_sequence, infer_regime, measure_delta_i,
                           random_subsystem)


class TestSeeds:
    def test_deterministic(self):
        assert derive_seed(5, 1, 2) == derive_seed(5, 1, 2)

    def test_indices_give_distinct_seeds(self):
        seeds = {derive_seed(5, n_a, sample) for n_a in range(10) for sample in range(10)}
        assert len(seeds) == 100

    def test_negative(self):
        with pytest.raises(ParameterError):
            derive_seed(-1)


class TestRandomSubsystem:
    def test_extremes(self):
        assert random_subsystem(10, 0, 1).a_set == ()
        assert random_subsystem(10, 10, 1).a_set == tuple(range(10))

    def test_reproducible(self):
        assert random_subsystem(50, 20, 8) == random_subsystem(50, 20, 8)
        assert random_subsystem(50, 20, 8).n_a == 20

    def test_too_large(self):
        with pytest.raises(ParameterError):
            random_subsystem(5, 6, 0)


class TestGrownSubsystems:
    def test_toric_growth(self, toric_code):
        code = toric_code(6)
        calculator = EntropyCalculator(code.hz)
        state = grow_subsystem(code, seed=4, calculator=calculator)
        sizes = [n_a for n_a, _ in state.history]
        assert sizes[0] == 4
        assert all(later > earlier for earlier, later in zip(sizes, sizes[1:]))
        assert sizes[-1] >= code.n / 2
        assert all(size < code.n / 2 for size in sizes[:-1])
        assert not set(state.waiting_set) & state.visited_stabilizers
        for part, (_, entropy) in zip(state.checkpoints, state.history):
            assert entropy == calculator.entropy(part)

    def test_deterministic_per_seed(self, toric_code):
        code = toric_code(5)
        first = grown_subsystem_sequence(code, 11)
        assert first == grown_subsystem_sequence(code, 11)

    def test_bb_growth_adds_at_most_six_qubits(self):
        code = build_named('[[72,12,6]]')
        sizes = [0] + [part.n_a for part in grown_subsystem_sequence(code, 2)]
        assert max(b - a for a, b in zip(sizes, sizes[1:])) <= 6

    def test_checkpoints_stay_connected(self):
        code = build_named('[[72,12,6]]')
        dense = code.hz.to_dense()
        for part in grown_subsystem_sequence(code, 6):
            inside = set(part.a_set)
            tanner = nx.Graph()
            tanner.add_nodes_from(inside)
            for row in dense:
                support = [q for q in np.flatnonzero(row) if q in inside]
                nx.add_path(tanner, support)
            assert nx.is_connected(tanner)


class TestClassifyTransfer:
    @pytest.fixture
    def lattice(self, toric_lattice):
        return toric_lattice(6)

    def transfer(self, lattice, qubits, qubit, regime):
        graph = incidence_graph(lattice.code.hz)
        part = GraphPartition.from_qubits(graph, qubits)
        case = classify_transfer(graph, part, qubit, regime)
        measured = measure_delta_i(EntropyCalculator(lattice.code.hz), Bipartition.of(lattice.n, qubits), qubit)
        return case, measured

    def test_isolated_edge_small_a(self, lattice):
        case, measured = self.transfer(lattice, [lattice.h(0, 0)], lattice.h(3, 3), SMALL_A)
        assert (case.class_id, case.case_id, case.predicted_delta_i) == ('I', 1, 0)
        assert measured == 0

    def test_closing_a_cycle(self, lattice):
        star = lattice.star(3, 3)
        case, measured = self.transfer(lattice, star[:3], star[3], SMALL_A)
        assert (case.class_id, case.case_id, case.predicted_delta_i) == ('IV', 10, 1)
        assert case.degrees == (1, 1)
        assert measured == 1

    def test_last_qubit_of_b(self, lattice):
        qubit = lattice.v(2, 2)
        rest = [q for q in range(lattice.n) if q != qubit]
        case, measured = self.transfer(lattice, rest, qubit, LARGE_A)
        assert (case.class_id, case.case_id, case.predicted_delta_i) == ('I', 1, 2)
        assert measured == 2

    def test_small_a_needs_connected_b(self, lattice):
        graph = incidence_graph(lattice.code.hz)
        left_in_b = {lattice.h(0, 0), lattice.h(3, 3)}
        part = GraphPartition.from_qubits(graph, [q for q in range(lattice.n) if q not in left_in_b])
        with pytest.raises(ClassificationError):
            classify_transfer(graph, part, lattice.h(0, 0), SMALL_A)
        assert classify_transfer(graph, part, lattice.h(0, 0), LARGE_A).class_id == 'I'

    def test_already_in_a(self, lattice):
        graph = incidence_graph(lattice.code.hz)
        part = GraphPartition.from_qubits(graph, [0])
        with pytest.raises(ClassificationError):
            classify_transfer(graph, part, 0, SMALL_A)

    def test_non_toric_graph(self, hamming_code):
        graph = incidence_graph(hamming_code.hz.select_columns([1, 2, 3, 4]))
        with pytest.raises(ClassificationError):
            classify_transfer(graph, GraphPartition(frozenset()), 1, SMALL_A)

    def test_unknown_regime(self, lattice):
        graph = incidence_graph(lattice.code.hz)
        with pytest.raises(ClassificationError):
            classify_transfer(graph, GraphPartition(frozenset()), 0, 'medium-A')

    def test_tables_have_fourteen_cases(self):
        assert sorted(case for case, _ in SMALL_A_TABLE.values()) == list(range(1, 15))
        assert sorted(case for case, _ in LARGE_A_TABLE.values()) == list(range(1, 15))


def sample_transfers(d, regime, attempts, seed, max_size=10):
    """Yield (case, measured) for random transfers that meet the regime's preconditions."""
    code = build_toric(ToricParams(d))
    graph = incidence_graph(code.hz)
    calculator = EntropyCalculator(code.hz)
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        chosen = rng.choice(code.n, size=int(rng.integers(1, max_size + 1)), replace=False).tolist()
        qubits = chosen if regime == SMALL_A else [q for q in range(code.n) if q not in chosen]
        b_side = [q for q in range(code.n) if q not in set(qubits)]
        qubit = int(rng.choice(b_side))
        part = GraphPartition.from_qubits(graph, qubits)
        try:
            case = classify_transfer(graph, part, qubit, regime)
        except ClassificationError:
            continue
        if not case.classified:
            continue
        yield case, measure_delta_i(calculator, Bipartition.of(code.n, qubits), qubit)


class TestTransferPredictions:
    @pytest.mark.parametrize('regime', [SMALL_A, LARGE_A])
    def test_predictions_match(self, regime):
        results = list(sample_transfers(6, regime, 400, seed=1))
        assert len(results) > 50
        for case, measured in results:
            assert case.predicted_delta_i == measured, case

    def test_infer_regime(self, toric_lattice):
        lattice = toric_lattice(6)
        graph = incidence_graph(lattice.code.hz)
        part = GraphPartition.from_qubits(graph, [lattice.h(0, 0)])
        assert infer_regime(graph, part, lattice.h(3, 3)) == SMALL_A

    @pytest.mark.slow
    @pytest.mark.parametrize('regime', [SMALL_A, LARGE_A])
    def test_ten_thousand_transfers(self, regime):
        checked = 0
        for case, measured in sample_transfers(6, regime, 14000, seed=7):
            assert case.predicted_delta_i == measured, case
            checked += 1
        assert checked >= 10000
