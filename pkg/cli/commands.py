import logging
import sys
from typing import Optional, Sequence, TextIO

from cli.parser import UsageError, parse_args
from config.analysis_config import AnalysisConfig
from config.run_config import RunConfig
from core.code_graph import (GraphPartition, duplicate_qubits, duplicated_graph, entropy_graph,
                             incidence_graph)
from core.code_io import read_code, read_matrix, write_code, write_graph
from core.css_codes import (BbParams, CssCode, QcParams, ToricParams, build_bb, build_named, build_qc,
                            build_toric, estimate_distance_ub, validate)
from core.entropy import (Bipartition, EntropyCalculator, LogicalConstraint, canonicalize, dense_oracle,
                          entropy_codespace_identity, logical_constraint)
from core.exceptions import EntropyToolkitError
from core.experiments import ExperimentRunner, write_csv
from core.sampling import derive_seed, grow_subsystem, random_subsystem

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_IO = 3


class CommandRunner:
    """Dispatches a parsed command line to the library and prints key=value results."""

    def __init__(self, settings: Optional[AnalysisConfig] = None, stdout: Optional[TextIO] = None):
        self.logger = logging.getLogger(__name__)
        self.settings = settings or AnalysisConfig.from_env()
        self.stdout = stdout

    def _emit(self, **values):
        line = ' '.join(f"{key}={'none' if value is None else value}" for key, value in values.items())
        print(line, file=self.stdout or sys.stdout)

    def run(self, config: RunConfig) -> int:
        handler = getattr(self, f"_run_{config.subcommand.replace('-', '_')}", None)
        if handler is None:
            self.logger.error(f"Unknown subcommand {config.subcommand}")
            return EXIT_USAGE
        try:
            return handler(config)
        except UsageError as e:
            self.logger.error(str(e))
            return EXIT_USAGE
        except EntropyToolkitError as e:
            self.logger.error(f"{config.subcommand} failed: {str(e)}")
            return EXIT_DOMAIN
        except OSError as e:
            self.logger.error(f"{config.subcommand} I/O error: {str(e)}")
            return EXIT_IO

    def _workers(self, config: RunConfig) -> int:
        return config.workers if config.workers is not None else self.settings.workers

    def _constraints(self, code: CssCode, selection: str) -> Optional[LogicalConstraint]:
        """`none`, `all`, a comma list of logical indices, or a matrix file of rows."""
        if selection in ('none', 'all'):
            return logical_constraint(code, selection, self.settings.logical_reduction_passes)
        if all(part.strip().isdigit() for part in selection.split(',')):
            indices = [int(part) for part in selection.split(',')]
            return logical_constraint(code, indices, self.settings.logical_reduction_passes)
        constraint = LogicalConstraint(read_matrix(selection))
        if not constraint.check(code):
            self.logger.warning(f"Rows in {selection} are not all logical Z operators of {code.name}")
        return constraint

    def _run_construct(self, config: RunConfig) -> int:
        params = config.params
        if params.get('named'):
            code = build_named(params['named'])
        else:
            values = params['family_params']
            family = params['family']
            if family == 'toric':
                code = build_toric(ToricParams(**values))
            elif family == 'bb':
                code = build_bb(BbParams(**values))
            else:
                code = build_qc(QcParams(**values))
        write_code(code, config.out_path)
        self._emit(name=code.name, n=code.n, k=code.k)
        return EXIT_OK

    def _run_validate(self, config: RunConfig) -> int:
        code = read_code(config.code_path)
        report = validate(code)
        self._emit(n=report.n, k=report.k, rank_hx=report.rank_hx, rank_hz=report.rank_hz,
                   commutation='OK' if report.commutation_ok else 'FAIL',
                   anticommuting_pairs=report.anticommuting_pairs)
        return EXIT_OK if report.is_valid else EXIT_DOMAIN

    def _run_entropy(self, config: RunConfig) -> int:
        code = read_code(config.code_path)
        part = Bipartition.of(code.n, config.params['subsystem'])
        constraints = self._constraints(code, config.params['logical'])
        method = config.params['method']
        if method == 'rank':
            value = EntropyCalculator(code.hz, constraints).entropy(part)
        elif method == 'canonical':
            value = canonicalize(code.hz, part, constraints).entropy
        elif method == 'identity':
            value = entropy_codespace_identity(code.hz, part, constraints)
        elif method == 'graph':
            blocks = canonicalize(code.hz, part, constraints)
            graph = duplicated_graph(duplicate_qubits(blocks))
            value = entropy_graph(graph, GraphPartition.from_qubits(graph, part.a_set))
        else:
            oracle = self.settings.get_oracle_config()
            spectrum = dense_oracle(code, part, constraints, oracle['max_qubits'], oracle['tolerance'])
            value = f"{spectrum.entropy(oracle['tolerance']):.6f}"
        self._emit(S_A=value)
        return EXIT_OK

    def _run_graph(self, config: RunConfig) -> int:
        code = read_code(config.code_path)
        subsystem = config.params.get('subsystem')
        part = Bipartition.of(code.n, subsystem) if subsystem is not None else None
        if config.params['duplicate']:
            constraints = self._constraints(code, config.params['logical'])
            graph = duplicated_graph(duplicate_qubits(canonicalize(code.hz, part, constraints)))
        else:
            graph = incidence_graph(code.hz)
        write_graph(graph, config.out_path)
        values = {'vertices': graph.vertex_count, 'edges': graph.edge_count}
        if part is not None:
            values['S_A'] = entropy_graph(graph, GraphPartition.from_qubits(graph, part.a_set))
        self._emit(**values)
        return EXIT_OK

    def _run_sample(self, config: RunConfig) -> int:
        code = read_code(config.code_path)
        size = config.params.get('size')
        for index in range(config.params['count']):
            seed = derive_seed(config.seed, index)
            if config.params['mode'] == 'random':
                parts = [random_subsystem(code.n, size, seed)]
            else:
                checkpoints = grow_subsystem(code, seed).checkpoints
                if size is not None:
                    checkpoints = [part for part in checkpoints if part.n_a <= size][-1:]
                parts = checkpoints
            for part in parts:
                print(','.join(str(q) for q in part.a_set), file=self.stdout or sys.stdout)
        return EXIT_OK

    def _run_scan(self, config: RunConfig) -> int:
        code = read_code(config.code_path)
        constraints = self._constraints(code, config.params['logical'])
        runner = ExperimentRunner(code, constraints, self._workers(config))
        decimals = self.settings.get_output_config()['csv_decimals']
        fit = None
        if config.params['mode'] == 'scaling':
            records, fit = runner.scaling_scan(config.params['repeats'], config.seed)
        else:
            records = runner.discrepancy_scan(config.params['grid'], config.params['samples'], config.seed)
        write_csv(records, config.out_path, code.name, code.n, fit, decimals)
        if config.params['mode'] == 'scaling':
            gamma = f"{fit.gamma:.{decimals}f}" if fit is not None else None
            self._emit(records=len(records), gamma=gamma)
        else:
            self._emit(records=len(records))
        return EXIT_OK

    def _run_oracle_check(self, config: RunConfig) -> int:
        code = read_code(config.code_path)
        constraints = self._constraints(code, config.params['logical'])
        oracle = self.settings.get_oracle_config()
        calculator = EntropyCalculator(code.hz, constraints)
        trials = config.params['trials']
        agree = 0
        for trial in range(trials):
            seed = derive_seed(config.seed, trial)
            n_a = int(derive_seed(seed, 0) % (code.n + 1))
            part = random_subsystem(code.n, n_a, seed)
            exact = calculator.entropy(part)
            spectrum = dense_oracle(code, part, constraints, oracle['max_qubits'], oracle['tolerance'])
            if abs(spectrum.entropy(oracle['tolerance']) - exact) <= oracle['tolerance'] * max(1, code.n):
                agree += 1
            else:
                self.logger.warning(f"Trial {trial}: rank formula {exact} disagrees with the oracle on {part.a_set}")
        self._emit(agree=f"{agree}/{trials}")
        return EXIT_OK if agree == trials else EXIT_DOMAIN

    def _run_distance(self, config: RunConfig) -> int:
        code = read_code(config.code_path)
        samples = config.params.get('samples')
        if samples is None:
            samples = self.settings.get_sampling_config()['distance_samples']
        self._emit(d_ub=estimate_distance_ub(code, samples, config.seed))
        return EXIT_OK


def execute(argv: Sequence[str], settings: Optional[AnalysisConfig] = None,
            stdout: Optional[TextIO] = None) -> int:
    """Parse and run one command line; every failure becomes a nonzero exit code."""
    logger = logging.getLogger(__name__)
    try:
        config = parse_args(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except EntropyToolkitError as e:
        logger.error(f"Bad configuration: {str(e)}")
        return EXIT_DOMAIN
    except OSError as e:
        logger.error(f"Cannot read input: {str(e)}")
        return EXIT_IO
    return CommandRunner(settings, stdout).run(config)


def log_level_from_argv(argv: Sequence[str]) -> Optional[str]:
    for index, token in enumerate(argv):
        if token == '--log-level' and index + 1 < len(argv):
            return argv[index + 1].upper()
        if token.startswith('--log-level='):
            return token.split('=', 1)[1].upper()
    return None
