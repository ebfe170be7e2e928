import argparse
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from config.run_config import SUBCOMMANDS, RunConfig, config_file_tokens, load_config_file
from core.code_io import read_subsystem
from core.exceptions import CodeFormatError

FAMILY_KEYS = {
    'toric': ('d',),
    'bb': ('l', 'm', 'a', 'b', 'c', 'd', 'e', 'f'),
    'qc': ('P', 'sigma', 'tau', 'J', 'K'),
}

# options that live on RunConfig itself rather than in params
_TOP_LEVEL = ('subcommand', 'code', 'seed', 'out', 'workers', 'config')


class UsageError(Exception):
    """Malformed command line; maps to exit code 2."""


class CliArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_family_params(text: str) -> Dict[str, int]:
    """`d=3` or `l=6,m=6,...` into integers; reports the offending token."""
    params: Dict[str, int] = {}
    for token in (t.strip() for t in text.split(',')):
        if not token:
            continue
        key, sep, value = token.partition('=')
        if not sep or not key.strip():
            raise UsageError(f"expected key=value, got '{token}'")
        try:
            params[key.strip()] = int(value)
        except ValueError:
            raise UsageError(f"malformed number in '{token}'")
    return params


def parse_grid(text: str) -> List[int]:
    """`start:stop:step` with an inclusive stop, or a comma list of sizes."""
    try:
        if ':' in text:
            parts = [int(p) for p in text.split(':')]
            if len(parts) not in (2, 3):
                raise UsageError(f"grid must be start:stop[:step], got '{text}'")
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1
            if step < 1:
                raise UsageError(f"grid step must be positive, got '{text}'")
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(',') if p.strip()]
    except ValueError:
        raise UsageError(f"malformed grid '{text}'")


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument('--workers', type=int, default=None)
    sub.add_argument('--log-level', dest='log_level', default=None,
                     choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'])
    sub.add_argument('--config', default=None)


def _add_code(sub: argparse.ArgumentParser):
    sub.add_argument('--code', required=True)


def _add_seed(sub: argparse.ArgumentParser):
    sub.add_argument('--seed', type=int, default=0)


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(prog='css-entropy', description='Entanglement entropy of CSS code states')
    subparsers = parser.add_subparsers(dest='subcommand', required=True, parser_class=CliArgumentParser)

    construct = subparsers.add_parser('construct', help='build a toric, bivariate-bicycle or quasi-cyclic code')
    construct.add_argument('--family', choices=sorted(FAMILY_KEYS))
    construct.add_argument('--params', default='')
    construct.add_argument('--named', default=None)
    construct.add_argument('--out', required=True)

    validate = subparsers.add_parser('validate', help='check commutation and recompute k')
    _add_code(validate)

    entropy = subparsers.add_parser('entropy', help='entanglement entropy of one bipartition')
    _add_code(entropy)
    entropy.add_argument('--subsystem', required=True)
    entropy.add_argument('--logical', default='none')
    entropy.add_argument('--method', choices=['rank', 'canonical', 'oracle', 'identity', 'graph'], default='rank')

    graph = subparsers.add_parser('graph', help='export the check-matrix incidence graph')
    _add_code(graph)
    graph.add_argument('--duplicate', action='store_true')
    graph.add_argument('--subsystem', default=None)
    graph.add_argument('--logical', default='none')
    graph.add_argument('--out', required=True)

    sample = subparsers.add_parser('sample', help='print random or grown subsystems')
    _add_code(sample)
    sample.add_argument('--mode', choices=['random', 'grown'], required=True)
    sample.add_argument('--size', type=int, default=None)
    sample.add_argument('--count', type=int, default=1)
    _add_seed(sample)

    scan = subparsers.add_parser('scan', help='scaling or discrepancy scan written as CSV')
    _add_code(scan)
    scan.add_argument('--mode', choices=['scaling', 'discrepancy'], required=True)
    scan.add_argument('--repeats', type=int, default=20)
    scan.add_argument('--samples', type=int, default=100)
    scan.add_argument('--grid', default=None)
    scan.add_argument('--logical', default='none')
    _add_seed(scan)
    scan.add_argument('--out', required=True)

    oracle = subparsers.add_parser('oracle-check', help='compare the rank formula with the dense oracle')
    _add_code(oracle)
    oracle.add_argument('--trials', type=int, default=50)
    oracle.add_argument('--logical', default='none')
    _add_seed(oracle)

    distance = subparsers.add_parser('distance', help='sampled upper bound on the Z distance')
    _add_code(distance)
    distance.add_argument('--samples', type=int, default=None)
    _add_seed(distance)

    for name in SUBCOMMANDS:
        _add_common(subparsers.choices[name])
    return parser


def _config_path(argv: Sequence[str]) -> Optional[str]:
    for index, token in enumerate(argv):
        if token == '--config':
            if index + 1 >= len(argv):
                raise UsageError("--config needs a file path")
            return argv[index + 1]
        if token.startswith('--config='):
            return token.split('=', 1)[1]
    return None


def _check_subcommand(args: argparse.Namespace):
    if args.subcommand == 'construct':
        if args.named is None and args.family is None:
            raise UsageError("construct needs --family or --named")
        if args.family is not None:
            params = parse_family_params(args.params)
            missing = [key for key in FAMILY_KEYS[args.family] if key not in params]
            unknown = [key for key in params if key not in FAMILY_KEYS[args.family]]
            if missing:
                raise UsageError(f"--params for {args.family} is missing {', '.join(missing)}")
            if unknown:
                raise UsageError(f"--params for {args.family} does not take {', '.join(unknown)}")
            args.family_params = params
    if args.subcommand == 'graph' and args.duplicate and args.subsystem is None:
        raise UsageError("graph --duplicate needs --subsystem")
    if args.subcommand == 'sample':
        if args.mode == 'random' and args.size is None:
            raise UsageError("sample --mode random needs --size")
        if args.count < 1:
            raise UsageError(f"--count must be positive, got {args.count}")
    if args.subcommand == 'scan':
        if args.mode == 'discrepancy':
            if args.grid is None:
                raise UsageError("scan --mode discrepancy needs --grid")
            args.grid = parse_grid(args.grid)
    if getattr(args, 'seed', 0) < 0:
        raise UsageError(f"--seed must be non-negative, got {args.seed}")
    if args.workers is not None and args.workers < 1:
        raise UsageError(f"--workers must be positive, got {args.workers}")


def parse_args(argv: Sequence[str]) -> RunConfig:
    """Parse a command line, with `--config` file settings placed before the user's flags."""
    argv = list(argv)
    if not argv:
        raise UsageError(f"a subcommand is required: {', '.join(SUBCOMMANDS)}")
    config_path = _config_path(argv)
    if config_path is not None and argv[0] in SUBCOMMANDS:
        try:
            settings = load_config_file(config_path)
        except CodeFormatError as e:
            raise UsageError(str(e))
        argv = [argv[0]] + config_file_tokens(settings) + argv[1:]

    args = build_parser().parse_args(argv)
    _check_subcommand(args)

    subsystem = getattr(args, 'subsystem', None)
    if subsystem is not None:
        try:
            args.subsystem = read_subsystem(subsystem)
        except CodeFormatError as e:
            raise UsageError(str(e))

    values = vars(args)
    params = {key: value for key, value in values.items() if key not in _TOP_LEVEL}
    return RunConfig(
        subcommand=args.subcommand,
        code_path=Path(args.code) if getattr(args, 'code', None) else None,
        params=params,
        seed=getattr(args, 'seed', 0),
        out_path=Path(args.out) if getattr(args, 'out', None) else None,
        workers=args.workers,
    )
