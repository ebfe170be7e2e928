import logging
import sys
from pathlib import Path

# Add the project root to the Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from cli.commands import execute, log_level_from_argv
from config.analysis_config import AnalysisConfig


def _configure_logging(level: str):
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        settings = AnalysisConfig.from_env()
    except ValueError as e:
        _configure_logging(log_level_from_argv(argv) or 'WARNING')
        logging.getLogger(__name__).error(f"Invalid ENTROPY_* environment settings: {str(e)}")
        sys.exit(1)
    _configure_logging(log_level_from_argv(argv) or settings.log_level)
    if not settings.validate_config():
        logging.getLogger(__name__).error("Invalid ENTROPY_* environment settings")
        sys.exit(1)
    sys.exit(execute(argv, settings))


if __name__ == "__main__":
    main()
