import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from core.exceptions import CodeFormatError

logger = logging.getLogger(__name__)

SUBCOMMANDS = ('construct', 'validate', 'entropy', 'graph', 'sample', 'scan', 'oracle-check', 'distance')


@dataclass
class RunConfig:
    """One parsed command line: subcommand, code file, remaining options."""
    subcommand: str
    code_path: Optional[Path] = None
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    out_path: Optional[Path] = None
    workers: Optional[int] = None


def load_config_file(path) -> Dict[str, str]:
    """Read `key = value` lines; '#' starts a comment, blank lines are skipped."""
    values: Dict[str, str] = {}
    with open(path, 'r', encoding='utf-8') as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise CodeFormatError(f"{path}:{number}: expected 'key = value', got '{line}'")
            key, value = (part.strip() for part in line.split('=', 1))
            if not key:
                raise CodeFormatError(f"{path}:{number}: missing key")
            values[key.replace('_', '-')] = value
    logger.debug(f"Loaded {len(values)} settings from {path}")
    return values


def config_file_tokens(values: Dict[str, str]) -> List[str]:
    """Translate file settings into long-flag tokens; 'true'/'false' act as switches."""
    tokens: List[str] = []
    for key, value in values.items():
        if value.lower() == 'true':
            tokens.append(f"--{key}")
        elif value.lower() == 'false':
            continue
        else:
            tokens.extend([f"--{key}", value])
    return tokens
