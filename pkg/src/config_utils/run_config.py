import os
from copy import deepcopy
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from src.errors import UsageError

SEED_ENV = 'EBKIT_SEED'

DEFAULT_CONFIG = {
    'format': 'csv',
    'seed': 0,
    'flags': {
        'sigma2': 1.0,
        'n': None,
        'nu': None,
        'k': None,
        'distance': 'l2',
        'standardize': 'none',
        'carrier': 'uniform',
        'level': 0.95,
        'pi0': 1.0,
        'grid': None,
    },
}


@dataclass(frozen=True)
class RunConfig:
    """
    Attributes:
        command (str): Subcommand name.
        input (Optional[str]): Input file.
        output (Optional[str]): Output file; the run directory is used when absent.
        format (str): 'csv' or 'json'.
        seed (int): Seed of every random draw of the run.
        flags (Dict[str, Any]): Command-specific settings.
    """
    command: str
    input: Optional[str] = None
    output: Optional[str] = None
    format: str = 'csv'
    seed: int = 0
    flags: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def resolve_seed(seed: Optional[int], environ: Mapping[str, str] = os.environ) -> int:
    raw = environ.get(SEED_ENV)
    if raw is not None and raw.strip() != '':
        try:
            return int(raw)
        except ValueError as err:
            raise UsageError(f'{SEED_ENV} must be an integer, got {raw!r}') from err
    return DEFAULT_CONFIG['seed'] if seed is None else int(seed)


def prepare_run_config(command: str, args: Mapping[str, Any], environ: Mapping[str, str] = os.environ) -> RunConfig:
    """
    Merges parsed command-line values over the defaults.

    Args:
        command (str): Subcommand name.
        args: Parsed arguments; keys other than input, output, json and seed become flags.
        environ: Environment consulted for the seed override.

    Returns:
        RunConfig: The frozen configuration of this run.
    """
    res = deepcopy(DEFAULT_CONFIG)
    values = dict(args)
    flags = res['flags']
    for key, value in values.items():
        if key in ('input', 'output', 'json', 'seed', 'command', 'log_dir'):
            continue
        if value is not None or key not in flags:
            flags[key] = value
    return RunConfig(
        command=command,
        input=values.get('input'),
        output=values.get('output'),
        format='json' if values.get('json') else res['format'],
        seed=resolve_seed(values.get('seed'), environ),
        flags=flags,
    )


def parse_params(text: Optional[str]) -> Dict[str, float]:
    """Parses 'k=v,k2=v2' into a dict of floats."""
    res: Dict[str, float] = {}
    if not text:
        return res
    for item in text.split(','):
        key, sep, value = item.partition('=')
        if not sep or not key.strip():
            raise UsageError(f'malformed parameter {item!r}; expected key=value')
        try:
            res[key.strip()] = float(value)
        except ValueError as err:
            raise UsageError(f'parameter {key.strip()} is not a number: {value!r}') from err
    return res


def parse_grid(text: str) -> Tuple[float, float, int]:
    """Parses 'lo:hi:n'."""
    parts = text.split(':')
    if len(parts) != 3:
        raise UsageError(f'grid must look like lo:hi:n, got {text!r}')
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as err:
        raise UsageError(f'grid must look like lo:hi:n, got {text!r}') from err


def parse_points(text: str) -> np.ndarray:
    """Parses either 'lo:hi:n' or a comma-separated list of numbers."""
    if ':' in text:
        lo, hi, n = parse_grid(text)
        return np.linspace(lo, hi, n)
    try:
        return np.array([float(v) for v in text.split(',') if v.strip()])
    except ValueError as err:
        raise UsageError(f'cannot parse points {text!r}') from err
