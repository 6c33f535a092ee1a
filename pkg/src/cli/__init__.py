"""Command-line configuration and run modes"""

from .config import RunConfig, RunMode, ConfigError, parse_config, parse_payoff, build_parser
from .runner import ExperimentRunner, run, EXIT_OK, EXIT_CONFIG, EXIT_IO

__all__ = ['RunConfig', 'RunMode', 'ConfigError', 'parse_config', 'parse_payoff', 'build_parser',
           'ExperimentRunner', 'run', 'EXIT_OK', 'EXIT_CONFIG', 'EXIT_IO']
