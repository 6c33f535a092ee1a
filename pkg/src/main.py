#!/usr/bin/env python3
"""
Heston Hybrid Pricer - Main Entry Point
"""

import sys
import logging
from pathlib import Path
from typing import Optional, Sequence

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from cli.config import ConfigError, build_parser, parse_config
from cli.runner import run, EXIT_CONFIG, EXIT_IO

def setup_logging(verbose: bool = False):
    """Setup logging configuration (stdout carries the CSV output)"""
    level = logging.DEBUG if verbose else logging.INFO

    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stderr),
        ],
        force=True
    )

def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point"""

    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        build_parser().print_usage(sys.stderr)
        return EXIT_CONFIG

    try:
        cfg = parse_config(argv)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"error: cannot read input: {e}", file=sys.stderr)
        return EXIT_IO

    setup_logging(cfg.verbose)
    logger = logging.getLogger(__name__)

    try:
        return run(cfg)
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 1
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return 1

if __name__ == "__main__":
    sys.exit(main())
