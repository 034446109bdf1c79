#!/usr/bin/env python3
"""
Main entry point for the qutrit projection simulator.
Configures logging and hands over to the command-line dispatcher.
"""

import argparse
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import List, Optional

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from dotenv import load_dotenv

from src.cli_io.cli import main as run_cli
from src.utils.config import load_config

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)


def setup_logging(config: dict, verbose: bool = False) -> None:
    """Configura logging a archivo y consola según config.yaml."""
    logging_config = config.get('logging', {})
    level = logging.DEBUG if verbose else getattr(logging, str(logging_config.get('level', 'INFO')).upper(), logging.INFO)
    # stdout queda libre para la salida de los comandos
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(logging_config.get('file', 'qutrit_sim.log')),
            logging.StreamHandler(sys.stderr)
        ]
    )


def startup_options(argv: List[str]) -> argparse.Namespace:
    """
    Lee --config y --verbose antes de configurar el logging.

    El resto de los argumentos queda para la CLI.
    """
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--config', type=Path)
    parser.add_argument('-v', '--verbose', action='store_true')
    try:
        options, _ = parser.parse_known_args(argv)
    except SystemExit:
        # el error de uso lo informa la CLI
        return argparse.Namespace(config=None, verbose=False)
    return options


def main(argv: Optional[List[str]] = None) -> int:
    """Main execution function."""
    argv = sys.argv[1:] if argv is None else argv
    options = startup_options(argv)
    config = load_config(options.config)
    setup_logging(config, verbose=options.verbose)

    logger.info(f"Ejecución iniciada: {datetime.now()} ({' '.join(argv) or 'sin argumentos'})")
    exit_code = run_cli(argv)
    logger.info(f"Ejecución finalizada con código {exit_code}")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
