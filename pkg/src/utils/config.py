"""
Carga de configuración (config.yaml + variables de entorno).
"""

import logging
import os
from pathlib import Path
from typing import Dict, Optional

import yaml
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parents[2]
DEFAULT_CONFIG_PATH = PROJECT_ROOT / "config" / "config.yaml"
DEFAULT_PRESETS_PATH = PROJECT_ROOT / "config" / "scan_presets.yaml"

OUTPUT_DIR_ENV = "QUTRIT_SIM_OUTPUT_DIR"


def load_config(config_path: Optional[Path] = None) -> Dict:
    """Carga la configuración desde config.yaml."""
    config_path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    if not config_path.exists():
        logger.warning(f"No se encontró {config_path}, usando valores por defecto")
        return {}
    with open(config_path, 'r') as f:
        return yaml.safe_load(f) or {}


def load_scan_presets(presets_path: Optional[Path] = None) -> Dict[str, Dict]:
    """Carga los barridos predefinidos, indexados por nombre."""
    presets_path = Path(presets_path) if presets_path else DEFAULT_PRESETS_PATH
    with open(presets_path, 'r') as f:
        presets = yaml.safe_load(f) or {}
    return {p['name']: p for p in presets.get('scans', [])}


def resolve_output_dir(config: Dict, override: Optional[str] = None) -> Path:
    """
    Directorio de salida: flag > variable de entorno > config.yaml > 'results'.

    Args:
        config: Configuración cargada
        override: Valor pasado por línea de comandos

    Returns:
        Ruta del directorio de salida (no se crea aquí)
    """
    load_dotenv()
    if override:
        return Path(override)
    env_value = os.getenv(OUTPUT_DIR_ENV)
    if env_value:
        return Path(env_value)
    return Path(config.get('output', {}).get('directory', 'results'))
