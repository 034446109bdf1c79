"""
Parámetros de corrida: conversión de ángulos, manifiestos y archivos de barrido.
"""

import argparse
import json
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

from src.experiment_harness.scans import ScanKind, ScanResult, ScanSpec
from src.projection_analysis.amplitudes import magic_angle
from src.utils.errors import InvalidScan, ParameterError

logger = logging.getLogger(__name__)

DEFAULT_SEED = 12345
MAGIC_TOKEN = "magic"
OUTPUT_FORMATS = ('csv', 'json')


def parse_angle(token) -> float:
    """
    Convierte un ángulo de la interfaz (grados o "magic") a radianes.

    Raises:
        ParameterError: si el valor no es un número finito
    """
    if isinstance(token, str) and token.strip().lower() == MAGIC_TOKEN:
        return magic_angle()
    try:
        value = float(token)
    except (TypeError, ValueError):
        raise ParameterError(f"Ángulo inválido: '{token}' (grados o '{MAGIC_TOKEN}')")
    if not math.isfinite(value):
        raise ParameterError(f"Ángulo no finito: {token}")
    return math.radians(value)


def angle_arg(token: str) -> float:
    """Tipo de argparse para ángulos."""
    try:
        return parse_angle(token)
    except ParameterError as e:
        raise argparse.ArgumentTypeError(str(e))


def finite_float(token: str) -> float:
    """Tipo de argparse para números finitos."""
    try:
        value = float(token)
    except ValueError:
        raise argparse.ArgumentTypeError(f"Número inválido: '{token}'")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"Número no finito: '{token}'")
    return value


def pick(*values, default=None):
    """Primer valor no nulo (flag > preset > config > default)."""
    for value in values:
        if value is not None:
            return value
    return default


@dataclass
class RunConfig:
    """Una invocación de la CLI, ya resuelta."""
    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    output: Optional[Path] = None
    format: str = 'csv'
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.format not in OUTPUT_FORMATS:
            raise ParameterError(f"Formato desconocido: {self.format}")
        for key, value in self.params.items():
            if key.endswith('_deg') and not math.isfinite(value):
                raise ParameterError(f"{key} no es finito")

    def manifest(self, started_at: datetime, **extra) -> Dict:
        """Manifiesto JSON de la corrida."""
        return {
            'command': self.command,
            'params': self.params,
            'output': str(self.output) if self.output else None,
            'format': self.format,
            'seed': self.seed,
            'started_at': started_at.isoformat(timespec='seconds'),
            'finished_at': datetime.now().isoformat(timespec='seconds'),
            **extra
        }


def manifest_path(data_path: Path) -> Path:
    data_path = Path(data_path)
    return data_path.with_name(f"{data_path.stem}.manifest.json")


def write_manifest(data_path: Path, manifest: Dict) -> Path:
    path = manifest_path(data_path)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(manifest, f, indent=2, ensure_ascii=False)
    logger.info(f"Manifiesto guardado en: {path}")
    return path


def load_scan_file(path: Path, scan_kind: Optional[str] = None) -> ScanResult:
    """
    Lee un barrido (CSV o JSON) junto con su manifiesto (<nombre>.manifest.json).

    Sin manifiesto, el tipo de barrido debe indicarse explícitamente.
    """
    path = Path(path)
    spec = None
    sidecar = manifest_path(path)
    if sidecar.exists():
        with open(sidecar, 'r', encoding='utf-8') as f:
            payload = json.load(f)
        if 'scan' in payload:
            spec = ScanSpec.from_dict(payload['scan'])
    else:
        logger.warning(f"Sin manifiesto para {path}; se usa el tipo indicado")

    kind = scan_kind or (spec.scan_kind if spec else None)
    if kind is None:
        raise InvalidScan(f"No se puede inferir el tipo de barrido de {path}; use --kind")
    return ScanResult.from_file(path, ScanKind(kind), spec)
