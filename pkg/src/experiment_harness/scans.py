"""
Barridos de solapamiento, retardo y fase birrefringente.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from math import degrees, exp, radians
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.projection_analysis.projector import ProjectionSetting, detection_probability
from src.state_library.biphoton_states import named_state, spdc_second_order
from src.utils.errors import InvalidScan

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ['parameter', 'probability', 'rate_hz', 'counts', 'sigma_counts']
CSV_FLOAT_FORMAT = '%.12g'


class ScanKind(str, Enum):
    OVERLAP = "overlap"
    DELAY = "delay"
    DELTA = "delta"


@dataclass(frozen=True)
class ScanSpec:
    """
    Especificación de un barrido.

    La grilla de `delta` está en radianes; la de `delay` en las mismas
    unidades que `coherence_sigma`; la de `overlap` son valores de γ.
    """
    scan_kind: ScanKind
    grid: Tuple[float, ...]
    setting: ProjectionSetting
    state_source: str = 'psi00'
    coherence_sigma: float = 1.0

    def __post_init__(self):
        try:
            object.__setattr__(self, 'scan_kind', ScanKind(self.scan_kind))
        except ValueError:
            raise InvalidScan(f"Tipo de barrido desconocido: {self.scan_kind}")
        grid = tuple(float(x) for x in self.grid)
        if not grid:
            raise InvalidScan("Grilla vacía")
        steps = np.diff(grid)
        if len(grid) > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
            raise InvalidScan("La grilla debe ser estrictamente monótona")
        if self.scan_kind == ScanKind.DELAY and self.coherence_sigma <= 0:
            raise InvalidScan(f"coherence_sigma debe ser positivo ({self.coherence_sigma})")
        if self.scan_kind == ScanKind.OVERLAP and not all(0.0 <= g <= 1.0 for g in grid):
            raise InvalidScan("Valores de γ fuera de [0, 1]")
        object.__setattr__(self, 'grid', grid)

    def overlap_at(self, delay: float) -> float:
        """γ(d) = exp(−d²/(2σ²))."""
        return exp(-delay ** 2 / (2 * self.coherence_sigma ** 2))

    def point(self, parameter: float):
        """Estado y configuración para un punto de la grilla."""
        if self.scan_kind == ScanKind.DELTA:
            return spdc_second_order(parameter), self.setting
        state = named_state(self.state_source)
        if self.scan_kind == ScanKind.OVERLAP:
            return state, self.setting.replace(overlap=parameter)
        return state, self.setting.replace(overlap=self.overlap_at(parameter))

    def to_dict(self) -> Dict:
        """Descripción para el manifiesto (ángulos en grados)."""
        grid = [degrees(x) for x in self.grid] if self.scan_kind == ScanKind.DELTA else list(self.grid)
        return {
            'scan_kind': self.scan_kind.value,
            'grid': grid,
            'state_source': 'phi2' if self.scan_kind == ScanKind.DELTA else self.state_source,
            'coherence_sigma': self.coherence_sigma,
            'setting': {
                'theta1_deg': degrees(self.setting.theta1),
                'theta2_deg': degrees(self.setting.theta2),
                'pre_pbs_phase_deg': degrees(self.setting.pre_pbs_phase),
                'overlap': self.setting.overlap,
                'reflect_h': self.setting.reflect_h,
                'reflect_v': self.setting.reflect_v,
            }
        }

    @classmethod
    def from_dict(cls, payload: Dict) -> "ScanSpec":
        """
        Reconstruye la especificación desde el manifiesto (ángulos y δ en grados).

        Raises:
            InvalidScan: si el tipo de barrido no es válido
        """
        try:
            kind = ScanKind(payload['scan_kind'])
        except ValueError:
            raise InvalidScan(f"Tipo de barrido desconocido en el manifiesto: {payload['scan_kind']}")
        grid = payload['grid']
        if kind == ScanKind.DELTA:
            grid = [radians(x) for x in grid]
        s = payload['setting']
        setting = ProjectionSetting(
            theta1=radians(s['theta1_deg']), theta2=radians(s['theta2_deg']),
            pre_pbs_phase=radians(s.get('pre_pbs_phase_deg', 0.0)), overlap=s.get('overlap', 1.0),
            reflect_h=s.get('reflect_h', 0.0), reflect_v=s.get('reflect_v', 1.0)
        )
        return cls(kind, tuple(grid), setting, payload.get('state_source', 'psi00'),
                   payload.get('coherence_sigma', 1.0))


@dataclass
class ScanResult:
    """Resultado de un barrido: una fila por punto con las columnas de RESULT_COLUMNS."""
    frame: pd.DataFrame
    scan_kind: ScanKind
    spec: Optional[ScanSpec] = None

    @property
    def points(self) -> List[Tuple[float, float, float, float, float]]:
        return list(self.frame[RESULT_COLUMNS].itertuples(index=False, name=None))

    @property
    def has_counts(self) -> bool:
        return bool(self.frame['counts'].notna().all())

    def to_csv(self, path: Path) -> Path:
        """Escribe el CSV (δ en grados)."""
        frame = self.frame[RESULT_COLUMNS].copy()
        if self.scan_kind == ScanKind.DELTA:
            frame['parameter'] = np.degrees(frame['parameter'])
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        logger.info(f"Barrido guardado en: {path}")
        return path

    def to_json(self, path: Path) -> Path:
        """Escribe los puntos como registros JSON con precisión completa (δ en grados)."""
        frame = self.frame[RESULT_COLUMNS].copy()
        if self.scan_kind == ScanKind.DELTA:
            frame['parameter'] = np.degrees(frame['parameter'])
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_json(path, orient='records', double_precision=15, indent=2)
        logger.info(f"Barrido guardado en: {path}")
        return path

    @classmethod
    def from_csv(cls, path: Path, scan_kind: ScanKind, spec: Optional[ScanSpec] = None) -> "ScanResult":
        """Lee un CSV escrito por `to_csv`."""
        try:
            frame = pd.read_csv(path)
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise InvalidScan(f"{path} no es un CSV de barrido válido: {e}")
        return cls._from_frame(frame, path, scan_kind, spec)

    @classmethod
    def from_json(cls, path: Path, scan_kind: ScanKind, spec: Optional[ScanSpec] = None) -> "ScanResult":
        """Lee los registros JSON escritos por `to_json`."""
        try:
            frame = pd.read_json(path, orient='records', precise_float=True)
        except ValueError as e:
            raise InvalidScan(f"{path} no es un JSON de barrido válido: {e}")
        return cls._from_frame(frame, path, scan_kind, spec)

    @classmethod
    def from_file(cls, path: Path, scan_kind: ScanKind, spec: Optional[ScanSpec] = None) -> "ScanResult":
        """Elige el lector según la extensión (.json o CSV)."""
        if Path(path).suffix.lower() == '.json':
            return cls.from_json(path, scan_kind, spec)
        return cls.from_csv(path, scan_kind, spec)

    @classmethod
    def _from_frame(cls, frame: pd.DataFrame, path: Path, scan_kind: ScanKind,
                    spec: Optional[ScanSpec]) -> "ScanResult":
        missing = [c for c in RESULT_COLUMNS if c not in frame.columns]
        if missing:
            raise InvalidScan(f"Columnas faltantes en {path}: {', '.join(missing)}")
        scan_kind = ScanKind(scan_kind)
        # en JSON las columnas sin conteos llegan como null
        try:
            frame = frame[RESULT_COLUMNS].apply(pd.to_numeric)
        except (ValueError, TypeError) as e:
            raise InvalidScan(f"Valores no numéricos en {path}: {e}")
        if scan_kind == ScanKind.DELTA:
            frame['parameter'] = np.radians(frame['parameter'])
        return cls(frame, scan_kind, spec)


def _empty_frame(grid: Sequence[float], probabilities: Sequence[float]) -> pd.DataFrame:
    return pd.DataFrame({
        'parameter': list(grid),
        'probability': list(probabilities),
        'rate_hz': np.nan,
        'counts': np.nan,
        'sigma_counts': np.nan,
    })


def run_scan(spec: ScanSpec) -> ScanResult:
    """
    Probabilidad de detección cuádruple en cada punto de la grilla.

    Args:
        spec: Especificación del barrido

    Returns:
        ScanResult solo con probabilidades
    """
    logger.info(f"Barrido '{spec.scan_kind.value}' con {len(spec.grid)} puntos...")
    probabilities = []
    for parameter in spec.grid:
        state, setting = spec.point(parameter)
        probability = detection_probability(state, setting)
        logger.debug(f"  {spec.scan_kind.value} = {parameter:.6g} → p = {probability:.9f}")
        probabilities.append(probability)
    return ScanResult(_empty_frame(spec.grid, probabilities), spec.scan_kind, spec)


def delay_scan_contrast(result: ScanResult, column: str = 'probability') -> float:
    """
    Cociente entre el valor a retardo cero y el fondo a retardo grande.

    El fondo es el promedio de los dos extremos de la grilla.
    """
    frame = result.frame
    center = frame.loc[frame['parameter'].abs().idxmin(), column]
    background = (frame[column].iloc[0] + frame[column].iloc[-1]) / 2
    return float(center / background)


def rejection_ratio(projected: ScanResult, rejected: ScanResult, column: str = 'rate_hz') -> float:
    """Cociente entre el estado proyectado y uno rechazado a retardo cero."""
    def at_zero(result: ScanResult) -> float:
        frame = result.frame
        return float(frame.loc[frame['parameter'].abs().idxmin(), column])
    return at_zero(projected) / at_zero(rejected)
