"""
Simulación de conteos de coincidencias con estadística de Poisson.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.utils.errors import ParameterError
from .scans import ScanResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RateModel:
    """
    Modelo de tasas: escala (Hz por unidad de probabilidad) más un fondo
    aditivo independiente del estado.
    """
    peak_rate_scale: float
    background_rate: float = 0.0

    def __post_init__(self):
        if self.peak_rate_scale < 0 or self.background_rate < 0:
            raise ParameterError("Las tasas del modelo deben ser no negativas")

    @classmethod
    def calibrated(cls, peak_rate_hz: float, probability: float = 1 / 3, background_rate: float = 0.0) -> "RateModel":
        """Escala tal que `probability` corresponde a `peak_rate_hz`."""
        if probability <= 0:
            raise ParameterError("La probabilidad de calibración debe ser positiva")
        return cls(peak_rate_hz / probability, background_rate)

    def mean_rate(self, probability):
        return probability * self.peak_rate_scale + self.background_rate


def point_rng(seed: int, index: int) -> np.random.Generator:
    """Generador propio de cada punto, derivado de la semilla maestra y el índice."""
    return np.random.default_rng([int(seed), int(index)])


def simulate_counts(result: ScanResult, model: RateModel, integration_seconds: float, seed: int) -> ScanResult:
    """
    Sortea conteos de Poisson para cada punto del barrido.

    Args:
        result: Barrido con probabilidades
        model: Modelo de tasas
        integration_seconds: Tiempo de integración por punto
        seed: Semilla maestra

    Returns:
        Nuevo ScanResult con rate_hz, counts y sigma_counts completos
    """
    if integration_seconds < 0:
        raise ParameterError(f"Tiempo de integración negativo: {integration_seconds}")

    frame = result.frame.copy()
    rates = model.mean_rate(frame['probability'].to_numpy(dtype=float))
    counts = [int(point_rng(seed, i).poisson(rate * integration_seconds)) for i, rate in enumerate(rates)]

    frame['rate_hz'] = rates
    frame['counts'] = counts
    frame['sigma_counts'] = np.sqrt(np.asarray(counts, dtype=float))
    logger.info(f"Conteos simulados: {len(counts)} puntos, {integration_seconds:g} s, semilla {seed}")
    return ScanResult(frame, result.scan_kind, result.spec)
