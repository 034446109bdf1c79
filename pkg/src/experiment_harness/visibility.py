"""
Ajuste de visibilidad sobre barridos de fase δ.
"""

import logging
from math import sqrt
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import curve_fit

from src.utils.errors import FitDegenerate, InvalidScan
from .scans import ScanKind, ScanResult

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 5
DENSE_GRID_POINTS = 721
FLATNESS_TOLERANCE = 1e-9
EXACT_FIT_TOLERANCE = 1e-9


def a4f_shape(theta: float, deltas) -> np.ndarray:
    """|A_4f(θ, δ)|² evaluada sobre un arreglo de δ."""
    deltas = np.asarray(deltas, dtype=float)
    s2, c2 = np.sin(4 * theta) ** 2, np.cos(4 * theta) ** 2
    phase = np.exp(1j * deltas)
    return np.abs((s2 + 2 * phase * c2 + phase ** 2 * s2) / np.sqrt(12)) ** 2


def estimate_visibility(result: ScanResult, theta: Optional[float] = None) -> Tuple[float, float]:
    """
    Ajusta A·|A_4f(θ, δ)|² + C y calcula V = (max − min)/(max + min).

    Se ajustan los conteos si están disponibles (pesos de Poisson), o si no
    las probabilidades. La incertidumbre se propaga desde la covarianza del ajuste.

    Args:
        result: Barrido de tipo delta
        theta: Ángulo de las láminas; por defecto theta1 del barrido

    Returns:
        (visibilidad, incertidumbre)
    """
    if result.scan_kind != ScanKind.DELTA:
        raise InvalidScan(f"La visibilidad requiere un barrido delta (recibido {result.scan_kind.value})")
    if theta is None:
        if result.spec is None:
            raise InvalidScan("Falta el ángulo de las láminas para el modelo")
        theta = result.spec.setting.theta1

    frame = result.frame
    if len(frame) < MIN_FIT_POINTS:
        raise FitDegenerate(f"Se necesitan al menos {MIN_FIT_POINTS} puntos (hay {len(frame)})")

    deltas = frame['parameter'].to_numpy(dtype=float)
    shape = a4f_shape(theta, deltas)
    if np.ptp(shape) <= FLATNESS_TOLERANCE * max(shape.max(), 1e-300):
        raise FitDegenerate(f"El modelo es constante en δ para θ = {theta:.6f} rad")

    if result.has_counts:
        data = frame['counts'].to_numpy(dtype=float)
        sigma = np.sqrt(np.maximum(data, 1.0))
        absolute_sigma = True
    else:
        data = frame['probability'].to_numpy(dtype=float)
        sigma = None
        absolute_sigma = False

    def model(x, amplitude, offset):
        return amplitude * a4f_shape(theta, x) + offset

    a0 = np.ptp(data) / np.ptp(shape)
    p0 = [a0, data.min() - a0 * shape.min()]
    try:
        popt, pcov = curve_fit(model, deltas, data, p0=p0, sigma=sigma, absolute_sigma=absolute_sigma)
    except (RuntimeError, ValueError) as e:
        raise FitDegenerate(f"El ajuste no convergió: {e}")
    if not np.all(np.isfinite(pcov)):
        # un ajuste exacto (datos sin ruido) no deja residuo para estimar la covarianza
        residual = np.max(np.abs(model(deltas, *popt) - data))
        if residual > EXACT_FIT_TOLERANCE * np.max(np.abs(data)):
            raise FitDegenerate("Covarianza del ajuste no definida")
        logger.debug(f"Ajuste exacto (residuo {residual:.3e}); incertidumbre nula")
        pcov = np.zeros((2, 2))

    amplitude, offset = popt
    if offset < -EXACT_FIT_TOLERANCE * abs(amplitude):
        logger.warning(f"Fondo ajustado negativo (C = {offset:.4g})")
    dense = np.linspace(0.0, 2 * np.pi, DENSE_GRID_POINTS)
    fitted = model(dense, amplitude, offset)
    dense_shape = a4f_shape(theta, dense)
    p_hi = dense_shape[np.argmax(fitted)]
    p_lo = dense_shape[np.argmin(fitted)]

    spread = p_hi - p_lo
    denominator = amplitude * (p_hi + p_lo) + 2 * offset
    if denominator <= 0:
        raise FitDegenerate("max + min del ajuste no es positivo")

    visibility = amplitude * spread / denominator
    gradient = np.array([
        2 * offset * spread / denominator ** 2,
        -2 * amplitude * spread / denominator ** 2,
    ])
    uncertainty = sqrt(max(float(gradient @ pcov @ gradient), 0.0))
    logger.info(f"Visibilidad: {visibility:.4f} ± {uncertainty:.4f} (A = {amplitude:.4g}, C = {offset:.4g})")
    return float(visibility), uncertainty
