"""
Amplitud cuádruple en forma cerrada y condición de ángulos de las láminas.
"""

import logging
from math import atan, cos, pi, sin, sqrt, tan

import numpy as np

from src.state_library.biphoton_states import tau_power
from src.utils.errors import NoSolution, ParameterError

logger = logging.getLogger(__name__)

# Período de tan 4θ
ANGLE_PERIOD = pi / 4
SINGULAR_TOLERANCE = 1e-12


def magic_angle() -> float:
    """θ* con tan²4θ* = 2, es decir atan(√2)/4 ≈ 13.68°."""
    return atan(sqrt(2.0)) / 4


def analytic_a4f(theta: float, n: int) -> complex:
    """
    Amplitud del término a_h†a_v†b_h†b_v† para láminas iguales en θ.

    A_4f = (1/√12)(sin²4θ + 2τⁿ cos²4θ + τ^{2n} sin²4θ)

    Args:
        theta: Ángulo de ambas láminas (radianes)
        n: Índice de fase del estado |ψ0n⟩

    Returns:
        Amplitud compleja
    """
    if n not in (0, 1, 2):
        raise ParameterError(f"n debe ser 0, 1 o 2 (recibido {n})")
    s2, c2 = sin(4 * theta) ** 2, cos(4 * theta) ** 2
    return (s2 + 2 * tau_power(n) * c2 + tau_power(2 * n) * s2) / sqrt(12)


def analytic_a4f_continuous(theta: float, delta: float) -> complex:
    """A_4f con τⁿ → e^{iδ} y τ^{2n} → e^{2iδ}."""
    s2, c2 = sin(4 * theta) ** 2, cos(4 * theta) ** 2
    phase = np.exp(1j * delta)
    return complex((s2 + 2 * phase * c2 + phase ** 2 * s2) / sqrt(12))


def solve_second_angle(theta1: float) -> float:
    """
    Menor θ2 > 0 con tan4θ1 · tan4θ2 = 2.

    Raises:
        NoSolution: si tan4θ1 es nula o no está definida (configuración nula)
    """
    if abs(sin(4 * theta1)) < SINGULAR_TOLERANCE:
        raise NoSolution(f"tan4θ1 = 0 para θ1 = {theta1}: el producto no puede valer 2")
    if abs(cos(4 * theta1)) < SINGULAR_TOLERANCE:
        raise NoSolution(f"tan4θ1 no está definida para θ1 = {theta1}")
    theta2 = (atan(2.0 / tan(4 * theta1)) / 4) % ANGLE_PERIOD
    logger.debug(f"θ1 = {theta1:.6f} rad → θ2 = {theta2:.6f} rad")
    return theta2


def angle_condition_residual(theta1: float, theta2: float) -> float:
    """tan4θ1 · tan4θ2 − 2 (infinito en los puntos singulares)."""
    if abs(cos(4 * theta1)) < SINGULAR_TOLERANCE or abs(cos(4 * theta2)) < SINGULAR_TOLERANCE:
        return float('inf')
    return tan(4 * theta1) * tan(4 * theta2) - 2.0
