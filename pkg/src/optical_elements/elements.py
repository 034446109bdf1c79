"""
Constructores de las transformaciones de modos de cada elemento óptico.

Todas las matrices actúan sobre operadores de creación (columna = modo de
entrada). Cada constructor acepta `temporal_bins`: el mismo bloque se
repite en cada intervalo temporal indicado.
"""

import logging
from math import cos, degrees, sin, sqrt
from typing import List, Sequence

import numpy as np

from src.fock_core.modes import Mode, Polarization
from src.fock_core.transforms import ModeTransform
from src.utils.errors import InvalidOverlap, InvalidReflectivity

logger = logging.getLogger(__name__)

DEFAULT_BINS = (0,)
H, V = Polarization.H, Polarization.V


def _port_modes(port: str, bins: Sequence[int]) -> List[Mode]:
    """Modos (H, V) de un puerto, agrupados por intervalo temporal."""
    return [Mode(port, pol, b) for b in bins for pol in (H, V)]


def half_wave_plate(theta: float, port: str, temporal_bins: Sequence[int] = DEFAULT_BINS) -> ModeTransform:
    """
    Lámina de media onda con el eje a un ángulo θ de la vertical.

    a_h† → −cos2θ a_h† + sin2θ a_v†,  a_v† → sin2θ a_h† + cos2θ a_v†.
    Real, simétrica e involutiva; en θ = 0 el eje rápido es vertical.

    Args:
        theta: Ángulo en radianes
        port: Puerto espacial
        temporal_bins: Intervalos temporales sobre los que actúa

    Returns:
        Transformación de modos
    """
    c, s = cos(2 * theta), sin(2 * theta)
    block = np.array([[-c, s],
                      [s, c]], dtype=complex)
    modes = _port_modes(port, temporal_bins)
    return ModeTransform(
        tuple(modes), tuple(modes), np.kron(np.eye(len(temporal_bins)), block),
        label=f"HWP({degrees(theta):.4g}°)@{port}",
        params={'kind': 'half_wave_plate', 'theta_deg': degrees(theta), 'port': port,
                'temporal_bins': list(temporal_bins)}
    )


def polarizing_beam_splitter(
    in_a: str,
    in_b: str,
    out_c: str,
    out_d: str,
    reflect_h: float = 0.0,
    reflect_v: float = 1.0,
    temporal_bins: Sequence[int] = DEFAULT_BINS
) -> ModeTransform:
    """
    Divisor polarizante con reflectividades por polarización.

    Para cada polarización: transmisión √(1−r) (a → c, b → d) y reflexión
    i√r (a → d, b → c). El caso ideal es reflect_h = 0, reflect_v = 1.

    Raises:
        InvalidReflectivity: si alguna reflectividad está fuera de [0, 1]
    """
    for name, r in (('reflect_h', reflect_h), ('reflect_v', reflect_v)):
        if not 0.0 <= r <= 1.0:
            raise InvalidReflectivity(f"{name} = {r} fuera de [0, 1]")

    inputs: List[Mode] = []
    outputs: List[Mode] = []
    blocks = []
    for b in temporal_bins:
        for pol, r in ((H, reflect_h), (V, reflect_v)):
            t, rho = sqrt(1.0 - r), 1j * sqrt(r)
            inputs += [Mode(in_a, pol, b), Mode(in_b, pol, b)]
            outputs += [Mode(out_c, pol, b), Mode(out_d, pol, b)]
            blocks.append(np.array([[t, rho],
                                    [rho, t]], dtype=complex))

    matrix = np.zeros((len(inputs), len(inputs)), dtype=complex)
    for k, block in enumerate(blocks):
        matrix[2 * k:2 * k + 2, 2 * k:2 * k + 2] = block

    return ModeTransform(
        tuple(inputs), tuple(outputs), matrix,
        label=f"PBS({in_a},{in_b}→{out_c},{out_d})",
        params={'kind': 'polarizing_beam_splitter', 'in_a': in_a, 'in_b': in_b,
                'out_c': out_c, 'out_d': out_d, 'reflect_h': reflect_h, 'reflect_v': reflect_v,
                'temporal_bins': list(temporal_bins)}
    )


def birefringent_phase(delta: float, port: str, temporal_bins: Sequence[int] = DEFAULT_BINS) -> ModeTransform:
    """Fase birrefringente: H → H, V → e^{iδ} V en el puerto dado."""
    block = np.diag([1.0, np.exp(1j * delta)])
    modes = _port_modes(port, temporal_bins)
    return ModeTransform(
        tuple(modes), tuple(modes), np.kron(np.eye(len(temporal_bins)), block),
        label=f"phase({degrees(delta):.4g}°)@{port}",
        params={'kind': 'birefringent_phase', 'delta_deg': degrees(delta), 'port': port,
                'temporal_bins': list(temporal_bins)}
    )


def temporal_overlap(gamma: float, port: str) -> ModeTransform:
    """
    Desplaza los fotones de un puerto entre los intervalos temporales 0 y 1.

    Intervalo 0 → γ·(0) + √(1−γ²)·(1); γ = 1 es indistinguibilidad total,
    γ = 0 etiqueta temporalmente todos los fotones del puerto.

    Raises:
        InvalidOverlap: si γ está fuera de [0, 1]
    """
    if not 0.0 <= gamma <= 1.0:
        raise InvalidOverlap(f"gamma = {gamma} fuera de [0, 1]")
    s = sqrt(1.0 - gamma ** 2)
    block = np.array([[gamma, -s],
                      [s, gamma]], dtype=complex)
    modes = [Mode(port, pol, b) for pol in (H, V) for b in (0, 1)]
    return ModeTransform(
        tuple(modes), tuple(modes), np.kron(np.eye(2), block),
        label=f"overlap({gamma:.4g})@{port}",
        params={'kind': 'temporal_overlap', 'gamma': gamma, 'port': port}
    )


def analysis_pbs(port: str, temporal_bins: Sequence[int] = DEFAULT_BINS) -> ModeTransform:
    """PBS ideal que separa un puerto en sus detectores `<port>_h` y `<port>_v`."""
    return polarizing_beam_splitter(
        port, f"{port}_aux", f"{port}_h", f"{port}_v",
        reflect_h=0.0, reflect_v=1.0, temporal_bins=temporal_bins
    )
