"""
Circuitos: secuencias de elementos, composición y la etapa de proyección.
"""

import logging
from dataclasses import dataclass
from math import pi, radians
from typing import Callable, Dict, Sequence, Tuple

import numpy as np

from src.fock_core.detection import DetectionPattern
from src.fock_core.states import DEFAULT_PRUNE_THRESHOLD, PureState
from src.fock_core.transforms import DEFAULT_MAX_PHOTONS, ModeTransform, apply_transform
from src.fock_core.modes import Mode
from src.utils.errors import ModeMismatch, ParameterError
from .elements import (
    analysis_pbs,
    birefringent_phase,
    half_wave_plate,
    polarizing_beam_splitter,
    temporal_overlap,
)

logger = logging.getLogger(__name__)

COMPOSITION_TOLERANCE = 1e-10
PROJECTION_BINS = (0, 1)
# Fase que anula el i de la reflexión vertical del primer PBS
COMPENSATION_PHASE = -pi / 2
DETECTOR_PORTS = ('c_h', 'c_v', 'd_h', 'd_v')
FOURFOLD = DetectionPattern.one_per_detector(DETECTOR_PORTS, label="fourfold")


@dataclass(frozen=True)
class Circuit:
    """Secuencia ordenada de transformaciones de modos."""
    elements: Tuple[ModeTransform, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, 'elements', tuple(self.elements))

    @property
    def universe(self) -> Tuple[Mode, ...]:
        seen: Dict[Mode, None] = {}
        for element in self.elements:
            seen.update(dict.fromkeys(element.universe))
        return tuple(seen)

    def validate(self) -> None:
        """
        Verifica que ningún elemento lea un modo que otro anterior vació.

        Raises:
            ModeMismatch: si el cableado es inconsistente
        """
        emptied = set()
        for element in self.elements:
            stale = [m for m in element.input_modes if m in emptied]
            if stale:
                raise ModeMismatch(
                    f"'{element.label}' actúa sobre modos ya vaciados: {', '.join(map(str, stale))}"
                )
            emptied -= set(element.output_modes)
            emptied |= {freed for _, freed in element.completion()}

    def apply(
        self,
        state: PureState,
        max_photons: int = DEFAULT_MAX_PHOTONS,
        prune_threshold: float = DEFAULT_PRUNE_THRESHOLD
    ) -> PureState:
        """Propaga un estado elemento por elemento."""
        self.validate()
        for element in self.elements:
            state = apply_transform(state, element, max_photons=max_photons, prune_threshold=prune_threshold)
        return state


def compose(circuit: Circuit) -> ModeTransform:
    """
    Producto ordenado de los elementos como una única transformación.

    Raises:
        ModeMismatch: si los elementos no comparten un universo consistente
    """
    circuit.validate()
    universe = circuit.universe
    total = np.eye(len(universe), dtype=complex)
    for element in circuit.elements:
        total = element.embed(universe) @ total
    composed = ModeTransform(universe, universe, total, label=circuit.label or "composed")
    composed.check_unitary(COMPOSITION_TOLERANCE)
    return composed


def projection_stage(
    theta1: float,
    theta2: float,
    pre_phase: float = 0.0,
    gamma: float = 1.0,
    reflect_h: float = 0.0,
    reflect_v: float = 1.0
) -> Circuit:
    """
    Configuración completa de proyección.

    Solapamiento temporal en b → fase previa en a → PBS → compensación de
    la fase de reflexión → HWP(θ1) en c y HWP(θ2) en d → PBS de análisis
    hacia los cuatro detectores.

    Args:
        theta1: Ángulo de la lámina en el puerto c (radianes)
        theta2: Ángulo de la lámina en el puerto d (radianes)
        pre_phase: Fase birrefringente en el brazo a antes del PBS (radianes)
        gamma: Solapamiento temporal entre los brazos, en [0, 1]
        reflect_h: Reflectividad horizontal del primer PBS
        reflect_v: Reflectividad vertical del primer PBS

    Returns:
        Circuito de la etapa de proyección
    """
    bins = PROJECTION_BINS
    elements = [
        temporal_overlap(gamma, 'b'),
        birefringent_phase(pre_phase, 'a', bins),
        polarizing_beam_splitter('a', 'b', 'c', 'd', reflect_h, reflect_v, bins),
        birefringent_phase(COMPENSATION_PHASE, 'c', bins),
        birefringent_phase(COMPENSATION_PHASE, 'd', bins),
        half_wave_plate(theta1, 'c', bins),
        half_wave_plate(theta2, 'd', bins),
        analysis_pbs('c', bins),
        analysis_pbs('d', bins),
    ]
    return Circuit(tuple(elements), label="projection")


def _bins(params: Dict) -> Sequence[int]:
    return tuple(params.get('temporal_bins', (0,)))


ELEMENT_BUILDERS: Dict[str, Callable[[Dict], ModeTransform]] = {
    'half_wave_plate': lambda p: half_wave_plate(radians(p['theta_deg']), p['port'], _bins(p)),
    'birefringent_phase': lambda p: birefringent_phase(radians(p['delta_deg']), p['port'], _bins(p)),
    'temporal_overlap': lambda p: temporal_overlap(float(p['gamma']), p['port']),
    'polarizing_beam_splitter': lambda p: polarizing_beam_splitter(
        p['in_a'], p['in_b'], p['out_c'], p['out_d'],
        float(p.get('reflect_h', 0.0)), float(p.get('reflect_v', 1.0)), _bins(p)
    ),
}


def circuit_to_dict(circuit: Circuit) -> Dict:
    """Descripción JSON del circuito (ángulos en grados)."""
    elements = []
    for element in circuit.elements:
        if 'kind' not in element.params:
            raise ParameterError(f"'{element.label}' no tiene descripción serializable")
        elements.append(dict(element.params))
    return {'label': circuit.label, 'elements': elements}


def circuit_from_dict(payload: Dict) -> Circuit:
    """Reconstruye un circuito desde su descripción JSON."""
    elements = []
    for params in payload.get('elements', []):
        kind = params.get('kind')
        if kind not in ELEMENT_BUILDERS:
            raise ParameterError(f"Elemento desconocido: {kind}")
        elements.append(ELEMENT_BUILDERS[kind](params))
    return Circuit(tuple(elements), label=payload.get('label', ''))
