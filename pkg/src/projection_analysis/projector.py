"""
Probabilidades de detección por propagación completa de la etapa de proyección.
"""

import dataclasses
import logging
from dataclasses import dataclass
from math import isclose
from typing import Dict, Optional, Union

from src.fock_core.detection import DetectionPattern, postselect, two_by_two
from src.fock_core.modes import FockBasisState, Mode, Polarization
from src.fock_core.states import Ensemble, PureState
from src.optical_elements.circuit import FOURFOLD, Circuit, projection_stage
from src.optical_elements.elements import polarizing_beam_splitter
from src.state_library.biphoton_states import BellIndex, bell_state
from src.utils.errors import InvalidOverlap, InvalidReflectivity
from .amplitudes import analytic_a4f, magic_angle

logger = logging.getLogger(__name__)

StateLike = Union[PureState, Ensemble]

# Clases de salida por brazo: (fotones en el detector H, fotones en el detector V)
ARM_OUTCOMES = {'hh': (2, 0), 'hv': (1, 1), 'vv': (0, 2)}


@dataclass(frozen=True)
class ProjectionSetting:
    """Parámetros de la etapa de proyección (ángulos y fases en radianes)."""
    theta1: float
    theta2: float
    pre_pbs_phase: float = 0.0
    overlap: float = 1.0
    reflect_h: float = 0.0
    reflect_v: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.overlap <= 1.0:
            raise InvalidOverlap(f"overlap = {self.overlap} fuera de [0, 1]")
        for name in ('reflect_h', 'reflect_v'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidReflectivity(f"{name} = {value} fuera de [0, 1]")

    @classmethod
    def magic(cls, **kwargs) -> "ProjectionSetting":
        theta = magic_angle()
        return cls(theta1=theta, theta2=theta, **kwargs)

    def replace(self, **changes) -> "ProjectionSetting":
        return dataclasses.replace(self, **changes)

    @property
    def is_degenerate(self) -> bool:
        return isclose(self.theta1, self.theta2, abs_tol=1e-15)

    def circuit(self) -> Circuit:
        return projection_stage(
            self.theta1, self.theta2, self.pre_pbs_phase, self.overlap,
            self.reflect_h, self.reflect_v
        )


@dataclass(frozen=True)
class A4fResult:
    """Amplitud cuádruple y su probabilidad."""
    amplitude: complex
    probability: float

    @classmethod
    def from_amplitude(cls, amplitude: complex) -> "A4fResult":
        return cls(amplitude, abs(amplitude) ** 2)


def analytic_result(theta: float, n: int) -> A4fResult:
    return A4fResult.from_amplitude(analytic_a4f(theta, n))


def propagate(state: PureState, setting: ProjectionSetting) -> PureState:
    """Propaga un estado de dos puertos por la etapa de proyección."""
    return setting.circuit().apply(state)


def detection_probability(state: StateLike, setting: ProjectionSetting) -> float:
    """
    Probabilidad de detección cuádruple (un fotón por detector).

    Args:
        state: Estado puro de cuatro fotones en a, b o un Ensemble de ellos
        setting: Configuración de la proyección

    Returns:
        Probabilidad; para un Ensemble, la suma ponderada
    """
    if isinstance(state, Ensemble):
        probability, _ = state.map(lambda s: propagate(s, setting)).postselect(FOURFOLD)
        return probability
    return postselect(propagate(state, setting), FOURFOLD).probability


def propagated_a4f(state: PureState, setting: ProjectionSetting) -> A4fResult:
    """
    Amplitud cuádruple obtenida por propagación (intervalo temporal 0).

    La amplitud corresponde al monomio con un fotón en cada detector; su fase
    incluye la de los PBS de análisis (i·i en las salidas V), de modo que es
    exactamente −analytic_a4f(θ, n). La probabilidad es la cuádruple total.
    """
    output = propagate(state, setting)
    fourfold = FockBasisState.from_modes([
        Mode('c_h', Polarization.H), Mode('c_v', Polarization.V),
        Mode('d_h', Polarization.H), Mode('d_v', Polarization.V),
    ])
    return A4fResult(output.fock_amplitude(fourfold), postselect(output, FOURFOLD).probability)


def family_filter_probability(state: StateLike, reflect_h: float = 0.0, reflect_v: float = 1.0) -> float:
    """
    Probabilidad de que salgan dos fotones por cada puerto del primer PBS.

    Args:
        state: Estado de cuatro fotones en a, b (o un Ensemble)
        reflect_h: Reflectividad horizontal (0 en el PBS ideal)
        reflect_v: Reflectividad vertical (1 en el PBS ideal)
    """
    pbs = Circuit((polarizing_beam_splitter('a', 'b', 'c', 'd', reflect_h, reflect_v),), label="pbs")
    if isinstance(state, Ensemble):
        probability, _ = state.map(pbs.apply).postselect(two_by_two('c', 'd'))
        return probability
    return postselect(pbs.apply(state), two_by_two('c', 'd')).probability


def outcome_class_probabilities(state: PureState, setting: ProjectionSetting) -> Dict[str, float]:
    """
    Probabilidades de las nueve clases con dos fotones por brazo.

    Las claves son '<c>/<d>' con cada brazo en {'hh', 'hv', 'vv'}; 'hv/hv'
    es la detección cuádruple.
    """
    output = propagate(state, setting)
    probabilities: Dict[str, float] = {}
    for name_c, (ch, cv) in ARM_OUTCOMES.items():
        for name_d, (dh, dv) in ARM_OUTCOMES.items():
            pattern = DetectionPattern(
                (('c_h', ch), ('c_v', cv), ('d_h', dh), ('d_v', dv)),
                label=f"{name_c}/{name_d}"
            )
            probabilities[pattern.label] = postselect(output, pattern).probability
    return probabilities


def other_families() -> Ensemble:
    """Mezcla uniforme de los seis estados con m ≠ 0."""
    return Ensemble.uniform([bell_state(idx) for idx in BellIndex.all() if idx.m != 0])


def family_leakage_probability(reflect_h: float = 0.05, setting: Optional[ProjectionSetting] = None) -> float:
    """
    Probabilidad cuádruple de la mezcla de familias m ≠ 0 con un PBS no ideal.

    Args:
        reflect_h: Reflectividad horizontal del primer PBS
        setting: Configuración base (por defecto, láminas en θ*)

    Returns:
        Probabilidad de detección en el peor caso (mezcla uniforme)
    """
    setting = (setting or ProjectionSetting.magic()).replace(reflect_h=reflect_h)
    probability = detection_probability(other_families(), setting)
    logger.info(f"Fuga de familias m≠0 con reflect_h={reflect_h}: {probability:.5f}")
    return probability


def background_probability(setting: Optional[ProjectionSetting] = None) -> float:
    """Probabilidad cuádruple de |ψ00⟩ con fotones distinguibles (γ = 0)."""
    setting = (setting or ProjectionSetting.magic()).replace(overlap=0.0)
    return detection_probability(bell_state(BellIndex(0, 0)), setting)


def amplitude_gap(theta: float, n: int) -> float:
    """|A_4f|² analítica menos la probabilidad propagada (láminas iguales, γ = 1)."""
    analytic = analytic_result(theta, n).probability
    propagated = detection_probability(bell_state(BellIndex(0, n)), ProjectionSetting(theta, theta))
    return analytic - propagated


def expected_ratio(setting: Optional[ProjectionSetting] = None) -> float:
    """Cociente entre la probabilidad con y sin distinguibilidad para |ψ00⟩."""
    setting = setting or ProjectionSetting.magic()
    projected = detection_probability(bell_state(BellIndex(0, 0)), setting.replace(overlap=1.0))
    return projected / background_probability(setting)

