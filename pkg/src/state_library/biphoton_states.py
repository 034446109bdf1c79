"""
Estados de bifotones: qutrits generales, la base máximamente entrelazada
de dos qutrits y el estado de segundo orden de la conversión paramétrica.
"""

import logging
import re
from dataclasses import dataclass
from math import isclose, radians, sqrt
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.fock_core.modes import Mode, Polarization
from src.fock_core.states import NORM_TOLERANCE, PureState
from src.utils.errors import ParameterError, UnknownState

logger = logging.getLogger(__name__)

# Raíz cúbica de la unidad; todas las potencias se derivan de este valor
TAU = np.exp(2j * np.pi / 3)

H, V = Polarization.H, Polarization.V

# |0⟩ = h², |1⟩ = hv, |2⟩ = v²: (coeficiente, conteo H, conteo V) del bifotón normalizado
LOGICAL_BIPHOTONS: Dict[int, Tuple[float, int, int]] = {
    0: (1 / sqrt(2), 2, 0),
    1: (1.0, 1, 1),
    2: (1 / sqrt(2), 0, 2),
}


def tau_power(k: int) -> complex:
    return complex(TAU ** (k % 3))


@dataclass(frozen=True)
class QutritAmplitudes:
    """Amplitudes α0, α1, α2 de un qutrit de bifotón."""
    alpha0: complex
    alpha1: complex
    alpha2: complex

    @property
    def norm_squared(self) -> float:
        return abs(self.alpha0) ** 2 + abs(self.alpha1) ** 2 + abs(self.alpha2) ** 2

    def normalized(self) -> "QutritAmplitudes":
        norm = sqrt(self.norm_squared)
        if norm == 0.0:
            raise ParameterError("Amplitudes de qutrit nulas")
        return QutritAmplitudes(self.alpha0 / norm, self.alpha1 / norm, self.alpha2 / norm)

    def as_tuple(self) -> Tuple[complex, complex, complex]:
        return (self.alpha0, self.alpha1, self.alpha2)


@dataclass(frozen=True)
class BellIndex:
    """Índice (m, n) de la base generalizada de Bell."""
    m: int
    n: int

    def __post_init__(self):
        if self.m not in (0, 1, 2) or self.n not in (0, 1, 2):
            raise UnknownState(f"Índice de Bell inválido: ({self.m}, {self.n})")

    @classmethod
    def all(cls) -> List["BellIndex"]:
        return [cls(m, n) for m in range(3) for n in range(3)]

    @property
    def name(self) -> str:
        return f"psi{self.m}{self.n}"


def _logical_counts(j: int, port: str) -> Tuple[float, Dict[Mode, int]]:
    coefficient, n_h, n_v = LOGICAL_BIPHOTONS[j]
    counts = {Mode(port, H): n_h, Mode(port, V): n_v}
    return coefficient, {m: n for m, n in counts.items() if n}


def biphoton_qutrit(amps: QutritAmplitudes, port: str = 'a') -> PureState:
    """
    Qutrit general α0·a_h†²/√2 + α1·a_h†a_v† + α2·a_v†²/√2 sobre el vacío.

    Args:
        amps: Amplitudes normalizadas
        port: Puerto espacial

    Returns:
        Estado de dos fotones en el puerto dado
    """
    if not isclose(amps.norm_squared, 1.0, abs_tol=NORM_TOLERANCE):
        raise ParameterError(f"Amplitudes no normalizadas (Σ|α|² = {amps.norm_squared})")
    monomials = []
    for j, alpha in enumerate(amps.as_tuple()):
        coefficient, counts = _logical_counts(j, port)
        monomials.append((alpha * coefficient, counts))
    return PureState.from_monomials(monomials)


def bell_state(idx: BellIndex, port_a: str = 'a', port_b: str = 'b') -> PureState:
    """
    Estado |ψ_mn⟩ = (1/√3) Σ_j τ^{jn} |j⟩_a ⊗ |(j+m) mod 3⟩_b.

    El producto tensorial de bifotones en dos puertos es el producto de los
    monomios locales de cada puerto.
    """
    monomials = []
    for j in range(3):
        coef_a, counts_a = _logical_counts(j, port_a)
        coef_b, counts_b = _logical_counts((j + idx.m) % 3, port_b)
        amplitude = tau_power(j * idx.n) * coef_a * coef_b / sqrt(3)
        monomials.append((amplitude, {**counts_a, **counts_b}))
    return PureState.from_monomials(monomials)


def bell_basis() -> Dict[BellIndex, PureState]:
    return {idx: bell_state(idx) for idx in BellIndex.all()}


def spdc_second_order(delta: float, port_a: str = 'a', port_b: str = 'b') -> PureState:
    """
    Término de segundo orden de una fuente |φ⁺⟩ con fase birrefringente δ.

    (1/√12)(a_h†²b_h†² + 2e^{iδ} a_h†a_v†b_h†b_v† + e^{2iδ} a_v†²b_v†²)|vac⟩
    """
    phase = np.exp(1j * delta)
    a_h, a_v, b_h, b_v = Mode(port_a, H), Mode(port_a, V), Mode(port_b, H), Mode(port_b, V)
    return PureState.from_monomials([
        (1 / sqrt(12), {a_h: 2, b_h: 2}),
        (2 * phase / sqrt(12), {a_h: 1, a_v: 1, b_h: 1, b_v: 1}),
        (phase ** 2 / sqrt(12), {a_v: 2, b_v: 2}),
    ])


_BELL_NAME = re.compile(r"^psi([0-9])([0-9])$")


def named_state(name: str, delta: Optional[float] = None) -> PureState:
    """
    Busca un estado por nombre: "psi00" … "psi22" o "phi2" (requiere δ en radianes).

    Raises:
        UnknownState: si el nombre no corresponde a ningún estado
    """
    key = name.strip().lower()
    match = _BELL_NAME.match(key)
    if match:
        return bell_state(BellIndex(int(match.group(1)), int(match.group(2))))
    if key == 'phi2':
        return spdc_second_order(delta if delta is not None else 0.0)
    raise UnknownState(f"Estado desconocido: '{name}'")


def state_names() -> List[str]:
    return [idx.name for idx in BellIndex.all()] + ['phi2']


def phi2_reference(delta_deg: float) -> Optional[str]:
    """Nombre del |ψ0n⟩ que coincide con φ(2)(δ) cuando δ es múltiplo de 120°."""
    turns = (delta_deg % 360.0) / 120.0
    n = round(turns)
    if isclose(turns, n, abs_tol=1e-9):
        return f"psi0{n % 3}"
    return None


def phi2_delta_for(n: int) -> float:
    """δ = 2πn/3 que genera |ψ0n⟩."""
    return radians(120.0 * n)
