"""
Transformaciones lineales de modos y su acción sobre estados de Fock.

Convención: cada operador de creación de entrada se transforma como
a†_i → Σ_j U[j, i] b†_j, donde b_j son los modos de salida.
"""

import bisect
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Sequence, Tuple

import numpy as np

from src.utils.errors import ModeLimitExceeded, ModeMismatch, NonUnitaryTransform
from .modes import FockBasisState, Mode
from .states import DEFAULT_PRUNE_THRESHOLD, PureState

logger = logging.getLogger(__name__)

DEFAULT_MAX_PHOTONS = 6
UNITARITY_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class ModeTransform:
    """
    Unitaria sobre un subconjunto de modos.

    Los modos que no figuran en `input_modes` ni en `output_modes` no se
    modifican. Si las salidas no coinciden con las entradas (por ejemplo un
    divisor que lleva a, b hacia c, d), los modos de salida que no son
    entrada se devuelven, en orden, a las entradas liberadas; así la
    transformación es unitaria sobre la unión de ambos conjuntos.
    """
    input_modes: Tuple[Mode, ...]
    output_modes: Tuple[Mode, ...]
    matrix: np.ndarray
    label: str = ""
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        input_modes = tuple(self.input_modes)
        output_modes = tuple(self.output_modes)
        matrix = np.array(self.matrix, dtype=complex)
        if len(input_modes) != len(output_modes):
            raise ModeMismatch("Distinta cantidad de modos de entrada y salida")
        if matrix.shape != (len(input_modes), len(input_modes)):
            raise ModeMismatch(f"Matriz {matrix.shape} para {len(input_modes)} modos")
        if len(set(input_modes)) != len(input_modes) or len(set(output_modes)) != len(output_modes):
            raise ModeMismatch("Modos repetidos en la transformación")
        matrix.setflags(write=False)
        object.__setattr__(self, 'input_modes', input_modes)
        object.__setattr__(self, 'output_modes', output_modes)
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'params', dict(self.params))

    @classmethod
    def identity(cls, modes: Sequence[Mode], label: str = "identity") -> "ModeTransform":
        """Transformación trivial sobre los modos dados."""
        return cls(tuple(modes), tuple(modes), np.eye(len(modes)), label=label)

    @property
    def universe(self) -> Tuple[Mode, ...]:
        """Modos tocados por la transformación, en orden de aparición."""
        seen = dict.fromkeys(self.input_modes)
        seen.update(dict.fromkeys(self.output_modes))
        return tuple(seen)

    def element(self, output_mode: Mode, input_mode: Mode) -> complex:
        """Coeficiente U[j, i] de b†_j en la imagen de a†_i."""
        try:
            i = self.input_modes.index(input_mode)
            j = self.output_modes.index(output_mode)
        except ValueError:
            return 0j
        return complex(self.matrix[j, i])

    def unitarity_error(self) -> float:
        """‖U†U − I‖_max."""
        n = self.matrix.shape[0]
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(n)), initial=0.0))

    def is_unitary(self, tolerance: float = UNITARITY_TOLERANCE) -> bool:
        return self.unitarity_error() < tolerance

    def check_unitary(self, tolerance: float = UNITARITY_TOLERANCE) -> None:
        error = self.unitarity_error()
        if error >= tolerance:
            raise NonUnitaryTransform(f"'{self.label}' no es unitaria (‖U†U − I‖ = {error:.3e})")

    def adjoint(self) -> "ModeTransform":
        """Transformación inversa: salidas → entradas con U†."""
        return ModeTransform(
            self.output_modes, self.input_modes, self.matrix.conj().T,
            label=f"{self.label}†" if self.label else "adjoint"
        )

    def completion(self) -> List[Tuple[Mode, Mode]]:
        """Pares (salida colgante → entrada liberada) que completan la unitaria."""
        inputs = set(self.input_modes)
        outputs = set(self.output_modes)
        dangling = [m for m in self.output_modes if m not in inputs]
        freed = [m for m in self.input_modes if m not in outputs]
        return list(zip(dangling, freed))

    def embed(self, universe: Sequence[Mode]) -> np.ndarray:
        """
        Matriz completa sobre `universe` (identidad fuera de la transformación).

        Raises:
            ModeMismatch: si el universo no contiene todos los modos tocados
        """
        index = {m: k for k, m in enumerate(universe)}
        missing = [m for m in self.universe if m not in index]
        if missing:
            raise ModeMismatch(f"Modos fuera del universo: {', '.join(map(str, missing))}")
        full = np.eye(len(universe), dtype=complex)
        for m in self.universe:
            full[:, index[m]] = 0.0
        for i, in_mode in enumerate(self.input_modes):
            for j, out_mode in enumerate(self.output_modes):
                full[index[out_mode], index[in_mode]] = self.matrix[j, i]
        for dangling, freed in self.completion():
            full[index[freed], index[dangling]] = 1.0
        return full

    def linear_forms(self, prune_threshold: float = DEFAULT_PRUNE_THRESHOLD) -> Dict[Mode, List[Tuple[Mode, complex]]]:
        """Imagen de cada operador de creación afectado como lista (modo, coeficiente)."""
        forms: Dict[Mode, List[Tuple[Mode, complex]]] = {}
        for i, in_mode in enumerate(self.input_modes):
            forms[in_mode] = [
                (out_mode, complex(self.matrix[j, i]))
                for j, out_mode in enumerate(self.output_modes)
                if abs(self.matrix[j, i]) > prune_threshold
            ]
        for dangling, freed in self.completion():
            forms[dangling] = [(freed, 1.0 + 0j)]
        return forms


def apply_transform(
    state: PureState,
    t: ModeTransform,
    max_photons: int = DEFAULT_MAX_PHOTONS,
    tolerance: float = UNITARITY_TOLERANCE,
    prune_threshold: float = DEFAULT_PRUNE_THRESHOLD
) -> PureState:
    """
    Aplica una transformación de modos sustituyendo a† → Σ U b† y expandiendo.

    Args:
        state: Estado de entrada
        t: Transformación unitaria
        max_photons: Número máximo de fotones admitido
        tolerance: Tolerancia de unitariedad
        prune_threshold: Umbral de poda de amplitudes

    Returns:
        Estado transformado en forma canónica

    Raises:
        NonUnitaryTransform: si la matriz no es unitaria
        ModeLimitExceeded: si el estado supera `max_photons`
    """
    t.check_unitary(tolerance)
    if state.photon_number is not None and state.photon_number > max_photons:
        raise ModeLimitExceeded(f"{state.photon_number} fotones, límite {max_photons}")

    forms = t.linear_forms(prune_threshold)
    result: Dict[FockBasisState, complex] = defaultdict(complex)

    for basis, amplitude in state:
        # monomios parciales como tuplas ordenadas de modos con repetición
        partial: Dict[Tuple[Mode, ...], complex] = {(): amplitude}
        for mode, count in basis.occupations:
            form = forms.get(mode, [(mode, 1.0 + 0j)])
            for _ in range(count):
                expanded: Dict[Tuple[Mode, ...], complex] = defaultdict(complex)
                for key, value in partial.items():
                    for out_mode, coefficient in form:
                        expanded[_insert(key, out_mode)] += value * coefficient
                partial = expanded
        for key, value in partial.items():
            result[FockBasisState.from_modes(key)] += value

    return PureState(result, prune_threshold=prune_threshold)


def _insert(key: Tuple[Mode, ...], mode: Mode) -> Tuple[Mode, ...]:
    position = bisect.bisect(key, mode)
    return key[:position] + (mode,) + key[position:]
