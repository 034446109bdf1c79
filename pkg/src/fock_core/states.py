"""
Estados puros y mezclas sobre la base de Fock.

Las amplitudes guardadas son los coeficientes de los monomios de
operadores de creación (como se escriben en las fórmulas del
experimento); la norma de cada monomio lleva los factores n!.
"""

import logging
from dataclasses import dataclass
from math import isclose, sqrt
from types import MappingProxyType
from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.utils.errors import ModeLimitExceeded, ParameterError, ZeroState
from .modes import FockBasisState, Mode

logger = logging.getLogger(__name__)

DEFAULT_PRUNE_THRESHOLD = 1e-14
DEFAULT_MAX_MODES = 16
NORM_TOLERANCE = 1e-12


class PureState:
    """Superposición finita de monomios de Fock con igual número de fotones."""

    def __init__(
        self,
        terms: Mapping[FockBasisState, complex],
        prune_threshold: float = DEFAULT_PRUNE_THRESHOLD,
        max_modes: int = DEFAULT_MAX_MODES
    ):
        pruned: Dict[FockBasisState, complex] = {}
        for basis, amplitude in terms.items():
            amplitude = complex(amplitude)
            if abs(amplitude) >= prune_threshold:
                pruned[basis] = amplitude

        photon_numbers = {b.photon_number for b in pruned}
        if len(photon_numbers) > 1:
            raise ParameterError(f"Términos con distinto número de fotones: {sorted(photon_numbers)}")

        occupied = {m for b in pruned for m in b.modes}
        if len(occupied) > max_modes:
            raise ModeLimitExceeded(f"{len(occupied)} modos ocupados, límite {max_modes}")

        self._terms = MappingProxyType(dict(sorted(pruned.items(), key=lambda kv: kv[0].occupations)))

    @classmethod
    def from_monomials(cls, monomials: Iterable[Tuple[complex, Mapping[Mode, int]]]) -> "PureState":
        """
        Construye un estado a partir de pares (coeficiente, {modo: n}).

        Monomios repetidos se suman.
        """
        terms: Dict[FockBasisState, complex] = {}
        for coefficient, counts in monomials:
            basis = FockBasisState.from_counts(counts)
            terms[basis] = terms.get(basis, 0j) + complex(coefficient)
        return cls(terms)

    @classmethod
    def vacuum(cls) -> "PureState":
        return cls({FockBasisState.vacuum(): 1.0})

    @property
    def terms(self) -> Mapping[FockBasisState, complex]:
        return self._terms

    @property
    def is_empty(self) -> bool:
        return not self._terms

    @property
    def photon_number(self) -> Optional[int]:
        if self.is_empty:
            return None
        return next(iter(self._terms)).photon_number

    @property
    def modes(self) -> Tuple[Mode, ...]:
        return tuple(sorted({m for b in self._terms for m in b.modes}))

    def amplitude(self, basis: FockBasisState) -> complex:
        """Coeficiente del monomio (0 si no aparece)."""
        return self._terms.get(basis, 0j)

    def fock_amplitude(self, basis: FockBasisState) -> complex:
        """Amplitud en la base de Fock normalizada: coeficiente × √Π n!."""
        return self.amplitude(basis) * sqrt(basis.norm_squared())

    def norm_squared(self) -> float:
        return float(sum(abs(a) ** 2 * b.norm_squared() for b, a in self._terms.items()))

    def norm(self) -> float:
        return sqrt(self.norm_squared())

    def scaled(self, factor: complex) -> "PureState":
        return PureState({b: a * factor for b, a in self._terms.items()})

    def __add__(self, other: "PureState") -> "PureState":
        terms = dict(self._terms)
        for basis, amplitude in other.terms.items():
            terms[basis] = terms.get(basis, 0j) + amplitude
        return PureState(terms)

    def __mul__(self, factor: complex) -> "PureState":
        return self.scaled(factor)

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Tuple[FockBasisState, complex]]:
        return iter(self._terms.items())

    def __repr__(self) -> str:
        parts = [f"({a.real:+.6g}{a.imag:+.6g}j) {b}" for b, a in self._terms.items()]
        return "PureState[" + " + ".join(parts) + "]"


@dataclass(frozen=True)
class Ensemble:
    """Mezcla estadística de estados puros."""
    components: Tuple[Tuple[float, PureState], ...]

    def __post_init__(self):
        components = tuple((float(w), s) for w, s in self.components)
        if not components:
            raise ParameterError("Ensemble vacío")
        if any(w < 0 for w, _ in components):
            raise ParameterError("Pesos negativos en el ensemble")
        total = sum(w for w, _ in components)
        if not isclose(total, 1.0, abs_tol=NORM_TOLERANCE):
            raise ParameterError(f"Los pesos suman {total}, no 1")
        object.__setattr__(self, 'components', components)

    @classmethod
    def uniform(cls, states: Sequence[PureState]) -> "Ensemble":
        """Mezcla con igual peso para cada estado."""
        weight = 1.0 / len(states)
        return cls(tuple((weight, s) for s in states))

    @classmethod
    def pure(cls, state: PureState) -> "Ensemble":
        return cls(((1.0, state),))

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components])

    @property
    def states(self) -> Tuple[PureState, ...]:
        return tuple(s for _, s in self.components)

    def map(self, transform: Callable[[PureState], PureState]) -> "Ensemble":
        """Aplica la misma transformación a cada componente, con los mismos pesos."""
        return Ensemble(tuple((w, transform(s)) for w, s in self.components))

    def postselect(self, pattern) -> Tuple[float, Optional["Ensemble"]]:
        """
        Post-selección de la mezcla sobre un patrón de detección.

        Args:
            pattern: DetectionPattern a exigir

        Returns:
            (probabilidad ponderada Σ wᵢpᵢ, mezcla condicional con pesos wᵢpᵢ/p,
            o None si ninguna componente pasa)
        """
        from .detection import postselect

        results = [(w, postselect(s, pattern)) for w, s in self.components]
        probability = sum(w * r.probability for w, r in results)
        if probability == 0.0:
            return 0.0, None
        survivors = [(w * r.probability, r.state) for w, r in results if not r.empty and w * r.probability > 0]
        total = sum(w for w, _ in survivors)
        return probability, Ensemble(tuple((w / total, s) for w, s in survivors))


def normalize(state: PureState) -> PureState:
    """
    Normaliza un estado conservando su fase global.

    Raises:
        ZeroState: si no queda ningún término por encima del umbral de poda
    """
    norm_sq = state.norm_squared()
    if state.is_empty or norm_sq == 0.0:
        raise ZeroState("No se puede normalizar un estado nulo")
    return state.scaled(1.0 / sqrt(norm_sq))


def inner_product(s1: PureState, s2: PureState) -> complex:
    """
    Producto interno ⟨s1|s2⟩ con normas bosónicas.

    Args:
        s1: Estado bra
        s2: Estado ket

    Returns:
        Σ conj(c1) c2 Π n! sobre los monomios comunes
    """
    if s1.is_empty or s2.is_empty:
        raise ZeroState("Producto interno con un estado nulo")
    small, large = (s1, s2) if len(s1) <= len(s2) else (s2, s1)
    total = 0j
    for basis in small.terms:
        if basis in large.terms:
            total += s1.amplitude(basis).conjugate() * s2.amplitude(basis) * basis.norm_squared()
    return total


def equal_up_to_phase(s1: PureState, s2: PureState, tol: float = 1e-10) -> bool:
    """
    Compara dos estados ignorando la fase global.

    La fase se alinea con la amplitud de mayor módulo de `s1`.
    """
    if s1.is_empty or s2.is_empty:
        return s1.is_empty and s2.is_empty
    reference = max(s1.terms, key=lambda b: abs(s1.fock_amplitude(b)))
    a1 = s1.amplitude(reference)
    a2 = s2.amplitude(reference)
    if abs(a2) == 0.0:
        return False
    phase = (a2 / a1) / abs(a2 / a1)
    for basis in set(s1.terms) | set(s2.terms):
        if abs(s1.fock_amplitude(basis) * phase - s2.fock_amplitude(basis)) > tol:
            return False
    return True
