"""
Patrones de detección y post-selección.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Tuple

from src.utils.errors import ParameterError, ZeroState
from .modes import FockBasisState
from .states import PureState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DetectionPattern:
    """
    Predicado de post-selección sobre detectores.

    `counts` asigna a cada puerto detector el número exacto de fotones
    requerido, sumando polarizaciones e intervalos temporales (el detector
    dispara sin importar el intervalo). Los puertos no listados no se
    restringen.
    """
    counts: Tuple[Tuple[str, int], ...]
    label: str = ""

    def __post_init__(self):
        items = self.counts.items() if isinstance(self.counts, Mapping) else self.counts
        counts = tuple(sorted((str(port), int(n)) for port, n in items))
        if any(n < 0 for _, n in counts):
            raise ParameterError("Conteos negativos en el patrón de detección")
        object.__setattr__(self, 'counts', counts)

    @classmethod
    def one_per_detector(cls, ports: Iterable[str], label: str = "fourfold") -> "DetectionPattern":
        """Un fotón en cada puerto indicado."""
        return cls(tuple((p, 1) for p in ports), label=label)

    @property
    def ports(self) -> Tuple[str, ...]:
        return tuple(p for p, _ in self.counts)

    @property
    def photon_number(self) -> int:
        return sum(n for _, n in self.counts)

    def matches(self, basis: FockBasisState) -> bool:
        """Verdadero si cada puerto del patrón recibe exactamente los fotones pedidos."""
        return all(basis.port_count(port) == n for port, n in self.counts)


def two_by_two(port_c: str = "c", port_d: str = "d") -> DetectionPattern:
    """Dos fotones en cada puerto de salida del PBS."""
    return DetectionPattern(((port_c, 2), (port_d, 2)), label="2+2")


class PostselectionResult(NamedTuple):
    probability: float
    state: Optional[PureState]

    @property
    def empty(self) -> bool:
        return self.state is None


def postselect(state: PureState, pattern: DetectionPattern) -> PostselectionResult:
    """
    Condiciona un estado a un patrón de detección.

    Args:
        state: Estado (se asume normalizado; se divide por su norma igual)
        pattern: Patrón de detección

    Returns:
        (probabilidad, estado condicional renormalizado o None si p = 0)
    """
    total = state.norm_squared()
    if total == 0.0:
        raise ZeroState("Post-selección sobre un estado nulo")

    matching: Dict[FockBasisState, complex] = {
        basis: amplitude for basis, amplitude in state if pattern.matches(basis)
    }
    conditional = PureState(matching)
    probability = conditional.norm_squared() / total
    probability = min(max(probability, 0.0), 1.0)

    if conditional.is_empty:
        logger.debug(f"Post-selección '{pattern.label}' vacía")
        return PostselectionResult(0.0, None)
    return PostselectionResult(probability, conditional.scaled(1.0 / conditional.norm()))
