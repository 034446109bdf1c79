"""
Modos bosónicos etiquetados y elementos de la base de números de ocupación.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from math import factorial, prod
from typing import Iterable, Mapping, Tuple

from src.utils.errors import ParameterError

logger = logging.getLogger(__name__)


class Polarization(str, Enum):
    """Polarización de un modo (horizontal o vertical)."""
    H = "H"
    V = "V"


@dataclass(frozen=True, order=True)
class Mode:
    """
    Modo bosónico: puerto espacial × polarización × intervalo temporal.

    El orden canónico es lexicográfico (espacial, polarización, temporal).
    """
    spatial: str
    polarization: Polarization
    temporal: int = 0

    def __post_init__(self):
        polarization = self.polarization
        if not isinstance(polarization, Polarization):
            try:
                polarization = Polarization(str(polarization).upper())
            except ValueError:
                raise ParameterError(f"Polarización desconocida: {self.polarization}")
        object.__setattr__(self, 'polarization', polarization)
        if int(self.temporal) < 0:
            raise ParameterError(f"Intervalo temporal negativo: {self.temporal}")
        object.__setattr__(self, 'temporal', int(self.temporal))

    def with_spatial(self, spatial: str) -> "Mode":
        """Mismo modo en otro puerto espacial (conserva polarización e intervalo)."""
        return Mode(spatial, self.polarization, self.temporal)

    def with_polarization(self, polarization: Polarization) -> "Mode":
        """Mismo modo con otra polarización."""
        return Mode(self.spatial, polarization, self.temporal)

    def __str__(self) -> str:
        label = f"{self.spatial}_{self.polarization.value.lower()}"
        return f"{label}[t{self.temporal}]" if self.temporal else label


@dataclass(frozen=True)
class FockBasisState:
    """
    Monomio de operadores de creación aplicado al vacío.

    `occupations` se guarda en forma canónica: pares (modo, n) ordenados,
    sin entradas con n = 0. El vacío es la tupla vacía.
    """
    occupations: Tuple[Tuple[Mode, int], ...] = ()

    def __post_init__(self):
        merged = Counter()
        for mode, count in self.occupations:
            if count < 0:
                raise ParameterError(f"Ocupación negativa en {mode}: {count}")
            merged[mode] += int(count)
        canonical = tuple(sorted((m, n) for m, n in merged.items() if n > 0))
        object.__setattr__(self, 'occupations', canonical)

    @classmethod
    def vacuum(cls) -> "FockBasisState":
        return cls(())

    @classmethod
    def from_counts(cls, counts: Mapping[Mode, int]) -> "FockBasisState":
        return cls(tuple(counts.items()))

    @classmethod
    def from_modes(cls, modes: Iterable[Mode]) -> "FockBasisState":
        """Construye el monomio a partir de una secuencia de modos con repetición."""
        return cls(tuple(Counter(modes).items()))

    @property
    def photon_number(self) -> int:
        return sum(n for _, n in self.occupations)

    @property
    def modes(self) -> Tuple[Mode, ...]:
        return tuple(m for m, _ in self.occupations)

    def count(self, mode: Mode) -> int:
        for m, n in self.occupations:
            if m == mode:
                return n
        return 0

    def norm_squared(self) -> int:
        """⟨vac| a^n a†^n |vac⟩ = Π n! para el monomio."""
        return prod(factorial(n) for _, n in self.occupations)

    def port_count(self, spatial: str) -> int:
        """Fotones en un puerto espacial, sumando polarizaciones e intervalos."""
        return sum(n for m, n in self.occupations if m.spatial == spatial)

    def __str__(self) -> str:
        if not self.occupations:
            return "|vac⟩"
        factors = []
        for mode, n in self.occupations:
            factors.append(f"{mode}†" + (f"^{n}" if n > 1 else ""))
        return " ".join(factors) + " |vac⟩"
