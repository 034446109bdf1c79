"""
Jerarquía de errores del simulador.

Las funciones de la librería lanzan estas excepciones; solo la CLI las
captura y las traduce a códigos de salida.
"""


class SimulationError(Exception):
    """Error base del simulador."""


class ParameterError(SimulationError, ValueError):
    """Parámetros de entrada inválidos (error de uso, código de salida 2)."""


class ComputationError(SimulationError):
    """Fallo durante un cálculo con parámetros válidos (código de salida 3)."""


# Errores de uso

class UnknownState(ParameterError):
    """Nombre de estado no reconocido."""


class InvalidReflectivity(ParameterError):
    """Reflectividad fuera de [0, 1]."""


class InvalidOverlap(ParameterError):
    """Solapamiento temporal fuera de [0, 1]."""


class InvalidScan(ParameterError):
    """Grilla de barrido vacía, no monótona o especificación incompleta."""


class ModeMismatch(ParameterError):
    """Elementos de un circuito con universos de modos inconsistentes."""


# Errores de cálculo

class ZeroState(ComputationError):
    """Estado sin amplitudes por encima del umbral de poda."""


class NonUnitaryTransform(ComputationError):
    """Matriz de transformación que no es unitaria."""


class ModeLimitExceeded(ComputationError):
    """Estado con más modos o fotones que el límite configurado."""


class NoSolution(ComputationError):
    """La condición de ángulos no tiene solución real."""


class FitDegenerate(ComputationError):
    """El ajuste no puede separar amplitud y fondo en la grilla dada."""
