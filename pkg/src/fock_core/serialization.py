"""
Codificación JSON de estados de Fock.

Formato: cada término es {"occupations": [{"spatial", "polarization",
"temporal", "count"}, ...], "amplitude": [re, im]}.
"""

from typing import Dict, List, Optional

from .modes import FockBasisState, Mode
from .states import PureState


def state_to_dict(state: PureState, name: Optional[str] = None) -> Dict:
    """
    Serializa un estado puro como diccionario apto para JSON.

    Args:
        state: Estado a serializar
        name: Nombre opcional que encabeza el diccionario

    Returns:
        {"name"?, "photon_number", "norm", "terms"} con los coeficientes de los monomios
    """
    terms: List[Dict] = []
    for basis, amplitude in state:
        terms.append({
            'occupations': [
                {
                    'spatial': mode.spatial,
                    'polarization': mode.polarization.value,
                    'temporal': mode.temporal,
                    'count': count
                }
                for mode, count in basis.occupations
            ],
            'amplitude': [amplitude.real, amplitude.imag]
        })
    payload = {
        'photon_number': state.photon_number,
        'norm': state.norm(),
        'terms': terms
    }
    if name is not None:
        payload = {'name': name, **payload}
    return payload


def state_from_dict(payload: Dict) -> PureState:
    """
    Reconstruye un estado desde el formato de `state_to_dict`.

    Los términos repetidos se suman; "temporal" es opcional (0 por defecto).
    """
    terms = {}
    for term in payload.get('terms', []):
        counts = {
            Mode(o['spatial'], o['polarization'], o.get('temporal', 0)): int(o['count'])
            for o in term['occupations']
        }
        re, im = term['amplitude']
        basis = FockBasisState.from_counts(counts)
        terms[basis] = terms.get(basis, 0j) + complex(re, im)
    return PureState(terms)
