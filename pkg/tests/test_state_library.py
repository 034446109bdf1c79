from math import radians, sqrt

import numpy as np
import pytest

from src.fock_core.modes import FockBasisState, Mode, Polarization
from src.fock_core.states import equal_up_to_phase, inner_product
from src.state_library.biphoton_states import (
    TAU,
    BellIndex,
    QutritAmplitudes,
    bell_state,
    biphoton_qutrit,
    named_state,
    phi2_delta_for,
    phi2_reference,
    spdc_second_order,
    state_names,
    tau_power,
)
from src.utils.errors import ParameterError, UnknownState

H, V = Polarization.H, Polarization.V


def test_tau_is_cube_root_of_unity():
    assert TAU ** 3 == pytest.approx(1.0)
    assert 1 + tau_power(1) + tau_power(2) == pytest.approx(0.0, abs=1e-15)
    assert tau_power(4) == pytest.approx(tau_power(1))


def test_logical_biphotons_are_orthonormal():
    states = [biphoton_qutrit(QutritAmplitudes(*row)) for row in np.eye(3)]
    for i, s in enumerate(states):
        for j, t in enumerate(states):
            assert inner_product(s, t) == pytest.approx(1.0 if i == j else 0.0, abs=1e-12)


def test_qutrit_requires_normalized_amplitudes():
    with pytest.raises(ParameterError):
        biphoton_qutrit(QutritAmplitudes(1, 1, 0))
    state = biphoton_qutrit(QutritAmplitudes(1, 1j, 1).normalized(), port='b')
    assert state.norm() == pytest.approx(1.0)
    assert all(basis.port_count('b') == 2 for basis, _ in state)


def test_psi00_monomial_amplitudes():
    state = bell_state(BellIndex(0, 0))
    a_h, a_v, b_h, b_v = Mode('a', H), Mode('a', V), Mode('b', H), Mode('b', V)
    expected = {
        FockBasisState.from_counts({a_h: 2, b_h: 2}): 1 / sqrt(12),
        FockBasisState.from_counts({a_h: 1, a_v: 1, b_h: 1, b_v: 1}): 2 / sqrt(12),
        FockBasisState.from_counts({a_v: 2, b_v: 2}): 1 / sqrt(12),
    }
    assert len(state) == 3
    for basis, amplitude in expected.items():
        assert state.amplitude(basis) == pytest.approx(amplitude)


def test_only_m0_family_has_matching_polarizations():
    for idx in BellIndex.all():
        balanced = all(b.port_count('a') == 2 and b.port_count('b') == 2 and
                       b.count(Mode('a', H)) == b.count(Mode('b', H)) for b, _ in bell_state(idx))
        assert balanced == (idx.m == 0)


def test_invalid_bell_index():
    with pytest.raises(UnknownState):
        BellIndex(3, 0)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_spdc_matches_projected_states(n):
    assert equal_up_to_phase(spdc_second_order(phi2_delta_for(n)), bell_state(BellIndex(0, n)))


def test_spdc_overlap_with_psi00():
    # ⟨ψ00|φ(δ)⟩ = (1 + e^{iδ} + e^{2iδ})/3
    delta = radians(200)
    expected = (1 + np.exp(1j * delta) + np.exp(2j * delta)) / 3
    assert inner_product(bell_state(BellIndex(0, 0)), spdc_second_order(delta)) == pytest.approx(expected)
    assert inner_product(bell_state(BellIndex(0, 0)), spdc_second_order(np.pi)) == pytest.approx(1 / 3)


def test_spdc_state_is_normalized_for_any_phase():
    rng = np.random.default_rng(11)
    for delta in rng.uniform(0, 2 * np.pi, 100):
        assert spdc_second_order(delta).norm() == pytest.approx(1.0, abs=1e-12)


def test_named_states():
    assert len(state_names()) == 10
    assert equal_up_to_phase(named_state("PSI12"), bell_state(BellIndex(1, 2)))
    assert equal_up_to_phase(named_state("phi2", radians(120)), named_state("psi01"))
    with pytest.raises(UnknownState):
        named_state("psi33")
    with pytest.raises(UnknownState):
        named_state("ghz")


def test_phi2_reference():
    assert phi2_reference(0) == "psi00"
    assert phi2_reference(240) == "psi02"
    assert phi2_reference(480) == "psi01"
    assert phi2_reference(90) is None
