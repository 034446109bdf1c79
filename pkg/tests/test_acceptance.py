"""
Verificación de extremo a extremo de los valores de referencia del esquema de proyección.
"""

from math import cos, radians

import numpy as np
import pytest

from src.experiment_harness.counting import RateModel, simulate_counts
from src.experiment_harness.scans import ScanKind, ScanResult, ScanSpec, run_scan
from src.experiment_harness.visibility import estimate_visibility
from src.fock_core.states import inner_product
from src.projection_analysis.amplitudes import analytic_a4f, angle_condition_residual, solve_second_angle
from src.projection_analysis.projector import (
    ProjectionSetting,
    detection_probability,
    family_filter_probability,
    family_leakage_probability,
)
from src.state_library.biphoton_states import BellIndex, bell_state
from src.utils.errors import NoSolution

DELTA_DEG = np.arange(0, 361, 10)
PROJECTED = {n: bell_state(BellIndex(0, n)) for n in range(3)}


def psi0(n):
    return PROJECTED[n]


def delta_scan(theta):
    return run_scan(ScanSpec(ScanKind.DELTA, tuple(np.radians(DELTA_DEG)), ProjectionSetting(theta, theta)))


def test_basis_is_orthonormal(basis):
    states = list(basis.values())
    gram = np.array([[inner_product(s, t) for t in states] for s in states])
    assert np.max(np.abs(gram - np.eye(9))) < 1e-12


@pytest.mark.parametrize("idx", BellIndex.all(), ids=lambda i: i.name)
def test_family_filtering(idx):
    p = family_filter_probability(bell_state(idx))
    if idx.m == 0:
        assert p == pytest.approx(1.0, abs=1e-12)
    else:
        assert p < 1e-12


def test_magic_angle_projection(theta_star):
    setting = ProjectionSetting(theta_star, theta_star, overlap=1.0)
    assert detection_probability(psi0(0), setting) == pytest.approx(1 / 3, abs=1e-9)
    assert detection_probability(psi0(1), setting) < 1e-12
    assert detection_probability(psi0(2), setting) < 1e-12


@pytest.mark.parametrize("n", [0, 1, 2])
def test_closed_form_agrees_with_propagation(n):
    for theta in np.linspace(0, np.pi / 4, 20):
        propagated = detection_probability(psi0(n), ProjectionSetting(theta, theta))
        assert abs(analytic_a4f(theta, n)) ** 2 == pytest.approx(propagated, abs=1e-9)


def test_two_angle_condition_locus():
    grid = np.radians(np.linspace(0.5, 44.5, 50))
    on_locus = off_locus = 0
    for theta1 in grid:
        for theta2 in grid:
            # ambos factores de coseno deben ser apreciables para que el residuo sea informativo
            if abs(cos(4 * theta1) * cos(4 * theta2)) < 1e-2:
                continue
            residual = abs(angle_condition_residual(theta1, theta2))
            if 1e-6 < residual < 1e-2:
                continue
            setting = ProjectionSetting(theta1, theta2)
            for n in (1, 2):
                p = detection_probability(psi0(n), setting)
                if residual < 1e-6:
                    assert p < 1e-10
                else:
                    assert p > 1e-10
            if residual < 1e-6:
                on_locus += 1
            else:
                off_locus += 1

    for theta1 in grid:
        try:
            theta2 = solve_second_angle(theta1)
        except NoSolution:
            continue
        setting = ProjectionSetting(theta1, theta2)
        for n in (1, 2):
            assert detection_probability(psi0(n), setting) < 1e-10
        on_locus += 1

    assert on_locus >= 40
    assert off_locus > 1000


def test_null_setting():
    setting = ProjectionSetting(0.0, radians(22.5))
    for n in range(3):
        assert detection_probability(psi0(n), setting) < 1e-12


def test_distinguishable_background(theta_star):
    distinguishable = ProjectionSetting(theta_star, theta_star, overlap=0.0)
    for n in range(3):
        assert detection_probability(psi0(n), distinguishable) == pytest.approx(2 / 9, abs=1e-9)
    ratio = (detection_probability(psi0(0), distinguishable.replace(overlap=1.0))
             / detection_probability(psi0(0), distinguishable))
    assert ratio == pytest.approx(1.5, abs=1e-9)


def test_delta_scan_shapes(theta_star):
    flat = delta_scan(0.0).frame['probability'].to_numpy()
    assert flat.max() - flat.min() < 1e-9
    assert flat[0] == pytest.approx(1 / 3, abs=1e-9)

    fringe = delta_scan(radians(22.5)).frame['probability'].to_numpy()
    np.testing.assert_allclose(fringe, np.cos(np.radians(DELTA_DEG)) ** 2 / 3, atol=1e-9)

    magic = delta_scan(theta_star).frame['probability'].to_numpy()
    assert magic[0] == pytest.approx(magic.max(), abs=1e-12)
    interior = np.arange(1, len(magic) - 1)
    minima = [DELTA_DEG[i] for i in interior if magic[i] < magic[i - 1] and magic[i] < magic[i + 1]]
    assert minima == [120, 240]


def test_non_ideal_pbs_leakage():
    p = family_leakage_probability(reflect_h=0.05)
    assert 0.002 <= p <= 0.02


def test_monte_carlo_statistics(tmp_path):
    setting = ProjectionSetting.magic()
    single = run_scan(ScanSpec(ScanKind.OVERLAP, (1.0,), setting, 'psi00'))
    model = RateModel.calibrated(peak_rate_hz=1.63)
    assert model.mean_rate(single.frame['probability'].iloc[0]) == pytest.approx(1.63, abs=1e-8)

    counts = np.array([simulate_counts(single, model, 600, seed).frame['counts'].iloc[0] for seed in range(1000)])
    sigma_mean = np.sqrt(978 / len(counts))
    assert abs(counts.mean() - 978) <= 3 * sigma_mean

    scan = delta_scan(radians(22.5))
    first = simulate_counts(scan, model, 600, seed=2024).to_csv(tmp_path / "a.csv")
    second = simulate_counts(scan, model, 600, seed=2024).to_csv(tmp_path / "b.csv")
    assert first.read_bytes() == second.read_bytes()


def test_visibility_pipeline():
    scan = delta_scan(radians(22.5))
    visibility, _ = estimate_visibility(scan)
    assert visibility == pytest.approx(1.0, abs=1e-6)

    model = RateModel.calibrated(peak_rate_hz=1.63, background_rate=0.2)
    noisy = simulate_counts(scan, model, 480, seed=12345)
    noiseless_frame = noisy.frame.copy()
    noiseless_frame['counts'] = noiseless_frame['rate_hz'] * 480
    reference, _ = estimate_visibility(ScanResult(noiseless_frame, ScanKind.DELTA, scan.spec))

    measured, uncertainty = estimate_visibility(noisy)
    assert uncertainty > 0
    assert abs(measured - reference) <= 3 * uncertainty
