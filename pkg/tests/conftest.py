import sys
from pathlib import Path

import pytest

# Add repository root to path (same as main.py)
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.projection_analysis.amplitudes import magic_angle
from src.state_library.biphoton_states import bell_basis
from src.utils.config import OUTPUT_DIR_ENV


@pytest.fixture(scope="session")
def basis():
    return bell_basis()


@pytest.fixture(scope="session")
def theta_star():
    return magic_angle()


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    target = tmp_path / "results"
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(target))
    return target


@pytest.fixture
def cli_config():
    return {
        'simulation': {'max_photons': 6, 'prune_threshold': 1e-14},
        'projection': {'theta1': 'magic', 'theta2': 'magic', 'pre_phase': 0.0, 'overlap': 1.0,
                       'reflect_h': 0.0, 'reflect_v': 1.0},
        'experiment': {'coherence_sigma': 1.0, 'peak_rate_hz': 1.63,
                       'calibration_probability': 1 / 3, 'background_rate_hz': 0.0,
                       'integration_seconds': 600, 'seed': 12345},
        'output': {'directory': 'results', 'format': 'csv'},
    }
