import json
from math import radians, sqrt

import pandas as pd
import pytest

from src.cli_io.cli import EXIT_COMPUTATION, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from src.cli_io.run_config import RunConfig, manifest_path, parse_angle
from src.fock_core.serialization import state_from_dict
from src.fock_core.states import equal_up_to_phase
from src.projection_analysis.amplitudes import magic_angle
from src.state_library.biphoton_states import named_state
from src.utils.errors import ParameterError


def run(capsys, cli_config, *argv):
    code = main(list(argv), config=cli_config)
    return code, capsys.readouterr().out


def run_json(capsys, cli_config, *argv):
    code, out = run(capsys, cli_config, *argv)
    assert code == EXIT_OK
    return json.loads(out)


class TestAngles:
    def test_magic_token(self):
        assert parse_angle("magic") == magic_angle()
        assert parse_angle("MAGIC") == magic_angle()

    def test_numeric_angles_are_used_literally(self):
        assert parse_angle("13.68") == radians(13.68)
        assert parse_angle(22.5) == radians(22.5)

    def test_invalid_angles(self):
        for token in ("abc", "nan", "inf", None):
            with pytest.raises(ParameterError):
                parse_angle(token)

    def test_run_config_format(self):
        with pytest.raises(ParameterError):
            RunConfig('scan', format='xml')


class TestState:
    def test_psi00_dump(self, capsys, cli_config):
        payload = run_json(capsys, cli_config, 'state', 'psi00')
        assert payload['norm_ok'] is True
        amplitudes = sorted(term['amplitude'][0] for term in payload['terms'])
        assert amplitudes == pytest.approx([1 / sqrt(12), 1 / sqrt(12), 2 / sqrt(12)])
        assert equal_up_to_phase(state_from_dict(payload), named_state('psi00'))

    def test_phi2_matches_psi01(self, capsys, cli_config):
        payload = run_json(capsys, cli_config, 'state', 'phi2', '--delta', '120')
        assert payload['reference'] == 'psi01'
        assert payload['matches_reference'] is True

    def test_phi2_off_grid(self, capsys, cli_config):
        payload = run_json(capsys, cli_config, 'state', 'phi2', '--delta', '45')
        assert payload['reference'] is None
        assert payload['matches_reference'] is False

    def test_unknown_state(self, capsys, cli_config):
        code, _ = run(capsys, cli_config, 'state', 'psi33')
        assert code == EXIT_USAGE

    def test_output_file(self, capsys, cli_config, tmp_path):
        target = tmp_path / "state.json"
        code, _ = run(capsys, cli_config, 'state', 'psi11', '--output', str(target))
        assert code == EXIT_OK
        payload = json.loads(target.read_text())
        assert equal_up_to_phase(state_from_dict(payload), named_state('psi11'))


class TestProject:
    def test_magic_projection(self, capsys, cli_config):
        report = run_json(capsys, cli_config, 'project', '--state', 'psi00',
                          '--theta1', 'magic', '--theta2', 'magic', '--format', 'json')
        assert report['propagated_probability'] == pytest.approx(1 / 3, abs=1e-9)
        assert report['analytic_probability'] == pytest.approx(1 / 3, abs=1e-12)
        assert abs(report['difference']) < 1e-9

    def test_rejected_state(self, capsys, cli_config):
        report = run_json(capsys, cli_config, 'project', '--state', 'psi01', '--format', 'json')
        assert report['propagated_probability'] <= 1e-12

    def test_null_setting(self, capsys, cli_config):
        report = run_json(capsys, cli_config, 'project', '--state', 'psi00',
                          '--theta1', '0', '--theta2', '22.5', '--format', 'json')
        assert report['propagated_probability'] <= 1e-12
        assert 'analytic_probability' not in report

    def test_phi2_analytic(self, capsys, cli_config):
        report = run_json(capsys, cli_config, 'project', '--state', 'phi2', '--delta', '60',
                          '--theta1', '22.5', '--theta2', '22.5', '--format', 'json')
        assert report['propagated_probability'] == pytest.approx(0.25 / 3, abs=1e-9)
        assert abs(report['difference']) < 1e-9

    def test_bad_angle_is_a_usage_error(self, capsys, cli_config):
        code, _ = run(capsys, cli_config, 'project', '--theta1', 'abc')
        assert code == EXIT_USAGE

    def test_bad_overlap_is_a_usage_error(self, capsys, cli_config):
        code, _ = run(capsys, cli_config, 'project', '--gamma', '2')
        assert code == EXIT_USAGE

    def test_saved_circuit_reproduces_probability(self, capsys, cli_config, tmp_path):
        circuit_file = tmp_path / "stage.json"
        direct = run_json(capsys, cli_config, 'project', '--state', 'psi02', '--pre-phase', '120',
                          '--gamma', '0.8', '--save-circuit', str(circuit_file), '--format', 'json')
        assert circuit_file.exists()
        replayed = run_json(capsys, cli_config, 'project', '--state', 'psi02',
                            '--circuit', str(circuit_file), '--format', 'json')
        assert replayed['propagated_probability'] == pytest.approx(direct['propagated_probability'], abs=1e-12)

    def test_missing_circuit_file(self, capsys, cli_config, tmp_path):
        code, _ = run(capsys, cli_config, 'project', '--circuit', str(tmp_path / "none.json"))
        assert code == EXIT_IO


class TestAnglesCommand:
    def test_magic_is_its_own_partner(self, capsys, cli_config):
        report = run_json(capsys, cli_config, 'angles', '--theta1', 'magic', '--format', 'json')
        assert report['theta2_deg'] == pytest.approx(13.68, abs=5e-3)
        assert abs(report['residual']) < 1e-9

    def test_null_angle_has_no_solution(self, capsys, cli_config):
        code, _ = run(capsys, cli_config, 'angles', '--theta1', '0')
        assert code == EXIT_COMPUTATION


class TestScan:
    def test_delta_scan_minima(self, capsys, cli_config, output_dir):
        code, out = run(capsys, cli_config, 'scan', '--kind', 'delta', '--from', '0', '--to', '360',
                        '--steps', '37', '--theta1', 'magic', '--theta2', 'magic')
        assert code == EXIT_OK
        path = output_dir / "scan_delta.csv"
        assert out.strip() == str(path)
        frame = pd.read_csv(path)
        lowest = frame.nsmallest(2, 'probability')['parameter'].tolist()
        assert sorted(lowest) == [120, 240]
        manifest = json.loads(manifest_path(path).read_text())
        assert manifest['command'] == 'scan'
        assert manifest['scan']['scan_kind'] == 'delta'

    def test_delay_scan_endpoints(self, capsys, cli_config, tmp_path):
        target = tmp_path / "delay.csv"
        code, _ = run(capsys, cli_config, 'scan', '--kind', 'delay', '--from', '-3', '--to', '3',
                      '--steps', '61', '--state', 'psi00', '--sigma', '1', '--output', str(target))
        assert code == EXIT_OK
        frame = pd.read_csv(target)
        assert frame['probability'].iloc[0] == pytest.approx(2 / 9, abs=1e-3)
        assert frame['probability'].iloc[-1] == pytest.approx(2 / 9, abs=1e-3)
        assert frame['probability'].iloc[30] == pytest.approx(1 / 3, abs=1e-6)

    def test_json_format(self, capsys, cli_config, tmp_path):
        target = tmp_path / "overlap.json"
        code, _ = run(capsys, cli_config, 'scan', '--kind', 'overlap', '--from', '0', '--to', '1',
                      '--steps', '3', '--format', 'json', '--output', str(target))
        assert code == EXIT_OK
        records = json.loads(target.read_text())
        assert records[0]['probability'] == pytest.approx(2 / 9, abs=1e-9)
        assert manifest_path(target).exists()

    def test_preset_with_report(self, capsys, cli_config, output_dir):
        code, _ = run(capsys, cli_config, 'scan', '--preset', 'delta_theta22_5', '--report')
        assert code == EXIT_OK
        assert (output_dir / "delta_theta22_5.csv").exists()
        html = (output_dir / "delta_theta22_5.html").read_text(encoding='utf-8')
        assert "Barrido de delta" in html

    def test_unknown_preset(self, capsys, cli_config, output_dir):
        code, _ = run(capsys, cli_config, 'scan', '--preset', 'nope')
        assert code == EXIT_USAGE

    def test_incomplete_grid(self, capsys, cli_config, output_dir):
        code, _ = run(capsys, cli_config, 'scan', '--kind', 'delta', '--from', '0')
        assert code == EXIT_USAGE


class TestMonteCarlo:
    @pytest.fixture
    def delta_scan(self, capsys, cli_config, tmp_path):
        target = tmp_path / "delta.csv"
        code, _ = run(capsys, cli_config, 'scan', '--kind', 'delta', '--from', '0', '--to', '360',
                      '--steps', '37', '--theta1', '22.5', '--theta2', '22.5', '--output', str(target))
        assert code == EXIT_OK
        return target

    def test_fixed_seed_is_byte_identical(self, capsys, cli_config, delta_scan, tmp_path):
        outputs = []
        for name in ("first.csv", "second.csv"):
            target = tmp_path / name
            code, _ = run(capsys, cli_config, 'montecarlo', '--scan-file', str(delta_scan),
                          '--peak-rate', '1.63', '--background', '0.1', '--integration', '480',
                          '--seed', '42', '--output', str(target))
            assert code == EXIT_OK
            outputs.append(target.read_bytes())
        assert outputs[0] == outputs[1]

    def test_manifest_records_model_and_seed(self, capsys, cli_config, delta_scan, output_dir):
        code, out = run(capsys, cli_config, 'montecarlo', '--scan-file', str(delta_scan), '--report')
        assert code == EXIT_OK
        path = output_dir / "delta_mc.csv"
        manifest = json.loads(manifest_path(path).read_text())
        assert manifest['seed'] == 12345
        assert manifest['model']['peak_rate_scale'] == pytest.approx(4.89)
        assert manifest['scan']['scan_kind'] == 'delta'
        assert path.with_suffix('.html').exists()

    def test_visibility_of_noisy_scan(self, capsys, cli_config, delta_scan, tmp_path):
        noisy = tmp_path / "noisy.csv"
        run(capsys, cli_config, 'montecarlo', '--scan-file', str(delta_scan), '--output', str(noisy))
        report = run_json(capsys, cli_config, 'visibility', '--scan-file', str(noisy), '--format', 'json')
        assert report['fitted_column'] == 'counts'
        assert 0.8 < report['visibility'] < 1.2
        assert report['uncertainty'] > 0

    def test_visibility_of_noiseless_scan(self, capsys, cli_config, delta_scan):
        report = run_json(capsys, cli_config, 'visibility', '--scan-file', str(delta_scan), '--format', 'json')
        assert report['visibility'] == pytest.approx(1.0, abs=1e-6)

    def test_missing_scan_file(self, capsys, cli_config, tmp_path):
        code, _ = run(capsys, cli_config, 'montecarlo', '--scan-file', str(tmp_path / "none.csv"),
                      '--kind', 'delta')
        assert code == EXIT_IO

    def test_scan_without_manifest_needs_kind(self, capsys, cli_config, delta_scan):
        manifest_path(delta_scan).unlink()
        code, _ = run(capsys, cli_config, 'montecarlo', '--scan-file', str(delta_scan))
        assert code == EXIT_USAGE

    def test_json_scan_feeds_montecarlo_and_visibility(self, capsys, cli_config, tmp_path):
        scan = tmp_path / "delta.json"
        code, _ = run(capsys, cli_config, 'scan', '--kind', 'delta', '--from', '0', '--to', '360',
                      '--steps', '37', '--theta1', '22.5', '--theta2', '22.5',
                      '--format', 'json', '--output', str(scan))
        assert code == EXIT_OK
        noisy = tmp_path / "noisy.csv"
        code, _ = run(capsys, cli_config, 'montecarlo', '--scan-file', str(scan), '--output', str(noisy))
        assert code == EXIT_OK
        assert pd.read_csv(noisy)['counts'].notna().all()
        report = run_json(capsys, cli_config, 'visibility', '--scan-file', str(scan), '--format', 'json')
        assert report['fitted_column'] == 'probability'
        assert report['visibility'] == pytest.approx(1.0, abs=1e-6)

    def test_unparseable_scan_file_is_a_usage_error(self, capsys, cli_config, tmp_path):
        garbage = tmp_path / "garbage.csv"
        garbage.write_text("a,b\n1,2,3,4\n")
        code, _ = run(capsys, cli_config, 'montecarlo', '--scan-file', str(garbage), '--kind', 'delta')
        assert code == EXIT_USAGE
        broken = tmp_path / "broken.json"
        broken.write_text("{not json")
        code, _ = run(capsys, cli_config, 'visibility', '--scan-file', str(broken), '--kind', 'delta')
        assert code == EXIT_USAGE

    def test_unknown_kind_in_manifest_is_a_usage_error(self, capsys, cli_config, delta_scan):
        sidecar = manifest_path(delta_scan)
        manifest = json.loads(sidecar.read_text())
        manifest['scan']['scan_kind'] = 'phase'
        sidecar.write_text(json.dumps(manifest))
        code, _ = run(capsys, cli_config, 'montecarlo', '--scan-file', str(delta_scan))
        assert code == EXIT_USAGE
