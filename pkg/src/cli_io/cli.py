"""
Interfaz de línea de comandos del simulador.

Comandos: state, project, angles, scan, montecarlo, visibility.
Los ángulos se pasan en grados (o "magic" para θ* exacto) y se convierten
a radianes una única vez, al parsear.
"""

import argparse
import json
import logging
import math
import sys
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from src.experiment_harness.counting import RateModel, simulate_counts
from src.experiment_harness.scans import ScanKind, ScanSpec, run_scan
from src.experiment_harness.visibility import estimate_visibility
from src.fock_core.detection import postselect
from src.fock_core.serialization import state_to_dict
from src.fock_core.states import DEFAULT_PRUNE_THRESHOLD, NORM_TOLERANCE, PureState, equal_up_to_phase
from src.fock_core.transforms import DEFAULT_MAX_PHOTONS
from src.optical_elements.circuit import FOURFOLD, circuit_from_dict, circuit_to_dict
from src.projection_analysis.amplitudes import (
    analytic_a4f,
    analytic_a4f_continuous,
    angle_condition_residual,
    solve_second_angle,
)
from src.projection_analysis.projector import (
    ProjectionSetting,
    detection_probability,
    outcome_class_probabilities,
)
from src.report_generator.report_builder import ReportBuilder
from src.state_library.biphoton_states import named_state, phi2_reference
from src.utils.config import load_config, load_scan_presets, resolve_output_dir
from src.utils.errors import ComputationError, FitDegenerate, InvalidScan, ParameterError
from .run_config import (
    DEFAULT_SEED,
    MAGIC_TOKEN,
    RunConfig,
    angle_arg,
    finite_float,
    load_scan_file,
    parse_angle,
    pick,
    write_manifest,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COMPUTATION = 3
EXIT_IO = 4

PROJECTED_STATES = {'psi00': 0, 'psi01': 1, 'psi02': 2}


def _add_setting_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--theta1', type=angle_arg, help="Lámina en c (grados o 'magic')")
    parser.add_argument('--theta2', type=angle_arg, help="Lámina en d (grados o 'magic')")
    parser.add_argument('--pre-phase', type=angle_arg, help="Fase previa al PBS en a (grados)")
    parser.add_argument('--gamma', type=finite_float, help="Solapamiento temporal en [0, 1]")
    parser.add_argument('--reflect-h', type=finite_float, help="Reflectividad H del primer PBS")
    parser.add_argument('--reflect-v', type=finite_float, help="Reflectividad V del primer PBS")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='sim',
        description="Simulador de proyección de dos qutrits de bifotones"
    )
    parser.add_argument('--config', type=Path, help="Ruta alternativa a config.yaml")
    parser.add_argument('--output-dir', help="Directorio de salida")
    parser.add_argument('-v', '--verbose', action='store_true', help="Nivel DEBUG")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('state', help="Volcado JSON de un estado con nombre")
    p.add_argument('name', help="psi00 … psi22 o phi2")
    p.add_argument('--delta', type=finite_float, help="δ en grados (phi2)")
    p.add_argument('--output', type=Path)

    p = sub.add_parser('project', help="Probabilidad de detección cuádruple")
    p.add_argument('--state', default='psi00')
    p.add_argument('--delta', type=finite_float, help="δ en grados (phi2)")
    _add_setting_args(p)
    p.add_argument('--circuit', type=Path, help="Circuito JSON a usar en lugar de la etapa estándar")
    p.add_argument('--save-circuit', type=Path, help="Guarda el circuito usado como JSON")
    p.add_argument('--format', choices=('text', 'json'), default='text')
    p.add_argument('--output', type=Path)

    p = sub.add_parser('angles', help="θ2 tal que tan4θ1·tan4θ2 = 2")
    p.add_argument('--theta1', type=angle_arg, required=True)
    p.add_argument('--format', choices=('text', 'json'), default='text')

    p = sub.add_parser('scan', help="Barrido de solapamiento, retardo o δ")
    p.add_argument('--kind', choices=[k.value for k in ScanKind])
    p.add_argument('--from', dest='start', type=finite_float)
    p.add_argument('--to', dest='stop', type=finite_float)
    p.add_argument('--steps', type=int, help="Número de puntos")
    p.add_argument('--state')
    p.add_argument('--sigma', type=finite_float, help="Longitud de coherencia para barridos de retardo")
    _add_setting_args(p)
    p.add_argument('--preset', help="Barrido predefinido de scan_presets.yaml")
    p.add_argument('--output', type=Path)
    p.add_argument('--format', choices=('csv', 'json'))
    p.add_argument('--report', action='store_true', help="Genera además un reporte HTML")

    p = sub.add_parser('montecarlo', help="Conteos de Poisson sobre un barrido")
    p.add_argument('--scan-file', type=Path, required=True)
    p.add_argument('--kind', choices=[k.value for k in ScanKind])
    p.add_argument('--peak-rate', type=finite_float, help="Tasa (Hz) del estado proyectado")
    p.add_argument('--calibration-probability', type=finite_float)
    p.add_argument('--rate-scale', type=finite_float, help="Hz por unidad de probabilidad")
    p.add_argument('--background', type=finite_float, help="Fondo (Hz)")
    p.add_argument('--integration', type=finite_float, help="Segundos por punto")
    p.add_argument('--seed', type=int)
    p.add_argument('--output', type=Path)
    p.add_argument('--report', action='store_true')

    p = sub.add_parser('visibility', help="Visibilidad de un barrido δ")
    p.add_argument('--scan-file', type=Path, required=True)
    p.add_argument('--kind', choices=[k.value for k in ScanKind])
    p.add_argument('--theta', type=angle_arg)
    p.add_argument('--format', choices=('text', 'json'), default='text')

    return parser


def resolve_setting(args: argparse.Namespace, config: Dict, preset: Optional[Dict] = None) -> ProjectionSetting:
    """Configuración de proyección: flag > preset > config.yaml > default."""
    preset = preset or {}
    defaults = config.get('projection', {})

    def angle(flag, key, default):
        if flag is not None:
            return flag
        return parse_angle(pick(preset.get(key), defaults.get(key), default=default))

    return ProjectionSetting(
        theta1=angle(args.theta1, 'theta1', MAGIC_TOKEN),
        theta2=angle(args.theta2, 'theta2', MAGIC_TOKEN),
        pre_pbs_phase=angle(args.pre_phase, 'pre_phase', 0.0),
        overlap=float(pick(args.gamma, preset.get('gamma'), defaults.get('overlap'), default=1.0)),
        reflect_h=float(pick(args.reflect_h, preset.get('reflect_h'), defaults.get('reflect_h'), default=0.0)),
        reflect_v=float(pick(args.reflect_v, preset.get('reflect_v'), defaults.get('reflect_v'), default=1.0)),
    )


def setting_params(setting: ProjectionSetting) -> Dict:
    return {
        'theta1_deg': math.degrees(setting.theta1),
        'theta2_deg': math.degrees(setting.theta2),
        'pre_phase_deg': math.degrees(setting.pre_pbs_phase),
        'gamma': setting.overlap,
        'reflect_h': setting.reflect_h,
        'reflect_v': setting.reflect_v,
    }


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def _emit(report: Dict, fmt: str, output: Optional[Path] = None) -> None:
    if fmt == 'json':
        text = json.dumps(report, indent=2, ensure_ascii=False)
    else:
        text = "\n".join(f"{key}: {value}" for key, value in report.items())
    if output:
        output.parent.mkdir(parents=True, exist_ok=True)
        with open(output, 'w', encoding='utf-8') as f:
            f.write(text + "\n")
        logger.info(f"Salida guardada en: {output}")
    else:
        print(text)


def cmd_state(args: argparse.Namespace, config: Dict) -> int:
    """Volcado JSON de un estado, con chequeo de norma."""
    delta = math.radians(args.delta) if args.delta is not None else None
    state = named_state(args.name, delta)
    payload = state_to_dict(state, name=args.name)
    payload['norm_ok'] = abs(payload['norm'] - 1.0) < NORM_TOLERANCE

    if args.name.strip().lower() == 'phi2':
        delta_deg = args.delta if args.delta is not None else 0.0
        reference = phi2_reference(delta_deg)
        payload['delta_deg'] = delta_deg
        payload['reference'] = reference
        payload['matches_reference'] = bool(reference) and bool(equal_up_to_phase(state, named_state(reference)))
    elif args.delta is not None:
        logger.warning(f"--delta se ignora para {args.name}")

    _emit(payload, 'json', args.output)
    return EXIT_OK


def project_report(name: str, state: PureState, setting: ProjectionSetting, delta: Optional[float] = None) -> Dict:
    """Probabilidad propagada y, cuando aplica, la analítica y su diferencia."""
    probability = detection_probability(state, setting)
    report = {
        'state': name,
        **setting_params(setting),
        'propagated_probability': probability,
        'angle_condition_residual': _finite_or_none(angle_condition_residual(setting.theta1, setting.theta2)),
    }

    ideal = (setting.is_degenerate and setting.overlap == 1.0 and setting.pre_pbs_phase == 0.0
             and setting.reflect_h == 0.0 and setting.reflect_v == 1.0)
    key = name.strip().lower()
    analytic = None
    if ideal and key in PROJECTED_STATES:
        analytic = abs(analytic_a4f(setting.theta1, PROJECTED_STATES[key])) ** 2
    elif ideal and key == 'phi2':
        analytic = abs(analytic_a4f_continuous(setting.theta1, delta or 0.0)) ** 2
    if analytic is not None:
        report['analytic_probability'] = analytic
        report['difference'] = analytic - probability

    report['outcome_classes'] = outcome_class_probabilities(state, setting)
    return report


def cmd_project(args: argparse.Namespace, config: Dict) -> int:
    delta = math.radians(args.delta) if args.delta is not None else None
    state = named_state(args.state, delta)
    simulation = config.get('simulation', {})

    if args.circuit:
        with open(args.circuit, 'r', encoding='utf-8') as f:
            circuit = circuit_from_dict(json.load(f))
        output = circuit.apply(
            state,
            max_photons=simulation.get('max_photons', DEFAULT_MAX_PHOTONS),
            prune_threshold=simulation.get('prune_threshold', DEFAULT_PRUNE_THRESHOLD)
        )
        report = {
            'state': args.state,
            'circuit': str(args.circuit),
            'propagated_probability': postselect(output, FOURFOLD).probability,
        }
    else:
        setting = resolve_setting(args, config)
        circuit = setting.circuit()
        report = project_report(args.state, state, setting, delta)

    if args.save_circuit:
        args.save_circuit.parent.mkdir(parents=True, exist_ok=True)
        with open(args.save_circuit, 'w', encoding='utf-8') as f:
            json.dump(circuit_to_dict(circuit), f, indent=2)
        logger.info(f"Circuito guardado en: {args.save_circuit}")

    _emit(report, args.format, args.output)
    return EXIT_OK


def cmd_angles(args: argparse.Namespace, config: Dict) -> int:
    theta2 = solve_second_angle(args.theta1)
    report = {
        'theta1_deg': math.degrees(args.theta1),
        'theta2_deg': math.degrees(theta2),
        'residual': angle_condition_residual(args.theta1, theta2),
    }
    _emit(report, args.format)
    return EXIT_OK


def _maybe_visibility(result) -> Optional[tuple]:
    if result.scan_kind != ScanKind.DELTA or result.spec is None:
        return None
    try:
        return estimate_visibility(result)
    except FitDegenerate as e:
        logger.warning(f"Sin visibilidad para el reporte: {e}")
        return None


def _write_report(result, manifest: Dict, data_path: Path) -> None:
    builder = ReportBuilder()
    html = builder.build_report(result, manifest, visibility=_maybe_visibility(result))
    builder.save(html, data_path.with_suffix('.html'))


def cmd_scan(args: argparse.Namespace, config: Dict) -> int:
    started = datetime.now()
    preset: Dict = {}
    if args.preset:
        presets = load_scan_presets()
        if args.preset not in presets:
            raise InvalidScan(f"Barrido predefinido desconocido: {args.preset} (disponibles: {', '.join(presets)})")
        preset = presets[args.preset]

    kind = pick(args.kind, preset.get('kind'))
    start = pick(args.start, preset.get('from'))
    stop = pick(args.stop, preset.get('to'))
    steps = pick(args.steps, preset.get('steps'))
    if kind is None or start is None or stop is None or steps is None:
        raise InvalidScan("Se requieren --kind, --from, --to y --steps (o --preset)")
    if int(steps) < 1:
        raise InvalidScan(f"--steps debe ser al menos 1 (recibido {steps})")

    try:
        kind = ScanKind(kind)
    except ValueError:
        raise InvalidScan(f"Tipo de barrido desconocido: {kind}")
    grid = np.linspace(float(start), float(stop), int(steps))
    if kind == ScanKind.DELTA:
        grid = np.radians(grid)

    experiment = config.get('experiment', {})
    spec = ScanSpec(
        scan_kind=kind,
        grid=tuple(grid),
        setting=resolve_setting(args, config, preset),
        state_source=pick(args.state, preset.get('state'), default='psi00'),
        coherence_sigma=float(pick(args.sigma, preset.get('coherence_sigma'),
                                   experiment.get('coherence_sigma'), default=1.0)),
    )
    result = run_scan(spec)

    fmt = pick(args.format, config.get('output', {}).get('format'), default='csv')
    output_dir = resolve_output_dir(config, args.output_dir)
    path = args.output or output_dir / f"{args.preset or 'scan_' + kind.value}.{fmt}"
    run = RunConfig('scan', params={'preset': args.preset, **spec.to_dict()}, output=path, format=fmt)

    if fmt == 'json':
        result.to_json(path)
    else:
        result.to_csv(path)
    manifest = run.manifest(started, scan=spec.to_dict())
    write_manifest(path, manifest)
    if args.report:
        _write_report(result, manifest, path)
    print(path)
    return EXIT_OK


def cmd_montecarlo(args: argparse.Namespace, config: Dict) -> int:
    started = datetime.now()
    result = load_scan_file(args.scan_file, args.kind)
    experiment = config.get('experiment', {})

    background = float(pick(args.background, experiment.get('background_rate_hz'), default=0.0))
    if args.rate_scale is not None:
        model = RateModel(args.rate_scale, background)
    else:
        model = RateModel.calibrated(
            float(pick(args.peak_rate, experiment.get('peak_rate_hz'), default=1.63)),
            float(pick(args.calibration_probability, experiment.get('calibration_probability'), default=1 / 3)),
            background
        )
    integration = float(pick(args.integration, experiment.get('integration_seconds'), default=600.0))
    seed = int(pick(args.seed, experiment.get('seed'), default=DEFAULT_SEED))

    noisy = simulate_counts(result, model, integration, seed)

    output_dir = resolve_output_dir(config, args.output_dir)
    path = args.output or output_dir / f"{args.scan_file.stem}_mc.csv"
    run = RunConfig(
        'montecarlo',
        params={
            'scan_file': str(args.scan_file),
            'peak_rate_scale': model.peak_rate_scale,
            'background_rate_hz': model.background_rate,
            'integration_seconds': integration,
        },
        output=path,
        seed=seed
    )
    noisy.to_csv(path)
    extra = {'model': {'peak_rate_scale': model.peak_rate_scale, 'background_rate': model.background_rate}}
    if noisy.spec is not None:
        extra['scan'] = noisy.spec.to_dict()
    manifest = run.manifest(started, **extra)
    write_manifest(path, manifest)
    if args.report:
        _write_report(noisy, manifest, path)
    print(path)
    return EXIT_OK


def cmd_visibility(args: argparse.Namespace, config: Dict) -> int:
    result = load_scan_file(args.scan_file, args.kind)
    visibility, uncertainty = estimate_visibility(result, args.theta)
    report = {
        'scan_file': str(args.scan_file),
        'fitted_column': 'counts' if result.has_counts else 'probability',
        'visibility': visibility,
        'uncertainty': uncertainty,
    }
    _emit(report, args.format)
    return EXIT_OK


COMMANDS = {
    'state': cmd_state,
    'project': cmd_project,
    'angles': cmd_angles,
    'scan': cmd_scan,
    'montecarlo': cmd_montecarlo,
    'visibility': cmd_visibility,
}


def main(argv: Optional[List[str]] = None, config: Optional[Dict] = None) -> int:
    """
    Punto de entrada de la CLI.

    Args:
        argv: Argumentos (por defecto sys.argv[1:])
        config: Configuración ya cargada (por defecto config/config.yaml)

    Returns:
        Código de salida: 0 éxito, 2 uso, 3 cálculo, 4 E/S
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        if config is None:
            config = load_config(args.config)
        return COMMANDS[args.command](args, config)
    except (ParameterError, json.JSONDecodeError, KeyError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        logger.error(f"Error de uso: {e}")
        return EXIT_USAGE
    except ComputationError as e:
        logger.error(f"Error de cálculo: {e}")
        return EXIT_COMPUTATION
    except OSError as e:
        logger.error(f"Error de E/S: {e}")
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(main())
