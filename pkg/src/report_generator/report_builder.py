"""
Generador de reportes HTML de barridos simulados.
"""

import logging
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
from jinja2 import Template

from src.experiment_harness.scans import ScanKind, ScanResult

logger = logging.getLogger(__name__)

PARAMETER_LABELS = {
    ScanKind.OVERLAP: 'γ',
    ScanKind.DELAY: 'retardo',
    ScanKind.DELTA: 'δ (grados)',
}


class ReportBuilder:
    """Construye reportes HTML de barridos."""

    def __init__(self, template_path: Path = None):
        if template_path is None:
            template_path = Path(__file__).parent / "templates" / "scan_report.html"
        self.template_path = Path(template_path)
        self.template = self._load_template()

    def _load_template(self) -> Template:
        """Carga el template HTML."""
        if self.template_path.exists():
            with open(self.template_path, 'r', encoding='utf-8') as f:
                return Template(f.read())
        return Template(self._default_template())

    def build_report(
        self,
        result: ScanResult,
        manifest: Dict,
        visibility: Optional[Tuple[float, float]] = None,
        date: datetime = None
    ) -> str:
        """
        Construye el reporte HTML.

        Args:
            result: Barrido (con o sin conteos)
            manifest: Manifiesto de la corrida
            visibility: (V, σ_V) si se estimó
            date: Fecha del reporte

        Returns:
            HTML del reporte
        """
        if date is None:
            date = datetime.now()

        frame = result.frame.copy()
        if result.scan_kind == ScanKind.DELTA:
            frame['parameter'] = np.degrees(frame['parameter'])

        rows = frame.to_dict(orient='records')
        best = frame.loc[frame['probability'].idxmax()]
        worst = frame.loc[frame['probability'].idxmin()]

        context = {
            'date': date.strftime('%d/%m/%Y %H:%M'),
            'scan_kind': result.scan_kind.value,
            'parameter_label': PARAMETER_LABELS[result.scan_kind],
            'rows': rows,
            'has_counts': result.has_counts,
            'max_point': best.to_dict(),
            'min_point': worst.to_dict(),
            'visibility': visibility,
            'manifest': manifest,
            'total_points': len(rows),
        }
        logger.info(f"Reporte generado para barrido '{result.scan_kind.value}' ({len(rows)} puntos)")
        return self.template.render(**context)

    def save(self, html: str, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(html)
        logger.info(f"Reporte guardado en: {path}")
        return path

    def _default_template(self) -> str:
        """Template HTML por defecto."""
        return """<!DOCTYPE html>
<html lang="es">
<head>
    <meta charset="UTF-8">
    <title>Barrido {{ scan_kind }} - {{ date }}</title>
    <style>
        body {
            font-family: -apple-system, BlinkMacSystemFont, 'Segoe UI', Roboto, sans-serif;
            color: #333;
            max-width: 1000px;
            margin: 0 auto;
            padding: 20px;
            background-color: #f5f5f5;
        }
        .header {
            background: linear-gradient(135deg, #667eea 0%, #764ba2 100%);
            color: white;
            padding: 25px;
            border-radius: 10px;
            margin-bottom: 25px;
        }
        .section {
            background: white;
            padding: 20px;
            margin-bottom: 20px;
            border-radius: 8px;
            box-shadow: 0 2px 4px rgba(0,0,0,0.1);
        }
        .section h2 {
            color: #667eea;
            border-bottom: 2px solid #667eea;
            padding-bottom: 8px;
        }
        table { border-collapse: collapse; width: 100%; }
        th, td { padding: 6px 10px; border-bottom: 1px solid #e5e7eb; text-align: right; }
        th { background: #f3f4f6; }
        .visibility { font-size: 1.4em; font-weight: bold; color: #10b981; }
        pre { background: #f9f9f9; padding: 10px; overflow-x: auto; }
    </style>
</head>
<body>
    <div class="header">
        <h1>Barrido de {{ scan_kind }}</h1>
        <p>{{ date }} · {{ total_points }} puntos</p>
    </div>

    <div class="section">
        <h2>Resumen</h2>
        <p>Máximo: p = {{ '%.6f' % max_point.probability }} en {{ parameter_label }} = {{ '%.4g' % max_point.parameter }}</p>
        <p>Mínimo: p = {{ '%.6f' % min_point.probability }} en {{ parameter_label }} = {{ '%.4g' % min_point.parameter }}</p>
        {% if visibility %}
        <p class="visibility">V = {{ '%.4f' % visibility[0] }} ± {{ '%.4f' % visibility[1] }}</p>
        {% endif %}
    </div>

    <div class="section">
        <h2>Puntos</h2>
        <table>
            <tr>
                <th>{{ parameter_label }}</th>
                <th>probabilidad</th>
                {% if has_counts %}<th>tasa (Hz)</th><th>conteos</th><th>σ</th>{% endif %}
            </tr>
            {% for row in rows %}
            <tr>
                <td>{{ '%.4g' % row.parameter }}</td>
                <td>{{ '%.6f' % row.probability }}</td>
                {% if has_counts %}
                <td>{{ '%.4f' % row.rate_hz }}</td>
                <td>{{ row.counts | int }}</td>
                <td>{{ '%.2f' % row.sigma_counts }}</td>
                {% endif %}
            </tr>
            {% endfor %}
        </table>
    </div>

    <div class="section">
        <h2>Manifiesto</h2>
        <pre>{% for key, value in manifest.items() %}{{ key }}: {{ value }}
{% endfor %}</pre>
    </div>
</body>
</html>"""
