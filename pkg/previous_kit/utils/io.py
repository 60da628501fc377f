"""Readers and writers for the toolkit's CSV and JSON artifacts.

Every CSV starts with the layout marker line (Config.CSV_HEADER). Decimals
are written in plain positional notation with the shortest digits that
round-trip exactly.
"""
import csv
import io
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from previous_kit.config import Config
from previous_kit.errors import FormatError, ToolkitError
from previous_kit.models.metrics import ArchMetrics
from previous_kit.models.network import NetworkDef, ShapedNetwork
from previous_kit.models.profile import PowerTrace, ScheduleEntry, TimingLog, TimingRecord
from previous_kit.models.regression import ModelBundle, Target
from previous_kit.models.report import PredictionReport, ReportSummary, SummaryRow, signed_error_pct
from previous_kit.utils.metrics import network_totals
from previous_kit.utils.netdef import parse_network, serialize_network

METRICS_COLUMNS = ('layer', 'kind', 'h_out', 'w_out', 'c_out', 'n_weights', 'ops', 'mem_ops')
TIMING_COLUMNS = ('layer', 'run', 'elapsed_ms')
SCHEDULE_COLUMNS = ('layer', 'n_runs', 'per_run_ms')
PREDICTION_COLUMNS = ('network', 'target', 'layer', 'kind', 'predicted', 'measured', 'error_pct')
PLOT_COLUMNS = ('network', 'target', 'layer', 'measured', 'predicted')
SUMMARY_COLUMNS = ('network', 'target', 'predicted_sum', 'measured_sum', 'sum_error_pct',
                   'network_total', 'network_measured', 'network_error_pct')
SHAPES_COLUMNS = ('layer', 'kind', 'inputs', 'h_out', 'w_out', 'c_out')
TABLE_COLUMNS = ('network', 'target', 'predicted_sum', 'measured_sum')
TRACE_PERIOD_KEY = 'sample_period_s'
TOTAL_ROW = 'TOTAL'


def fmt_decimal(value) -> str:
    """Shortest plain decimal that parses back to the same float."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return np.format_float_positional(float(value), unique=True, trim='-')


def stamp_line() -> str:
    return f'# generated {datetime.now(timezone.utc).isoformat(timespec="seconds")}'


def _render_csv(columns: Sequence[str], rows: Iterable[Sequence], stamp: bool = False) -> str:
    output = io.StringIO()
    output.write(Config.CSV_HEADER + '\n')
    if stamp:
        output.write(stamp_line() + '\n')
    writer = csv.writer(output, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow([value if isinstance(value, str) else fmt_decimal(value) for value in row])
    return output.getvalue()


def _data_lines(path) -> List[str]:
    text = Path(path).read_text(encoding='utf-8')
    return [line for line in text.splitlines() if line.strip() and not line.startswith('#')]


def _read_csv(path, columns: Sequence[str]) -> List[Dict[str, str]]:
    lines = _data_lines(path)
    if not lines:
        raise FormatError(f'{path}: no CSV header')
    reader = csv.DictReader(lines)
    if tuple(reader.fieldnames or ()) != tuple(columns):
        raise FormatError(f'{path}: expected columns {",".join(columns)}, got {",".join(reader.fieldnames or ())}')
    rows = list(reader)
    for number, row in enumerate(rows, start=2):
        if None in row or any(value is None for value in row.values()):
            raise FormatError(f'{path}: row {number} has {len(columns)} columns expected')
    return rows


def _number(path, row, key, cast=float):
    try:
        return cast(row[key])
    except (TypeError, ValueError):
        raise FormatError(f'{path}: invalid {key} value {row[key]!r} for {row.get("layer", "?")}')


def _optional(value: str) -> Optional[float]:
    return float(value) if value not in ('', None) else None


# Networks

def load_network(path) -> NetworkDef:
    return parse_network(Path(path).read_text(encoding='utf-8'))


def save_network(net: NetworkDef, path) -> Path:
    path = Path(path)
    path.write_text(serialize_network(net), encoding='utf-8')
    return path


# Metrics

def render_metrics_csv(metrics: Sequence[ArchMetrics], stamp: bool = False) -> str:
    """Per-layer metrics plus a TOTAL row."""
    rows = [[m.layer_name, m.kind.value, m.out_shape.h, m.out_shape.w, m.out_shape.c,
             m.n_weights, m.ops, m.mem_ops] for m in metrics]
    totals = network_totals(metrics)
    rows.append([TOTAL_ROW, '', '', '', '', totals['n_weights'], totals['ops'], totals['mem_ops']])
    return _render_csv(METRICS_COLUMNS, rows, stamp)


def read_metrics_csv(path) -> List[ArchMetrics]:
    metrics = []
    for row in _read_csv(path, METRICS_COLUMNS):
        if row['layer'] == TOTAL_ROW:
            continue
        try:
            metrics.append(ArchMetrics.from_dict(row))
        except (ValueError, ToolkitError) as e:
            raise FormatError(f'{path}: invalid metrics row for {row["layer"]}: {e}')
    return metrics


# Timing logs

def render_timing_csv(log: TimingLog, stamp: bool = False) -> str:
    rows = ([r.layer_name, r.run_index, r.elapsed_ms] for r in log.records)
    return _render_csv(TIMING_COLUMNS, rows, stamp)


def read_timing_csv(path) -> TimingLog:
    records = []
    for row in _read_csv(path, TIMING_COLUMNS):
        try:
            records.append(TimingRecord(layer_name=row['layer'], run_index=_number(path, row, 'run', int),
                                        elapsed_ms=_number(path, row, 'elapsed_ms')))
        except FormatError:
            raise
        except ToolkitError as e:
            raise FormatError(f'{path}: {e.message}')
    return TimingLog(records=tuple(records))


# Power traces

def render_trace_csv(trace: PowerTrace, stamp: bool = False) -> str:
    """Period line, then one watt value per line."""
    values, inverse = np.unique(trace.samples, return_inverse=True)
    text = [fmt_decimal(v) for v in values]
    lines = [Config.CSV_HEADER]
    if stamp:
        lines.append(stamp_line())
    lines.append(f'{TRACE_PERIOD_KEY}={fmt_decimal(trace.sample_period_s)}')
    lines.extend(text[i] for i in inverse.reshape(-1))
    return '\n'.join(lines) + '\n'


def read_trace_csv(path) -> PowerTrace:
    lines = _data_lines(path)
    if not lines or not lines[0].startswith(f'{TRACE_PERIOD_KEY}='):
        raise FormatError(f'{path}: missing "{TRACE_PERIOD_KEY}=" header line')
    try:
        period = float(lines[0].split('=', 1)[1])
        samples = np.asarray(lines[1:], dtype=float)
    except ValueError as e:
        raise FormatError(f'{path}: {e}')
    try:
        return PowerTrace(sample_period_s=period, samples=samples)
    except ToolkitError as e:
        raise FormatError(f'{path}: {e.message}')


# Schedules

def render_schedule_csv(schedule: Sequence[ScheduleEntry], stamp: bool = False) -> str:
    rows = ([e.layer_name, e.n_runs, e.per_run_ms] for e in schedule)
    return _render_csv(SCHEDULE_COLUMNS, rows, stamp)


def read_schedule_csv(path) -> List[ScheduleEntry]:
    entries = []
    for row in _read_csv(path, SCHEDULE_COLUMNS):
        try:
            entries.append(ScheduleEntry(layer_name=row['layer'], n_runs=_number(path, row, 'n_runs', int),
                                         per_run_ms=_number(path, row, 'per_run_ms')))
        except FormatError:
            raise
        except ToolkitError as e:
            raise FormatError(f'{path}: {e.message}')
    return entries


# JSON documents

def render_json(data, stamp: bool = False) -> str:
    if stamp:
        data = dict(data, generated_at=datetime.now(timezone.utc).isoformat(timespec='seconds'))
    return json.dumps(data, indent=2) + '\n'


def _load_json(path):
    try:
        return json.loads(Path(path).read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise FormatError(f'{path}: syntax error at line {e.lineno} column {e.colno}: {e.msg}')


def read_totals(path) -> Dict[str, object]:
    """Whole-network measurements: network, runtime_ms, energy_mj."""
    data = _load_json(path)
    if not isinstance(data, dict) or 'network' not in data:
        raise FormatError(f'{path}: totals must be an object with a "network" field')
    for key in ('runtime_ms', 'energy_mj'):
        if data.get(key) is not None and not isinstance(data[key], (int, float)):
            raise FormatError(f'{path}: {key} must be a number')
    return data


def save_bundle(bundle: ModelBundle, path, stamp: bool = False) -> Path:
    path = Path(path)
    path.write_text(render_json(bundle.to_dict(), stamp), encoding='utf-8')
    return path


def load_bundle(path) -> ModelBundle:
    return ModelBundle.from_dict(_load_json(path))


# Reports

def render_reports_csv(reports: Sequence[PredictionReport], stamp: bool = False) -> str:
    """Per-layer rows, then SUM and NETWORK aggregate rows per report."""
    rows = []
    for report in reports:
        target = report.target.value
        for row in report.per_layer:
            rows.append([report.network, target, row.layer_name, row.kind.value,
                         row.predicted, row.measured, row.error_pct])
        rows.append([report.network, target, 'SUM', '', report.sum_layers, report.sum_measured,
                     report.sum_error_pct])
        rows.append([report.network, target, 'NETWORK', '', report.network_total, report.network_measured,
                     report.network_error_pct])
    return _render_csv(PREDICTION_COLUMNS, rows, stamp)


def render_reports_json(reports: Sequence[PredictionReport], stamp: bool = False) -> str:
    return render_json({'reports': [report.to_dict() for report in reports]}, stamp)


def render_plot_data(reports: Sequence[PredictionReport]) -> str:
    """(measured, predicted) pairs of every measured layer."""
    rows = ([report.network, report.target.value, row.layer_name, row.measured, row.predicted]
            for report in reports for row in report.per_layer if row.measured is not None)
    return _render_csv(PLOT_COLUMNS, rows)


def load_reports(path) -> List[PredictionReport]:
    data = _load_json(path)
    if not isinstance(data, dict) or not isinstance(data.get('reports'), list):
        raise FormatError(f'{path}: expected an object with a "reports" list')
    try:
        return [PredictionReport.from_dict(item) for item in data['reports']]
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f'{path}: malformed report: {e}')


def read_summary_table(path) -> List[SummaryRow]:
    """Rows of network,target,predicted_sum,measured_sum totals."""
    rows = []
    for row in _read_csv(path, TABLE_COLUMNS):
        predicted = _number(path, row, 'predicted_sum')
        measured = _optional(row['measured_sum'])
        try:
            target = Target(row['target'])
        except ValueError:
            raise FormatError(f'{path}: unknown target {row["target"]!r}')
        rows.append(SummaryRow(
            network=row['network'],
            target=target,
            predicted_sum=predicted,
            measured_sum=measured,
            sum_error_pct=signed_error_pct(predicted, measured) if measured else None,
            network_total=predicted,
            network_measured=None,
            network_error_pct=None,
        ))
    return rows


def render_summary_csv(summary: ReportSummary, stamp: bool = False) -> str:
    rows = [[r.network, r.target.value, r.predicted_sum, r.measured_sum, r.sum_error_pct,
             r.network_total, r.network_measured, r.network_error_pct] for r in summary.rows]
    rows.append(['MAPE', '', '', '', summary.sum_mape, '', '', summary.network_mape])
    return _render_csv(SUMMARY_COLUMNS, rows, stamp)


def render_shapes_csv(shaped: ShapedNetwork, stamp: bool = False) -> str:
    """Resolved shapes of every layer in topological order."""
    rows = ([layer.name, layer.kind.value, '+'.join(layer.inputs),
             shapes.output.h, shapes.output.w, shapes.output.c]
            for layer, shapes in shaped.layers_in_order())
    return _render_csv(SHAPES_COLUMNS, rows, stamp)
