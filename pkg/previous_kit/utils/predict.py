"""Apply a model bundle to a network and account for prediction error."""
import math
from collections import OrderedDict
from dataclasses import replace
from typing import Dict, Mapping, Optional, Sequence

from previous_kit.errors import ValidationError
from previous_kit.extensions import logger
from previous_kit.models.metrics import ArchMetrics, MetricsOptions
from previous_kit.models.network import ShapedNetwork
from previous_kit.models.regression import ModelBundle, Target
from previous_kit.models.report import (
    LayerPrediction,
    PredictionReport,
    ReportSummary,
    SummaryRow,
    signed_error_pct,
)
from previous_kit.utils.metrics import network_metrics
from previous_kit.utils.regression import evaluate_layer, fit_network_coefficient


def bundle_metrics_options(bundle: ModelBundle) -> MetricsOptions:
    """Counting conventions the bundle was fitted with."""
    return MetricsOptions(
        im2col=bool(bundle.provenance.get('im2col', False)),
        count_bias_ops=bool(bundle.provenance.get('count_bias_ops', True)),
    )


def predict_metrics(bundle: ModelBundle, network: str, metrics: Sequence[ArchMetrics],
                    target: Target) -> PredictionReport:
    """Predict layers from precomputed metrics (topological order) and aggregate.

    Raises:
        MissingModelError: a layer kind has no model for the target
    """
    target = Target(target)
    rows = []
    for m in metrics:
        model = bundle.get_model(m.kind, target, m.layer_name)
        value, clamped = evaluate_layer(model, m)
        rows.append(LayerPrediction(layer_name=m.layer_name, kind=m.kind, predicted=value, clamped=clamped))

    breakdown: Dict[str, float] = OrderedDict()
    for row in rows:
        breakdown[row.kind.value] = breakdown.get(row.kind.value, 0.0) + row.predicted

    ranked = sorted(range(len(rows)), key=lambda i: (-rows[i].predicted, i))
    return PredictionReport(
        network=network,
        target=target,
        per_layer=tuple(rows),
        sum_layers=math.fsum(row.predicted for row in rows),
        c_used=bundle.coefficient(target),
        hot_layers=tuple(rows[i].layer_name for i in ranked),
        kind_breakdown=dict(breakdown),
    )


def predict_per_layer(bundle: ModelBundle, shaped: ShapedNetwork, target: Target,
                      opts: Optional[MetricsOptions] = None, workers: int = 1) -> PredictionReport:
    """Predict every layer of a network and aggregate.

    Args:
        bundle: Fitted models
        shaped: Network with resolved shapes
        target: runtime or energy
        opts: Counting conventions, defaults to those recorded in the bundle
        workers: Threads for metric computation

    Returns:
        PredictionReport without measured columns
    """
    metrics = network_metrics(shaped, opts or bundle_metrics_options(bundle), workers=workers)
    return predict_metrics(bundle, shaped.net.name, metrics, target)


def error_report(report: PredictionReport, measurements: Mapping[str, float],
                 network_measured: Optional[float] = None) -> PredictionReport:
    """Fill measured columns and signed errors.

    The sum-level error compares predictions and measurements over the
    measured layers; the network-level error compares c * sum against the
    whole-network measurement.

    Raises:
        ValidationError: measurement for a layer not in the report, or a
            non-positive measurement
    """
    known = {row.layer_name for row in report.per_layer}
    unknown = [name for name in measurements if name not in known]
    if unknown:
        raise ValidationError(f'measurement for unknown layer {unknown[0]} in {report.network}',
                              payload={'layers': unknown})
    for name, value in measurements.items():
        if not value > 0:
            raise ValidationError(f'measurement of {name} must be positive, got {value}')
    if network_measured is not None and not network_measured > 0:
        raise ValidationError(f'network measurement must be positive, got {network_measured}')

    rows = tuple(row.with_measurement(float(measurements[row.layer_name]))
                 if row.layer_name in measurements else row
                 for row in report.per_layer)
    measured_rows = [row for row in rows if row.measured is not None]

    sum_measured, sum_error = None, None
    if measured_rows:
        sum_measured = math.fsum(row.measured for row in measured_rows)
        sum_predicted = math.fsum(row.predicted for row in measured_rows)
        sum_error = signed_error_pct(sum_predicted, sum_measured)
        if len(measured_rows) < len(rows):
            logger.warning(f'{len(rows) - len(measured_rows)} layer(s) of {report.network} lack measurements')

    network_error = None
    if network_measured is not None:
        network_error = signed_error_pct(report.network_total, network_measured)

    return replace(report, per_layer=rows, sum_measured=sum_measured, sum_error_pct=sum_error,
                   network_measured=network_measured, network_error_pct=network_error)


def summary_row(report: PredictionReport) -> SummaryRow:
    return SummaryRow(
        network=report.network,
        target=report.target,
        predicted_sum=report.sum_layers,
        measured_sum=report.sum_measured,
        sum_error_pct=report.sum_error_pct,
        network_total=report.network_total,
        network_measured=report.network_measured,
        network_error_pct=report.network_error_pct,
    )


def _mape(values: Sequence[Optional[float]]) -> Optional[float]:
    present = [abs(v) for v in values if v is not None]
    return math.fsum(present) / len(present) if present else None


def summarize_reports(rows: Sequence[SummaryRow]) -> ReportSummary:
    """Mean absolute percentage error over networks at sum and network level."""
    rows = list(rows)
    return ReportSummary(
        rows=rows,
        sum_mape=_mape([row.sum_error_pct for row in rows]),
        network_mape=_mape([row.network_error_pct for row in rows]),
    )


def fit_coefficient_from_runs(bundle: ModelBundle, network_metrics_list: Sequence[Sequence[ArchMetrics]],
                              measured: Sequence[float], target: Target) -> float:
    """Fit c from whole-network measurements of networks given by their metrics."""
    sums = [predict_metrics(bundle, '', metrics, target).sum_layers for metrics in network_metrics_list]
    c = fit_network_coefficient(sums, measured)
    logger.info(f'Fitted {Target(target)} coefficient c={c:.6g} over {len(sums)} network(s)')
    return c
