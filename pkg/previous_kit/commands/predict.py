"""predict command: per-layer and whole-network estimates with error accounting."""
from pathlib import Path

import click

from previous_kit.commands import TARGET_CHOICES, InputFile, emit, load_shaped, targets_for
from previous_kit.commands.fit import TOTAL_KEYS
from previous_kit.extensions import logger
from previous_kit.utils.io import (
    load_bundle,
    read_schedule_csv,
    read_timing_csv,
    read_totals,
    read_trace_csv,
    render_plot_data,
    render_reports_csv,
    render_reports_json,
)
from previous_kit.utils.predict import error_report, predict_per_layer
from previous_kit.utils.profiling import (
    build_profiles,
    estimate_idle_power,
    ingest_timing,
    segment_power_trace,
)


def _measured_profiles(settings, bundle, timing_path, trace_path, schedule_path, gap_ms):
    stats = ingest_timing(read_timing_csv(timing_path))
    if trace_path is None:
        return build_profiles(stats, workers=settings['WORKERS'])
    trace = read_trace_csv(trace_path)
    windows = segment_power_trace(trace, read_schedule_csv(schedule_path), gap_ms=gap_ms,
                                  slack=settings['SEGMENT_SLACK'],
                                  min_contrast=settings['SEGMENT_MIN_CONTRAST_W'])
    baseline = estimate_idle_power(trace, gap_ms) if bundle.provenance.get('subtract_baseline') else None
    return build_profiles(stats, windows, trace.sample_period_s, baseline, workers=settings['WORKERS'])


@click.command('predict')
@click.option('--bundle', 'bundle_path', type=InputFile, required=True, help='Fitted model bundle.')
@click.option('--net', 'net_path', type=InputFile, required=True, help='Network document.')
@click.option('--target', type=click.Choice(TARGET_CHOICES), default='runtime', show_default=True)
@click.option('--measured', 'timing_path', type=InputFile, default=None, help='Timing log of the network.')
@click.option('--measured-trace', 'trace_path', type=InputFile, default=None, help='Power trace of the network.')
@click.option('--measured-schedule', 'schedule_path', type=InputFile, default=None,
              help='Schedule matching --measured-trace.')
@click.option('--totals', 'totals_path', type=InputFile, default=None, help='Whole-network measurement.')
@click.option('--gap-ms', type=float, default=None, help='Idle gap between bursts.')
@click.option('--plot-data', type=click.Path(dir_okay=False, path_type=Path), default=None,
              help='Write (measured, predicted) pairs for plotting.')
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Output file (default stdout).')
@click.pass_obj
def predict_cmd(settings, bundle_path, net_path, target, timing_path, trace_path, schedule_path, totals_path,
                gap_ms, plot_data, out):
    """Predict per-layer costs and the network total."""
    if (trace_path is None) != (schedule_path is None):
        raise click.UsageError('--measured-trace and --measured-schedule go together')
    if trace_path is not None and timing_path is None:
        raise click.UsageError('--measured-trace needs --measured')

    bundle = load_bundle(bundle_path)
    shaped = load_shaped(net_path)
    gap_ms = settings['GAP_MS'] if gap_ms is None else gap_ms

    profiles = None
    if timing_path is not None:
        profiles = _measured_profiles(settings, bundle, timing_path, trace_path, schedule_path, gap_ms)
    totals = read_totals(totals_path) if totals_path is not None else {}
    if totals and totals['network'] != shaped.net.name:
        logger.warning(f'Totals are for {totals["network"]}, predicting {shaped.net.name}')

    reports = []
    for t in targets_for(target):
        report = predict_per_layer(bundle, shaped, t, workers=settings['WORKERS'])
        measurements = {}
        if profiles is not None:
            measurements = {name: profile.value(t) for name, profile in profiles.items()
                            if profile.value(t) is not None}
        network_measured = totals.get(TOTAL_KEYS[t])
        if measurements or network_measured is not None:
            report = error_report(report, measurements, network_measured)
        logger.info(f'{shaped.net.name} {t}: sum {report.sum_layers:.6g} {report.target.unit}, '
                    f'hottest {", ".join(report.hot_layers[:3])}')
        reports.append(report)

    if settings['FORMAT'] == 'json':
        emit(render_reports_json(reports, settings['STAMP']), out)
    else:
        emit(render_reports_csv(reports, settings['STAMP']), out)
    if plot_data is not None:
        emit(render_plot_data(reports), plot_data)
