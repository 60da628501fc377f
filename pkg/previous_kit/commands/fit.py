"""fit command: per-kind Ridge models and the network coefficient c."""
from dataclasses import replace
from pathlib import Path

import click

from previous_kit.commands import TARGET_CHOICES, InputFile, targets_for
from previous_kit.extensions import logger
from previous_kit.models.regression import Target
from previous_kit.utils.io import (
    read_metrics_csv,
    read_schedule_csv,
    read_timing_csv,
    read_totals,
    read_trace_csv,
    save_bundle,
)
from previous_kit.utils.predict import fit_coefficient_from_runs
from previous_kit.utils.profiling import (
    build_observations,
    build_profiles,
    estimate_idle_power,
    ingest_timing,
    merge_observations,
    segment_power_trace,
)
from previous_kit.utils.regression import fit_bundle

TOTAL_KEYS = {'runtime': 'runtime_ms', 'energy': 'energy_mj'}


def _check_counts(name, values, expected):
    if values and len(values) != expected:
        raise click.UsageError(f'{name} given {len(values)} time(s), expected one per --metrics ({expected})')


def _profiles(settings, timing_path, trace_path, schedule_path, subtract_baseline, gap_ms):
    stats = ingest_timing(read_timing_csv(timing_path))
    if trace_path is None:
        return build_profiles(stats, workers=settings['WORKERS'])
    trace = read_trace_csv(trace_path)
    windows = segment_power_trace(trace, read_schedule_csv(schedule_path), gap_ms=gap_ms,
                                  slack=settings['SEGMENT_SLACK'],
                                  min_contrast=settings['SEGMENT_MIN_CONTRAST_W'])
    baseline = estimate_idle_power(trace, gap_ms) if subtract_baseline else None
    return build_profiles(stats, windows, trace.sample_period_s, baseline, workers=settings['WORKERS'])


@click.command('fit')
@click.option('--metrics', 'metrics_paths', type=InputFile, multiple=True, required=True,
              help='Metrics CSV of a profiled network (repeatable).')
@click.option('--timing', 'timing_paths', type=InputFile, multiple=True, required=True,
              help='Timing log per --metrics, same order.')
@click.option('--trace', 'trace_paths', type=InputFile, multiple=True, help='Power trace per --metrics.')
@click.option('--schedule', 'schedule_paths', type=InputFile, multiple=True, help='Schedule per --trace.')
@click.option('--totals', 'totals_paths', type=InputFile, multiple=True,
              help='Whole-network measurements per --metrics, used to fit c.')
@click.option('--target', type=click.Choice(TARGET_CHOICES), default='runtime', show_default=True)
@click.option('--lambda', 'lam', type=click.FloatRange(min=0), default=None, help='Ridge penalty (default 1).')
@click.option('--select', is_flag=True, help='Keep only correlated predictors that add rank.')
@click.option('--im2col', is_flag=True, help='Record that metrics used im2col reads.')
@click.option('--no-bias-ops', is_flag=True, help='Record that metrics excluded bias ops.')
@click.option('--subtract-baseline', is_flag=True, help='Subtract idle power from layer energy.')
@click.option('--gap-ms', type=float, default=None, help='Idle gap between bursts.')
@click.option('--system-id', default='synthetic', show_default=True)
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.pass_obj
def fit_cmd(settings, metrics_paths, timing_paths, trace_paths, schedule_paths, totals_paths, target, lam,
            select, im2col, no_bias_ops, subtract_baseline, gap_ms, system_id, out):
    """Fit a model bundle from profiled networks."""
    count = len(metrics_paths)
    _check_counts('--timing', timing_paths, count)
    _check_counts('--trace', trace_paths, count)
    _check_counts('--totals', totals_paths, count)
    if len(schedule_paths) != len(trace_paths):
        raise click.UsageError('every --trace needs a matching --schedule')
    targets = targets_for(target)
    if 'energy' in targets and not trace_paths:
        raise click.UsageError('energy models need --trace and --schedule')

    lam = settings['DEFAULT_LAMBDA'] if lam is None else lam
    gap_ms = settings['GAP_MS'] if gap_ms is None else gap_ms
    metrics_lists = [read_metrics_csv(path) for path in metrics_paths]
    observations = {Target(t): [] for t in targets}
    for i, metrics in enumerate(metrics_lists):
        trace_path = trace_paths[i] if trace_paths else None
        schedule_path = schedule_paths[i] if schedule_paths else None
        profiles = _profiles(settings, timing_paths[i], trace_path, schedule_path, subtract_baseline, gap_ms)
        for t in targets:
            observations[Target(t)].append(build_observations(metrics, profiles, t))

    bundle = fit_bundle(
        {t: merge_observations(groups) for t, groups in observations.items()},
        system_id=system_id,
        lam=lam,
        select=select,
        provenance={
            'im2col': im2col,
            'count_bias_ops': not no_bias_ops,
            'subtract_baseline': subtract_baseline,
            'suite': [Path(path).stem for path in metrics_paths],
        },
    )

    coefficients = {}
    if totals_paths:
        totals = [read_totals(path) for path in totals_paths]
        for t in targets:
            measured = [entry.get(TOTAL_KEYS[t]) for entry in totals]
            if any(value is None for value in measured):
                logger.warning(f'Totals lack {TOTAL_KEYS[t]}; c_{t} left at 1')
                continue
            coefficients[f'c_{t}'] = fit_coefficient_from_runs(bundle, metrics_lists, measured, t)
    else:
        logger.warning('No network totals given; network coefficients left at 1')

    bundle = replace(bundle, **coefficients)
    save_bundle(bundle, out, settings['STAMP'])
    logger.info(f'Wrote {out} with {len(bundle.models)} model(s)')
