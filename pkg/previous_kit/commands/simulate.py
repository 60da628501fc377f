"""simulate command: profiling artifacts from the synthetic device."""
from pathlib import Path

import click

from previous_kit.commands import InputFile, emit, load_shaped
from previous_kit.models.metrics import MetricsOptions
from previous_kit.utils.io import render_json, render_schedule_csv, render_timing_csv, render_trace_csv
from previous_kit.utils.simdevice import make_device, simulate_profile


@click.command('simulate')
@click.option('--net', 'net_path', type=InputFile, required=True, help='Network document.')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--noise', type=float, default=0.0, show_default=True, help='Relative run-to-run noise.')
@click.option('--hidden-c', type=float, default=1.0, show_default=True, help='Whole-network scaling.')
@click.option('--n-runs', type=click.IntRange(min=1), default=None, help='Runs per layer.')
@click.option('--gap-ms', type=float, default=None, help='Idle gap between bursts.')
@click.option('--sample-period', type=float, default=None, help='Power sample period in seconds.')
@click.option('--baseline-w', type=float, default=None, help='Idle power in watts.')
@click.option('--nonlinear', is_flag=True, help='Add an ops/memory interaction term.')
@click.option('--im2col', is_flag=True, help='Metrics convention of the hidden cost.')
@click.option('--no-trace', is_flag=True, help='Skip the power trace.')
@click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), required=True)
@click.pass_obj
def simulate_cmd(settings, net_path, seed, noise, hidden_c, n_runs, gap_ms, sample_period, baseline_w,
                 nonlinear, im2col, no_trace, out_dir):
    """Write timing.csv, trace.csv, schedule.csv and totals.json."""
    shaped = load_shaped(net_path)
    device = make_device(seed, noise_rel=noise, hidden_c=hidden_c,
                         baseline_w=settings['BASELINE_W'] if baseline_w is None else baseline_w,
                         nonlinear=nonlinear)
    profile = simulate_profile(
        device, shaped,
        n_runs=n_runs or settings['N_RUNS'],
        gap_ms=settings['GAP_MS'] if gap_ms is None else gap_ms,
        sample_period_s=sample_period or settings['SAMPLE_PERIOD_S'],
        with_trace=not no_trace,
        opts=MetricsOptions(im2col=im2col),
        workers=settings['WORKERS'],
    )

    stamp = settings['STAMP']
    emit(render_timing_csv(profile.timing, stamp), out_dir / 'timing.csv')
    emit(render_schedule_csv(profile.schedule, stamp), out_dir / 'schedule.csv')
    if profile.trace is not None:
        emit(render_trace_csv(profile.trace, stamp), out_dir / 'trace.csv')
    totals = dict(network=shaped.net.name, **profile.totals())
    emit(render_json(totals, stamp), out_dir / 'totals.json')
