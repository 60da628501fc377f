"""Reduce timing logs and power traces to per-layer profiles.

A capture follows a fixed protocol: for every scheduled layer an idle gap,
then a burst of back-to-back runs. Segmentation walks that schedule over
the trace instead of detecting edges.
"""
import math
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from previous_kit.config import Config
from previous_kit.errors import BurstNotFoundError, ProfilingError, TraceTooShortError, WindowError
from previous_kit.extensions import logger
from previous_kit.models.metrics import ArchMetrics
from previous_kit.models.profile import LayerProfile, PowerTrace, ScheduleEntry, TimingLog, TimingStats
from previous_kit.models.regression import ObservationSet, Target


def ingest_timing(log: TimingLog) -> Dict[str, TimingStats]:
    """Mean, sample standard deviation and run count per layer.

    Raises:
        ProfilingError: empty log or a repeated (layer, run) pair
    """
    if not len(log):
        raise ProfilingError('timing log is empty')

    runs: Dict[str, List[float]] = OrderedDict()
    seen = set()
    for record in log.records:
        key = (record.layer_name, record.run_index)
        if key in seen:
            raise ProfilingError(f'duplicate run {record.run_index} for layer {record.layer_name}')
        seen.add(key)
        runs.setdefault(record.layer_name, []).append(record.elapsed_ms)

    stats = {}
    for name, values in runs.items():
        elapsed = np.asarray(values, dtype=float)
        std = float(np.std(elapsed, ddof=1)) if elapsed.size > 1 else 0.0
        stats[name] = TimingStats(mean=float(np.mean(elapsed)), std=std, n=int(elapsed.size))
    return stats


def window_length(per_run_ms: float, sample_period_ms: float) -> int:
    """Samples per run window: ceil(duration / period), at least 2."""
    return max(2, math.ceil(per_run_ms / sample_period_ms - 1e-9))


def burst_offsets(entry: ScheduleEntry, sample_period_ms: float) -> List[int]:
    """Window start offsets of each run relative to the burst start."""
    return [int(round(i * entry.per_run_ms / sample_period_ms)) for i in range(entry.n_runs)]


def burst_length(entry: ScheduleEntry, sample_period_ms: float) -> int:
    return burst_offsets(entry, sample_period_ms)[-1] + window_length(entry.per_run_ms, sample_period_ms)


def _locate_burst(samples: np.ndarray, cursor: int, entry: ScheduleEntry, gap_samples: int,
                  dt_ms: float, gap_ms: float, slack_rel: float, min_contrast: float) -> int:
    length = burst_length(entry, dt_ms)
    expected = cursor + gap_samples
    # at most half the gap: candidates never overlap a neighbouring burst
    slack = min(math.ceil(slack_rel * (gap_ms + entry.n_runs * entry.per_run_ms) / dt_ms), gap_samples // 2)

    first = max(cursor, expected - slack)
    last = min(expected + slack, samples.size - length)
    if last < first:
        raise TraceTooShortError(
            f'trace shorter than schedule: burst of {entry.layer_name} needs samples up to '
            f'{expected + length}, trace has {samples.size}',
            payload={'layer': entry.layer_name, 'expected_offset': expected, 'trace_length': int(samples.size)})

    idle = samples[cursor:first]
    baseline = float(idle.mean()) if idle.size else 0.0

    csum = np.concatenate(([0.0], np.cumsum(samples[first:last + length])))
    starts = np.arange(last - first + 1)
    means = (csum[starts + length] - csum[starts]) / length
    contrast = np.abs(means - baseline)
    best = int(np.argmax(contrast))
    actual = first + best
    if contrast[best] < min_contrast:
        raise BurstNotFoundError(
            f'burst of {entry.layer_name} not found within slack: expected offset {expected}, '
            f'best candidate {actual} with contrast {contrast[best]:.3g} W',
            payload={'layer': entry.layer_name, 'expected_offset': expected, 'actual_offset': actual})
    if actual != expected:
        logger.debug(f'Burst of {entry.layer_name} at sample {actual}, expected {expected}')
    return actual


def segment_power_trace(trace: PowerTrace, schedule: Sequence[ScheduleEntry],
                        gap_ms: float = Config.GAP_MS,
                        slack: float = Config.SEGMENT_SLACK,
                        min_contrast: float = Config.SEGMENT_MIN_CONTRAST_W) -> Dict[str, List[np.ndarray]]:
    """Cut a power trace into per-run sample windows.

    Args:
        trace: Sampled power signal
        schedule: Bursts in capture order
        gap_ms: Idle separation before each burst
        slack: Relative search slack around each expected burst start
        min_contrast: Minimum |burst - idle| power in watts

    Returns:
        Layer name -> list of n_runs windows, each ceil(per_run / period) samples

    Raises:
        TraceTooShortError: the trace ends before the schedule does
        BurstNotFoundError: no burst within the slack window
    """
    dt_ms = trace.sample_period_ms
    gap_samples = int(round(gap_ms / dt_ms))
    samples = trace.samples
    windows: Dict[str, List[np.ndarray]] = OrderedDict()
    cursor = 0
    for entry in schedule:
        start = _locate_burst(samples, cursor, entry, gap_samples, dt_ms, gap_ms, slack, min_contrast)
        length = window_length(entry.per_run_ms, dt_ms)
        offsets = burst_offsets(entry, dt_ms)
        windows[entry.layer_name] = [samples[start + offset:start + offset + length] for offset in offsets]
        cursor = start + offsets[-1] + length
    return windows


def estimate_idle_power(trace: PowerTrace, gap_ms: float = Config.GAP_MS) -> float:
    """Mean power over the leading idle gap."""
    count = int(round(gap_ms / trace.sample_period_ms))
    if count < 1 or len(trace) < count:
        raise ProfilingError(f'trace too short to estimate idle power over {gap_ms} ms')
    return float(trace.samples[:count].mean())


def layer_energy(windows: Sequence[np.ndarray], sample_period_s: float,
                 baseline_w: Optional[float] = None) -> Tuple[float, float]:
    """Mean and sample std of per-window energy in mJ.

    Each window is integrated with the trapezoidal rule. When baseline_w is
    given, idle power over the window duration is subtracted.

    Raises:
        WindowError: no windows or a window with fewer than 2 samples
    """
    if not len(windows):
        raise WindowError('no sample windows to integrate')
    dt_ms = sample_period_s * 1e3
    energies = []
    for window in windows:
        window = np.asarray(window, dtype=float)
        if window.size < 2:
            raise WindowError(f'window of {window.size} sample(s) cannot be integrated')
        energy = float(trapezoid(window, dx=dt_ms))
        if baseline_w is not None:
            energy -= baseline_w * (window.size - 1) * dt_ms
        energies.append(energy)
    energies = np.asarray(energies)
    std = float(np.std(energies, ddof=1)) if energies.size > 1 else 0.0
    return float(energies.mean()), std


def build_profiles(timing: Mapping[str, TimingStats],
                   windows: Optional[Mapping[str, Sequence[np.ndarray]]] = None,
                   sample_period_s: Optional[float] = None,
                   baseline_w: Optional[float] = None,
                   workers: int = 1) -> Dict[str, LayerProfile]:
    """Join timing statistics with integrated energy per layer."""
    windows = windows or {}

    def reduce(name):
        stats = timing[name]
        energy, energy_std = None, None
        if name in windows:
            energy, energy_std = layer_energy(windows[name], sample_period_s, baseline_w)
        return LayerProfile(layer_name=name, mean_runtime=stats.mean, runtime_std=stats.std,
                            n_runs=stats.n, mean_energy=energy, energy_std=energy_std)

    names = list(timing)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            profiles = list(pool.map(reduce, names))
    else:
        profiles = [reduce(name) for name in names]
    return OrderedDict((p.layer_name, p) for p in profiles)


def build_observations(metrics: Sequence[ArchMetrics], profiles: Mapping[str, LayerProfile],
                       target: Target) -> Dict[str, ObservationSet]:
    """Group profiled layers into per-kind design matrices.

    Rows follow the order of `metrics` (topological). Layers without a
    profile, or without the requested measurement, are skipped.

    Returns:
        Kind value -> ObservationSet
    """
    target = Target(target)
    rows: Dict[str, list] = OrderedDict()
    for m in metrics:
        profile = profiles.get(m.layer_name)
        value = profile.value(target.value) if profile else None
        if value is None:
            logger.warning(f'No {target} measurement for layer {m.layer_name}; skipped')
            continue
        rows.setdefault(m.kind.value, []).append((m, value))

    observations = OrderedDict()
    for kind, items in rows.items():
        observations[kind] = ObservationSet(
            kind=items[0][0].kind,
            target=target,
            X=np.array([m.predictors for m, _ in items], dtype=float),
            y=np.array([value for _, value in items], dtype=float),
            layer_names=tuple(m.layer_name for m, _ in items),
        )
    return observations


def merge_observations(groups: Sequence[Mapping[str, ObservationSet]]) -> Dict[str, ObservationSet]:
    """Concatenate per-kind observation sets of several networks in order."""
    merged: Dict[str, List[ObservationSet]] = OrderedDict()
    for group in groups:
        for kind, obs in group.items():
            merged.setdefault(kind, []).append(obs)

    result = OrderedDict()
    for kind, sets in merged.items():
        result[kind] = ObservationSet(
            kind=sets[0].kind,
            target=sets[0].target,
            X=np.vstack([obs.X for obs in sets]),
            y=np.concatenate([obs.y for obs in sets]),
            layer_names=tuple(name for obs in sets for name in obs.layer_names),
        )
    return result
