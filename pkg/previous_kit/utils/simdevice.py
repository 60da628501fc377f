"""Synthetic device: a seeded ground-truth cost oracle that emits profiling artifacts.

Runtime coefficient ranges per kind (ms per weight / op / access, and a
fixed per-layer overhead beta):

    kind        w              ops             mem             beta
    conv        [0, 1e-9]      [1e-9, 3e-9]    [5e-9, 2e-8]    [0.8, 1.2]
    fc          [2e-8, 6e-8]   [4e-9, 1e-8]    [2e-8, 6e-8]    [0.05, 0.2]
    pool        0              [5e-8, 1.5e-7]  [1e-7, 3e-7]    [0.05, 0.2]
    relu        0              [5e-8, 1e-7]    [5e-8, 1.5e-7]  [0.05, 0.15]
    batchnorm   [5e-8, 1e-7]   [5e-8, 1.5e-7]  [5e-8, 1.5e-7]  [0.05, 0.2]
    scale       [5e-8, 1e-7]   [5e-8, 1.5e-7]  [5e-8, 1.5e-7]  [0.05, 0.2]
    concat      0              0               [6e-8, 1.6e-7]  [0.05, 0.2]
    eltwise     0              [4e-8, 8e-8]    [4e-8, 1.2e-7]  [0.05, 0.15]
    softmax     0              [2e-6, 5e-6]    [1e-6, 2e-6]    [0.05, 0.15]

Over the standard suite each kind's mean variable cost is of the order of
its overhead, and conv launches cost the most.

Energy coefficients are the runtime ones scaled by a per-kind active power
in [1.8, 3.2] W, plus [0, 1e-7] mJ per memory access, so every burst draws
more than the 1 W idle baseline.
"""
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import List, Tuple

import numpy as np

from previous_kit.config import Config
from previous_kit.errors import ConfigurationError
from previous_kit.extensions import logger
from previous_kit.models.device import KindCoefficients, SimulatedProfile, SyntheticDevice
from previous_kit.models.metrics import ArchMetrics, MetricsOptions
from previous_kit.models.network import LayerKind, ShapedNetwork
from previous_kit.models.profile import PowerTrace, ScheduleEntry, TimingLog, TimingRecord
from previous_kit.utils.metrics import network_metrics
from previous_kit.utils.profiling import burst_length, burst_offsets, window_length

RUNTIME_RANGES = {
    LayerKind.CONV: ((0.0, 1e-9), (1e-9, 3e-9), (5e-9, 2e-8), (0.8, 1.2)),
    LayerKind.FC: ((2e-8, 6e-8), (4e-9, 1e-8), (2e-8, 6e-8), (0.05, 0.2)),
    LayerKind.POOL: ((0.0, 0.0), (5e-8, 1.5e-7), (1e-7, 3e-7), (0.05, 0.2)),
    LayerKind.RELU: ((0.0, 0.0), (5e-8, 1e-7), (5e-8, 1.5e-7), (0.05, 0.15)),
    LayerKind.BATCHNORM: ((5e-8, 1e-7), (5e-8, 1.5e-7), (5e-8, 1.5e-7), (0.05, 0.2)),
    LayerKind.SCALE: ((5e-8, 1e-7), (5e-8, 1.5e-7), (5e-8, 1.5e-7), (0.05, 0.2)),
    LayerKind.CONCAT: ((0.0, 0.0), (0.0, 0.0), (6e-8, 1.6e-7), (0.05, 0.2)),
    LayerKind.ELTWISE: ((0.0, 0.0), (4e-8, 8e-8), (4e-8, 1.2e-7), (0.05, 0.15)),
    LayerKind.SOFTMAX: ((0.0, 0.0), (2e-6, 5e-6), (1e-6, 2e-6), (0.05, 0.15)),
}
ACTIVE_POWER_W = (1.8, 3.2)
ACCESS_ENERGY_MJ = (0.0, 1e-7)
# interaction term kappa * sqrt(ops * mem_ops), ms
INTERACTION_RANGE = (1e-9, 4e-9)

_RUNTIME_STREAM, _ENERGY_STREAM, _TOTAL_RUNTIME_STREAM, _TOTAL_ENERGY_STREAM = range(4)


def make_device(seed: int, noise_rel: float = 0.0, hidden_c: float = 1.0,
                baseline_w: float = Config.BASELINE_W, nonlinear: bool = False) -> SyntheticDevice:
    """Draw a device's hidden coefficients from a seeded generator.

    Raises:
        ConfigurationError: noise_rel outside [0, 0.5], hidden_c outside
            [0.5, 1.5] or a negative baseline
    """
    if not 0.0 <= noise_rel <= 0.5:
        raise ConfigurationError(f'noise_rel must lie in [0, 0.5], got {noise_rel}')
    if not 0.5 <= hidden_c <= 1.5:
        raise ConfigurationError(f'hidden_c must lie in [0.5, 1.5], got {hidden_c}')
    if baseline_w < 0:
        raise ConfigurationError(f'baseline power must be non-negative, got {baseline_w}')

    rng = np.random.default_rng(seed)
    runtime, energy = {}, {}
    for kind in LayerKind:
        w, ops, mem, beta = (float(rng.uniform(lo, hi)) for lo, hi in RUNTIME_RANGES[kind])
        power = float(rng.uniform(*ACTIVE_POWER_W))
        access = float(rng.uniform(*ACCESS_ENERGY_MJ))
        kappa = float(rng.uniform(*INTERACTION_RANGE)) if nonlinear else 0.0
        runtime[kind] = KindCoefficients(w=w, ops=ops, mem=mem, beta=beta, kappa=kappa)
        energy[kind] = KindCoefficients(w=power * w, ops=power * ops, mem=power * mem + access,
                                        beta=power * beta, kappa=power * kappa)

    device = SyntheticDevice(seed=seed, noise_rel=noise_rel, hidden_c=hidden_c, runtime=runtime,
                             energy=energy, baseline_w=baseline_w, nonlinear=nonlinear)
    logger.debug(f'Created {device}')
    return device


def true_costs(device: SyntheticDevice, m: ArchMetrics) -> Tuple[float, float]:
    """Noiseless (runtime ms, energy mJ) of one layer."""
    return (device.runtime[m.kind].cost(m.n_weights, m.ops, m.mem_ops),
            device.energy[m.kind].cost(m.n_weights, m.ops, m.mem_ops))


def _noise(device: SyntheticDevice, network_id: int, index: int, stream: int, size: int) -> np.ndarray:
    rng = np.random.default_rng([device.seed, network_id, index, stream])
    return rng.uniform(-device.noise_rel, device.noise_rel, size)


def _simulate_layer(device, network_id, index, m, n_runs):
    runtime, energy = true_costs(device, m)
    runtimes = runtime * (1.0 + _noise(device, network_id, index, _RUNTIME_STREAM, n_runs))
    energies = energy * (1.0 + _noise(device, network_id, index, _ENERGY_STREAM, n_runs))
    return runtime, energy, runtimes, energies


def _render_trace(schedule: List[ScheduleEntry], energies: List[np.ndarray], gap_ms: float,
                  sample_period_s: float, baseline_w: float) -> PowerTrace:
    dt_ms = sample_period_s * 1e3
    gap = int(round(gap_ms / dt_ms))
    total = gap + sum(burst_length(entry, dt_ms) + gap for entry in schedule)
    samples = np.full(total, baseline_w, dtype=float)

    cursor = 0
    for entry, runs in zip(schedule, energies):
        start = cursor + gap
        length = window_length(entry.per_run_ms, dt_ms)
        offsets = burst_offsets(entry, dt_ms)
        for offset, energy in zip(offsets, runs):
            # constant plateau whose trapezoidal integral equals the run's energy
            samples[start + offset:start + offset + length] = energy / ((length - 1) * dt_ms)
        cursor = start + offsets[-1] + length
    return PowerTrace(sample_period_s=sample_period_s, samples=samples)


def simulate_profile(device: SyntheticDevice, shaped: ShapedNetwork, n_runs: int = Config.N_RUNS,
                     gap_ms: float = Config.GAP_MS, sample_period_s: float = Config.SAMPLE_PERIOD_S,
                     with_trace: bool = True, opts: MetricsOptions = MetricsOptions(),
                     workers: int = 1) -> SimulatedProfile:
    """Emit a timing log, power trace, schedule and whole-network totals.

    Every layer draws its noise from its own stream seeded by
    (device seed, network name, layer index), so parallel and serial runs
    are bit-identical.
    """
    if n_runs < 1:
        raise ConfigurationError(f'n_runs must be positive, got {n_runs}')
    metrics = network_metrics(shaped, opts)
    network_id = zlib.crc32(shaped.net.name.encode('utf-8'))

    def simulate(item):
        index, m = item
        return _simulate_layer(device, network_id, index, m, n_runs)

    items = list(enumerate(metrics))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(simulate, items))
    else:
        results = [simulate(item) for item in items]

    records, schedule, layer_energies = [], [], []
    for m, (_, _, runtimes, energies) in zip(metrics, results):
        records.extend(TimingRecord(layer_name=m.layer_name, run_index=run, elapsed_ms=float(value))
                       for run, value in enumerate(runtimes))
        schedule.append(ScheduleEntry(layer_name=m.layer_name, n_runs=n_runs, per_run_ms=float(np.mean(runtimes))))
        layer_energies.append(energies)

    sum_runtime = math.fsum(result[0] for result in results)
    sum_energy = math.fsum(result[1] for result in results)
    total_runtime = device.hidden_c * sum_runtime * (1.0 + float(_noise(device, network_id, 0, _TOTAL_RUNTIME_STREAM, 1)[0]))
    total_energy = device.hidden_c * sum_energy * (1.0 + float(_noise(device, network_id, 0, _TOTAL_ENERGY_STREAM, 1)[0]))

    trace = None
    if with_trace and schedule:
        trace = _render_trace(schedule, layer_energies, gap_ms, sample_period_s, device.baseline_w)
    logger.info(f'Simulated {len(schedule)} layer(s) of {shaped.net.name} with {n_runs} run(s) each')
    return SimulatedProfile(timing=TimingLog(records=tuple(records)), trace=trace, schedule=tuple(schedule),
                            network_runtime_ms=total_runtime, network_energy_mj=total_energy)
