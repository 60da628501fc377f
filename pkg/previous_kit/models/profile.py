"""Profiling artifact models: timing logs, power traces, schedules."""
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from previous_kit.errors import ProfilingError


@dataclass(frozen=True)
class TimingRecord:
    """One timed execution of one layer."""

    layer_name: str
    run_index: int
    elapsed_ms: float

    def __post_init__(self):
        if not self.elapsed_ms > 0:
            raise ProfilingError(f'non-positive elapsed time {self.elapsed_ms} for {self.layer_name} '
                                 f'run {self.run_index}')

    def to_dict(self):
        return {'layer': self.layer_name, 'run': self.run_index, 'elapsed_ms': self.elapsed_ms}

    @classmethod
    def from_dict(cls, data):
        return cls(layer_name=data['layer'], run_index=int(data['run']), elapsed_ms=float(data['elapsed_ms']))


@dataclass(frozen=True)
class TimingLog:
    """Per-layer timing records in capture order."""

    records: Tuple[TimingRecord, ...] = ()

    def __len__(self):
        return len(self.records)

    def layer_names(self):
        """Layer names in first-seen order."""
        return list(dict.fromkeys(record.layer_name for record in self.records))


@dataclass(frozen=True)
class TimingStats:
    """Mean and sample standard deviation of a layer's runtimes."""

    mean: float
    std: float
    n: int

    def to_dict(self):
        return {'mean': self.mean, 'std': self.std, 'n': self.n}


@dataclass(frozen=True, eq=False)
class PowerTrace:
    """Uniformly sampled power signal in watts."""

    sample_period_s: float
    samples: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        if not self.sample_period_s > 0:
            raise ProfilingError(f'sample period must be positive, got {self.sample_period_s}')
        samples = np.asarray(self.samples, dtype=float)
        if samples.size and samples.min() < 0:
            raise ProfilingError('power samples must be non-negative')
        object.__setattr__(self, 'samples', samples)

    def __len__(self):
        return int(self.samples.size)

    @property
    def sample_period_ms(self) -> float:
        return self.sample_period_s * 1e3

    @property
    def duration_ms(self) -> float:
        return len(self) * self.sample_period_ms


@dataclass(frozen=True)
class ScheduleEntry:
    """One burst of back-to-back runs of a layer."""

    layer_name: str
    n_runs: int
    per_run_ms: float

    def __post_init__(self):
        if self.n_runs < 1:
            raise ProfilingError(f'schedule entry {self.layer_name} needs at least one run')
        if not self.per_run_ms > 0:
            raise ProfilingError(f'schedule entry {self.layer_name} has non-positive duration')

    def to_dict(self):
        return {'layer': self.layer_name, 'n_runs': self.n_runs, 'per_run_ms': self.per_run_ms}

    @classmethod
    def from_dict(cls, data):
        return cls(layer_name=data['layer'], n_runs=int(data['n_runs']), per_run_ms=float(data['per_run_ms']))


@dataclass(frozen=True)
class LayerProfile:
    """Reduced per-layer measurements.

    mean_energy is None when no power trace was captured.
    """

    layer_name: str
    mean_runtime: float
    runtime_std: float
    n_runs: int
    mean_energy: Optional[float] = None
    energy_std: Optional[float] = None

    def __post_init__(self):
        if not self.mean_runtime > 0:
            raise ProfilingError(f'non-positive mean runtime for {self.layer_name}')
        if self.n_runs < 1:
            raise ProfilingError(f'profile of {self.layer_name} has no runs')

    def __repr__(self):
        return f'<LayerProfile {self.layer_name} {self.mean_runtime:.4f} ms>'

    def value(self, target: str) -> Optional[float]:
        """Measured response for a regression target."""
        return self.mean_runtime if target == 'runtime' else self.mean_energy

    def to_dict(self):
        return {
            'layer': self.layer_name,
            'mean_runtime': self.mean_runtime,
            'runtime_std': self.runtime_std,
            'n_runs': self.n_runs,
            'mean_energy': self.mean_energy,
            'energy_std': self.energy_std,
        }
