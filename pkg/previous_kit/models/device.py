"""Synthetic device models."""
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from previous_kit.models.network import LayerKind
from previous_kit.models.profile import PowerTrace, ScheduleEntry, TimingLog


@dataclass(frozen=True)
class KindCoefficients:
    """Hidden linear cost w*n_weights + ops*ops + mem*mem_ops + beta."""

    w: float
    ops: float
    mem: float
    beta: float
    kappa: float = 0.0

    def cost(self, n_weights: float, ops: float, mem_ops: float) -> float:
        value = self.w * n_weights + self.ops * ops + self.mem * mem_ops + self.beta
        if self.kappa:
            value += self.kappa * (ops * mem_ops) ** 0.5
        return value

    def to_dict(self):
        return {'w': self.w, 'ops': self.ops, 'mem': self.mem, 'beta': self.beta, 'kappa': self.kappa}


@dataclass(frozen=True)
class SyntheticDevice:
    """Seeded ground-truth cost oracle standing in for real hardware.

    Runtime coefficients are in ms per unit, energy coefficients in mJ per unit.
    """

    seed: int
    noise_rel: float
    hidden_c: float
    runtime: Dict[LayerKind, KindCoefficients] = field(default_factory=dict)
    energy: Dict[LayerKind, KindCoefficients] = field(default_factory=dict)
    baseline_w: float = 1.0
    nonlinear: bool = False

    def __repr__(self):
        return f'<SyntheticDevice seed={self.seed} noise={self.noise_rel} c={self.hidden_c}>'

    def to_dict(self):
        return {
            'seed': self.seed,
            'noise_rel': self.noise_rel,
            'hidden_c': self.hidden_c,
            'baseline_w': self.baseline_w,
            'nonlinear': self.nonlinear,
            'runtime': {kind.value: coeffs.to_dict() for kind, coeffs in self.runtime.items()},
            'energy': {kind.value: coeffs.to_dict() for kind, coeffs in self.energy.items()},
        }


@dataclass(frozen=True, eq=False)
class SimulatedProfile:
    """Measurement artifacts produced by one simulated profiling session."""

    timing: TimingLog
    trace: Optional[PowerTrace]
    schedule: Tuple[ScheduleEntry, ...]
    network_runtime_ms: float
    network_energy_mj: float

    def totals(self):
        return {'runtime_ms': self.network_runtime_ms, 'energy_mj': self.network_energy_mj}
