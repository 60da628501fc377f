"""Prediction report models."""
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

from previous_kit.models.network import LayerKind
from previous_kit.models.regression import Target


def signed_error_pct(predicted: float, measured: float) -> float:
    """Signed relative error (predicted - measured) / measured in percent."""
    return (predicted - measured) / measured * 100.0


@dataclass(frozen=True)
class LayerPrediction:
    """Predicted (and optionally measured) cost of one layer."""

    layer_name: str
    kind: LayerKind
    predicted: float
    measured: Optional[float] = None
    error_pct: Optional[float] = None
    clamped: bool = False

    def with_measurement(self, measured: float) -> 'LayerPrediction':
        return replace(self, measured=measured, error_pct=signed_error_pct(self.predicted, measured))

    def to_dict(self):
        return {
            'layer': self.layer_name,
            'kind': self.kind.value,
            'predicted': self.predicted,
            'measured': self.measured,
            'error_pct': self.error_pct,
            'clamped': self.clamped,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            layer_name=data['layer'],
            kind=LayerKind(data['kind']),
            predicted=float(data['predicted']),
            measured=None if data.get('measured') is None else float(data['measured']),
            error_pct=None if data.get('error_pct') is None else float(data['error_pct']),
            clamped=bool(data.get('clamped', False)),
        )


@dataclass(frozen=True)
class PredictionReport:
    """Per-layer predictions of one network for one target.

    network_total is always c_used * sum_layers.
    """

    network: str
    target: Target
    per_layer: Tuple[LayerPrediction, ...]
    sum_layers: float
    c_used: float
    hot_layers: Tuple[str, ...] = ()
    kind_breakdown: Dict[str, float] = field(default_factory=dict)
    sum_measured: Optional[float] = None
    sum_error_pct: Optional[float] = None
    network_measured: Optional[float] = None
    network_error_pct: Optional[float] = None

    def __repr__(self):
        return f'<PredictionReport {self.network}/{self.target} total={self.network_total:.6g}>'

    @property
    def network_total(self) -> float:
        return self.c_used * self.sum_layers

    @property
    def measured_ratio(self) -> Optional[float]:
        """Sum of measured layers over the whole-network measurement."""
        if self.sum_measured is None or not self.network_measured:
            return None
        return self.sum_measured / self.network_measured

    def layer(self, name: str) -> LayerPrediction:
        for row in self.per_layer:
            if row.layer_name == name:
                return row
        raise KeyError(name)

    def to_dict(self):
        return {
            'network': self.network,
            'target': self.target.value,
            'unit': self.target.unit,
            'per_layer': [row.to_dict() for row in self.per_layer],
            'sum_layers': self.sum_layers,
            'c_used': self.c_used,
            'network_total': self.network_total,
            'hot_layers': list(self.hot_layers),
            'kind_breakdown': dict(self.kind_breakdown),
            'sum_measured': self.sum_measured,
            'sum_error_pct': self.sum_error_pct,
            'network_measured': self.network_measured,
            'network_error_pct': self.network_error_pct,
            'measured_ratio': self.measured_ratio,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            network=data['network'],
            target=Target(data['target']),
            per_layer=tuple(LayerPrediction.from_dict(row) for row in data.get('per_layer', [])),
            sum_layers=float(data['sum_layers']),
            c_used=float(data['c_used']),
            hot_layers=tuple(data.get('hot_layers', [])),
            kind_breakdown={k: float(v) for k, v in data.get('kind_breakdown', {}).items()},
            sum_measured=data.get('sum_measured'),
            sum_error_pct=data.get('sum_error_pct'),
            network_measured=data.get('network_measured'),
            network_error_pct=data.get('network_error_pct'),
        )


@dataclass(frozen=True)
class SummaryRow:
    """Error summary of one network report."""

    network: str
    target: Target
    predicted_sum: float
    measured_sum: Optional[float]
    sum_error_pct: Optional[float]
    network_total: float
    network_measured: Optional[float]
    network_error_pct: Optional[float]

    def to_dict(self):
        return {
            'network': self.network,
            'target': self.target.value,
            'predicted_sum': self.predicted_sum,
            'measured_sum': self.measured_sum,
            'sum_error_pct': self.sum_error_pct,
            'network_total': self.network_total,
            'network_measured': self.network_measured,
            'network_error_pct': self.network_error_pct,
        }


@dataclass(frozen=True)
class ReportSummary:
    """Per-network rows plus mean absolute percentage errors."""

    rows: List[SummaryRow]
    sum_mape: Optional[float] = None
    network_mape: Optional[float] = None

    def to_dict(self):
        return {
            'rows': [row.to_dict() for row in self.rows],
            'sum_mape': self.sum_mape,
            'network_mape': self.network_mape,
        }
