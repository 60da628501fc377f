"""Architectural metrics models."""
from dataclasses import dataclass

from previous_kit.models.network import LayerKind, TensorShape

PREDICTOR_NAMES = ('n_weights', 'ops', 'mem_ops')


@dataclass(frozen=True)
class MetricsOptions:
    """Counting conventions.

    im2col inflates Conv input reads to the unrolled receptive fields;
    count_bias_ops adds one operation per bias addition.
    """

    im2col: bool = False
    count_bias_ops: bool = True


@dataclass(frozen=True)
class ArchMetrics:
    """Weight, operation and memory-access counts of one layer."""

    layer_name: str
    kind: LayerKind
    n_weights: int
    ops: int
    mem_ops: int
    out_shape: TensorShape

    def __repr__(self):
        return f'<ArchMetrics {self.layer_name} ops={self.ops}>'

    @property
    def predictors(self):
        """Predictor vector [n_weights, ops, mem_ops]."""
        return [float(self.n_weights), float(self.ops), float(self.mem_ops)]

    def to_dict(self):
        return {
            'layer': self.layer_name,
            'kind': self.kind.value,
            'h_out': self.out_shape.h,
            'w_out': self.out_shape.w,
            'c_out': self.out_shape.c,
            'n_weights': self.n_weights,
            'ops': self.ops,
            'mem_ops': self.mem_ops,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            layer_name=data['layer'],
            kind=LayerKind(data['kind']),
            n_weights=int(data['n_weights']),
            ops=int(data['ops']),
            mem_ops=int(data['mem_ops']),
            out_shape=TensorShape(int(data['h_out']), int(data['w_out']), int(data['c_out'])),
        )
