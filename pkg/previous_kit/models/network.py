"""Network definition models."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

from previous_kit.errors import ShapeError

# Name under which layers reference the network input tensor
INPUT_NAME = 'input'

UINT64_MAX = 2 ** 64 - 1


class LayerKind(str, Enum):
    """Layer types covered by the toolkit."""

    CONV = 'conv'
    FC = 'fc'
    POOL = 'pool'
    RELU = 'relu'
    BATCHNORM = 'batchnorm'
    SCALE = 'scale'
    CONCAT = 'concat'
    ELTWISE = 'eltwise'
    SOFTMAX = 'softmax'

    def __str__(self):
        return self.value


POOL_FUNCTIONS = ('max', 'avg')
ELTWISE_FUNCTIONS = ('sum', 'prod', 'max')


@dataclass(frozen=True)
class TensorShape:
    """3-D activation tensor shape (rows, cols, channels)."""

    h: int
    w: int
    c: int

    def __post_init__(self):
        if self.h < 1 or self.w < 1 or self.c < 1:
            raise ShapeError(f'non-positive tensor dimension {self.h}x{self.w}x{self.c}')
        if self.h * self.w * self.c > UINT64_MAX:
            raise ShapeError(f'tensor {self} exceeds 64-bit element count')

    @property
    def n(self) -> int:
        """Number of elements in the tensor."""
        return self.h * self.w * self.c

    def __str__(self):
        return f'{self.h}x{self.w}x{self.c}'

    def to_dict(self):
        return {'h': self.h, 'w': self.w, 'c': self.c}


@dataclass(frozen=True)
class LayerSpec:
    """One layer of a network definition.

    Fields that do not apply to `kind` keep their defaults.
    """

    name: str
    kind: LayerKind
    inputs: Tuple[str, ...] = ()
    kernel_h: Optional[int] = None
    kernel_w: Optional[int] = None
    stride: int = 1
    pad: int = 0
    num_kernels: Optional[int] = None
    groups: int = 1
    has_bias: bool = False
    pool_fn: Optional[str] = None
    global_pool: bool = False
    eltwise_fn: Optional[str] = None
    out_features: Optional[int] = None

    def __repr__(self):
        return f'<LayerSpec {self.name} ({self.kind.value})>'

    def to_dict(self):
        """Convert layer to its canonical document form."""
        data = {'name': self.name, 'kind': self.kind.value, 'inputs': list(self.inputs)}
        if self.kind is LayerKind.CONV:
            data.update({
                'kernel_h': self.kernel_h,
                'kernel_w': self.kernel_w,
                'stride': self.stride,
                'pad': self.pad,
                'num_kernels': self.num_kernels,
                'groups': self.groups,
                'has_bias': self.has_bias,
            })
        elif self.kind is LayerKind.FC:
            data.update({'out_features': self.out_features, 'has_bias': self.has_bias})
        elif self.kind is LayerKind.POOL:
            data.update({'pool_fn': self.pool_fn, 'global_pool': self.global_pool})
            if not self.global_pool:
                data.update({
                    'kernel_h': self.kernel_h,
                    'kernel_w': self.kernel_w,
                    'stride': self.stride,
                    'pad': self.pad,
                })
        elif self.kind is LayerKind.SCALE:
            data['has_bias'] = self.has_bias
        elif self.kind is LayerKind.ELTWISE:
            data['eltwise_fn'] = self.eltwise_fn
        return data


@dataclass(frozen=True)
class NetworkDef:
    """A network: input shape plus layers in declaration order."""

    name: str
    input_shape: TensorShape
    layers: Tuple[LayerSpec, ...] = ()

    def __repr__(self):
        return f'<NetworkDef {self.name} ({len(self.layers)} layers)>'

    def layer(self, name: str) -> LayerSpec:
        for layer in self.layers:
            if layer.name == name:
                return layer
        raise KeyError(name)

    def kind_counts(self) -> Dict[str, int]:
        """Histogram of layer kinds."""
        counts: Dict[str, int] = {}
        for layer in self.layers:
            counts[layer.kind.value] = counts.get(layer.kind.value, 0) + 1
        return counts

    def to_dict(self):
        return {
            'name': self.name,
            'input': self.input_shape.to_dict(),
            'layers': [layer.to_dict() for layer in self.layers],
        }


@dataclass(frozen=True)
class LayerShapes:
    """Resolved input shapes and output shape of one layer."""

    inputs: Tuple[TensorShape, ...]
    output: TensorShape


@dataclass(frozen=True)
class ShapedNetwork:
    """A network with every layer's shapes resolved.

    `order` is the topological order the shapes were computed in.
    """

    net: NetworkDef
    shapes: Dict[str, LayerShapes] = field(default_factory=dict)
    order: Tuple[str, ...] = ()

    def __repr__(self):
        return f'<ShapedNetwork {self.net.name}>'

    def layers_in_order(self):
        """Yield (layer, shapes) pairs in topological order."""
        by_name = {layer.name: layer for layer in self.net.layers}
        for name in self.order:
            yield by_name[name], self.shapes[name]
