"""PreVIousNet characterization network generators.

net01 sweeps convolution, pooling, normalization and merge layers over five
levels whose channel count doubles (c, 2c, 4c, 8c, 16c) while the trunk keeps
the input resolution. Strided convolutions and pools sit on terminal branches.

net02 sweeps fully-connected transitions among the vector sizes
{c, 2c, 4c, 8c, 16c, k1, k2} with softmax on a dozen of them.
"""
from dataclasses import dataclass
from typing import List

from previous_kit.errors import ConfigurationError
from previous_kit.extensions import logger
from previous_kit.models.network import INPUT_NAME, LayerKind, LayerSpec, NetworkDef, TensorShape

NET01 = 'net01'
NET02 = 'net02'
VARIANTS = (NET01, NET02)
# smallest standard-suite resolution
NET01_MIN_SIZE = 7


@dataclass(frozen=True)
class PNetConfig:
    """Generator configuration."""

    variant: str
    h: int
    w: int
    c: int
    k1: int = 10
    k2: int = 1000

    def validate(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f'unknown variant {self.variant!r}; expected one of {", ".join(VARIANTS)}')
        if min(self.h, self.w, self.c, self.k1, self.k2) < 1:
            raise ConfigurationError(f'non-positive dimension in {self}')
        if self.variant == NET01:
            if min(self.h, self.w) < NET01_MIN_SIZE:
                raise ConfigurationError(f'net01 needs h, w >= {NET01_MIN_SIZE}, got {self.h}x{self.w}')
        elif (self.h, self.w) != (1, 1):
            raise ConfigurationError(f'net02 takes a 1x1xc vector, got {self.h}x{self.w}')

    @property
    def name(self) -> str:
        if self.variant == NET01:
            return f'previousnet01_{self.h}x{self.w}x{self.c}'
        return f'previousnet02_{self.c}'

    @property
    def file_name(self) -> str:
        return f'{self.name}.json'


class _Builder:
    """Appends layers in declaration order."""

    def __init__(self):
        self.layers: List[LayerSpec] = []

    def add(self, name, kind, inputs, **fields):
        self.layers.append(LayerSpec(name=name, kind=kind, inputs=tuple(inputs), **fields))
        return name

    def standard(self, name, src, n, stride=1):
        return self.add(name, LayerKind.CONV, [src], kernel_h=3, kernel_w=3, stride=stride, pad=1,
                        num_kernels=n, has_bias=True)

    def pointwise(self, name, src, n):
        return self.add(name, LayerKind.CONV, [src], kernel_h=1, kernel_w=1, num_kernels=n, has_bias=True)

    def depthwise(self, name, src, channels):
        return self.add(name, LayerKind.CONV, [src], kernel_h=3, kernel_w=3, pad=1,
                        num_kernels=channels, groups=channels, has_bias=False)

    def activation(self, suffix, src):
        """BatchNorm, Scale and ReLU after `src`."""
        bn = self.add(f'bn{suffix}', LayerKind.BATCHNORM, [src])
        scale = self.add(f'scale{suffix}', LayerKind.SCALE, [bn], has_bias=True)
        return self.add(f'relu{suffix}', LayerKind.RELU, [scale])

    def pool(self, name, src, fn, k=None, stride=1, global_pool=False):
        if global_pool:
            return self.add(name, LayerKind.POOL, [src], pool_fn=fn, global_pool=True)
        return self.add(name, LayerKind.POOL, [src], pool_fn=fn, kernel_h=k, kernel_w=k, stride=stride)

    def eltwise(self, name, fn, *srcs):
        return self.add(name, LayerKind.ELTWISE, srcs, eltwise_fn=fn)

    def concat(self, name, *srcs):
        return self.add(name, LayerKind.CONCAT, srcs)


def generate_01(cfg: PNetConfig) -> NetworkDef:
    """Build the 52-layer convolutional characterization network.

    Kind breakdown: 15 conv, 7 batchnorm, 7 scale, 7 relu, 6 pool,
    5 eltwise, 5 concat.
    """
    if cfg.variant != NET01:
        raise ConfigurationError(f'generate_01 called with variant {cfg.variant}')
    cfg.validate()
    c = cfg.c
    b = _Builder()

    # level 1: c channels
    x1 = INPUT_NAME
    conv1_1 = b.pointwise('conv1_1', x1, max(1, c // 2))
    conv1_2 = b.pointwise('conv1_2', conv1_1, c)
    conv1_3 = b.depthwise('conv1_3', x1, c)
    relu1_3 = b.activation('1_3', conv1_3)
    elt1 = b.eltwise('elt1', 'sum', conv1_2, relu1_3)
    x2 = b.concat('cat1', elt1, x1)
    b.pool('pool1_1', conv1_1, 'max', k=2, stride=2)
    b.pool('pool1_2', elt1, 'max', k=3, stride=1)

    # level 2: 2c
    conv2_1 = b.standard('conv2_1', x2, 2 * c)
    relu2_1 = b.activation('2_1', conv2_1)
    cat2 = b.concat('cat2', relu2_1, x2)
    b.standard('conv2_2', x2, 2 * c, stride=2)
    conv2_3 = b.pointwise('conv2_3', x2, 4 * c)
    x3 = b.eltwise('elt2', 'prod', conv2_3, cat2)
    b.pool('pool2_1', conv2_3, 'avg', k=2, stride=2)

    # level 3: 4c
    conv3_1 = b.depthwise('conv3_1', x3, 4 * c)
    relu3_1 = b.activation('3_1', conv3_1)
    conv3_2 = b.pointwise('conv3_2', x3, 2 * c)
    relu3_2 = b.activation('3_2', conv3_2)
    elt3 = b.eltwise('elt3', 'max', relu3_1, x3)
    x4 = b.concat('cat3', elt3, conv3_1)
    b.standard('conv3_3', x3, 4 * c, stride=2)
    b.pool('pool3_1', relu3_2, 'avg', k=3, stride=2)

    # level 4: 8c
    conv4_1 = b.standard('conv4_1', x4, 8 * c)
    conv4_2 = b.depthwise('conv4_2', x4, 8 * c)
    relu4_2 = b.activation('4_2', conv4_2)
    cat4 = b.concat('cat4', conv4_1, relu4_2)
    conv4_3 = b.pointwise('conv4_3', x4, 16 * c)
    x5 = b.eltwise('elt4', 'sum', conv4_3, cat4)
    b.pool('pool4_1', conv4_1, 'max', k=3, stride=2)

    # level 5: 16c
    conv5_1 = b.standard('conv5_1', x5, 16 * c)
    relu5_1 = b.activation('5_1', conv5_1)
    conv5_2 = b.pointwise('conv5_2', x5, 8 * c)
    conv5_3 = b.standard('conv5_3', x5, 16 * c, stride=2)
    b.activation('5_3', conv5_3)
    elt5 = b.eltwise('elt5', 'sum', relu5_1, x5)
    b.concat('cat5', elt5, relu5_1)
    b.pool('pool5_1', conv5_2, 'avg', global_pool=True)

    net = NetworkDef(name=cfg.name, input_shape=TensorShape(cfg.h, cfg.w, c), layers=tuple(b.layers))
    logger.debug(f'Generated {net.name} with {len(net.layers)} layers')
    return net


def generate_02(cfg: PNetConfig) -> NetworkDef:
    """Build the 44-layer fully-connected characterization network (32 fc, 12 softmax)."""
    if cfg.variant != NET02:
        raise ConfigurationError(f'generate_02 called with variant {cfg.variant}')
    cfg.validate()
    c = cfg.c
    tags = ['c', '2c', '4c', '8c', '16c']
    sizes = [c, 2 * c, 4 * c, 8 * c, 16 * c]
    b = _Builder()

    def fc(src_tag, dst_tag, src, n):
        return b.add(f'fc_{src_tag}_to_{dst_tag}', LayerKind.FC, [src], out_features=n, has_bias=True)

    # trunk c -> 2c -> 4c -> 8c -> 16c
    trunk = [INPUT_NAME]
    for i in range(4):
        trunk.append(fc(tags[i], tags[i + 1], trunk[i], sizes[i + 1]))

    to_k1, to_k2 = [], []
    for i, src in enumerate(trunk):
        for j in range(5):
            if j != i and j != i + 1:
                fc(tags[i], tags[j], src, sizes[j])
        to_k1.append(fc(tags[i], 'k1', src, cfg.k1))
        to_k2.append(fc(tags[i], 'k2', src, cfg.k2))
    k1_to_k2 = fc('k1', 'k2', to_k1[0], cfg.k2)
    k2_to_k1 = fc('k2', 'k1', to_k2[0], cfg.k1)

    for src in to_k1[:4] + to_k2[:4] + [k1_to_k2, k2_to_k1, trunk[1], trunk[4]]:
        b.add(f'prob_{src}', LayerKind.SOFTMAX, [src])

    net = NetworkDef(name=cfg.name, input_shape=TensorShape(1, 1, c), layers=tuple(b.layers))
    logger.debug(f'Generated {net.name} with {len(net.layers)} layers')
    return net


def generate(cfg: PNetConfig) -> NetworkDef:
    """Dispatch on the configured variant."""
    cfg.validate()
    return generate_01(cfg) if cfg.variant == NET01 else generate_02(cfg)


def standard_suite() -> List[PNetConfig]:
    """The four net01 input sizes plus the 1x1x256 net02 configuration."""
    return [
        PNetConfig(NET01, 56, 56, 32),
        PNetConfig(NET01, 28, 28, 64),
        PNetConfig(NET01, 14, 14, 64),
        PNetConfig(NET01, 7, 7, 64),
        PNetConfig(NET02, 1, 1, 256, k1=10, k2=1000),
    ]
