"""Per-layer architectural metrics: weights, operations, memory accesses."""
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Sequence

from previous_kit.errors import MetricsOverflowError
from previous_kit.models.metrics import ArchMetrics, MetricsOptions
from previous_kit.models.network import UINT64_MAX, LayerKind, LayerShapes, LayerSpec, ShapedNetwork, TensorShape


def _checked(value: int, what: str, layer: LayerSpec) -> int:
    if value > UINT64_MAX:
        raise MetricsOverflowError(f'{what} of {layer.name} overflows 64 bits ({value})')
    return value


def layer_weights(layer: LayerSpec, in_shapes: Sequence[TensorShape]) -> int:
    """Count learnable parameters n(W).

    Conv: k_h*k_w*(C_in/groups)*N (+N bias). FC: N_in*N_out (+N_out bias).
    BatchNorm: 2*C. Scale: C (+C bias). Other kinds have none.
    """
    first = in_shapes[0]
    kind = layer.kind
    if kind is LayerKind.CONV:
        count = layer.kernel_h * layer.kernel_w * (first.c // layer.groups) * layer.num_kernels
        if layer.has_bias:
            count += layer.num_kernels
    elif kind is LayerKind.FC:
        count = first.n * layer.out_features
        if layer.has_bias:
            count += layer.out_features
    elif kind is LayerKind.BATCHNORM:
        count = 2 * first.c
    elif kind is LayerKind.SCALE:
        count = first.c * (2 if layer.has_bias else 1)
    else:
        count = 0
    return _checked(count, 'weight count', layer)


def layer_ops(layer: LayerSpec, in_shapes: Sequence[TensorShape], out_shape: TensorShape,
              opts: MetricsOptions = MetricsOptions()) -> int:
    """Count operations #OPs (MACs and simple element operations in one scalar)."""
    first = in_shapes[0]
    kind = layer.kind
    bias = layer.has_bias and opts.count_bias_ops
    spatial_out = out_shape.h * out_shape.w

    if kind is LayerKind.CONV:
        count = layer.kernel_h * layer.kernel_w * (first.c // layer.groups) * spatial_out * layer.num_kernels
        if bias:
            count += spatial_out * layer.num_kernels
    elif kind is LayerKind.FC:
        count = first.n * layer.out_features
        if bias:
            count += layer.out_features
    elif kind is LayerKind.POOL:
        if layer.global_pool:
            count = first.n
        else:
            count = layer.kernel_h * layer.kernel_w * out_shape.n
    elif kind is LayerKind.RELU:
        count = first.n
    elif kind is LayerKind.BATCHNORM:
        count = 2 * first.n
    elif kind is LayerKind.SCALE:
        count = first.n * (2 if bias else 1)
    elif kind is LayerKind.ELTWISE:
        count = (len(in_shapes) - 1) * out_shape.n
    elif kind is LayerKind.SOFTMAX:
        # exponential, accumulation and division per element
        count = 3 * first.n
    else:
        count = 0
    return _checked(count, 'operation count', layer)


def layer_mem_ops(layer: LayerSpec, in_shapes: Sequence[TensorShape], out_shape: TensorShape,
                  n_weights: int, opts: MetricsOptions = MetricsOptions()) -> int:
    """Count memory accesses #memOPs = sum n(I) + n(W) + n(O).

    With im2col a Conv reads its unrolled receptive fields instead:
    (k_h*k_w*C_in/groups) * (H_out*W_out) * groups.
    """
    if opts.im2col and layer.kind is LayerKind.CONV:
        reads = (layer.kernel_h * layer.kernel_w * (in_shapes[0].c // layer.groups)
                 * out_shape.h * out_shape.w * layer.groups)
    else:
        reads = sum(shape.n for shape in in_shapes)
    return _checked(reads + n_weights + out_shape.n, 'memory access count', layer)


def compute_layer_metrics(layer: LayerSpec, shapes: LayerShapes, opts: MetricsOptions = MetricsOptions()) -> ArchMetrics:
    """All three predictors of one shaped layer."""
    n_weights = layer_weights(layer, shapes.inputs)
    return ArchMetrics(
        layer_name=layer.name,
        kind=layer.kind,
        n_weights=n_weights,
        ops=layer_ops(layer, shapes.inputs, shapes.output, opts),
        mem_ops=layer_mem_ops(layer, shapes.inputs, shapes.output, n_weights, opts),
        out_shape=shapes.output,
    )


def network_metrics(shaped: ShapedNetwork, opts: MetricsOptions = MetricsOptions(),
                    workers: int = 1) -> List[ArchMetrics]:
    """Metrics of every layer in topological order.

    Args:
        shaped: Network with resolved shapes
        opts: Counting conventions
        workers: Threads used for the per-layer computation

    Returns:
        One ArchMetrics per layer; order never depends on workers
    """
    pairs = list(shaped.layers_in_order())
    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda pair: compute_layer_metrics(pair[0], pair[1], opts), pairs))
    return [compute_layer_metrics(layer, shapes, opts) for layer, shapes in pairs]


def network_totals(metrics: Sequence[ArchMetrics]) -> Dict[str, int]:
    """Element-wise sums over layers; n_weights is the model size."""
    return {
        'n_weights': sum(m.n_weights for m in metrics),
        'ops': sum(m.ops for m in metrics),
        'mem_ops': sum(m.mem_ops for m in metrics),
    }
