"""Network definition parsing, validation and shape inference.

Canonical document:
    {"name": ..., "input": {"h", "w", "c"}, "layers": [{"name", "kind", "inputs", ...}]}
"""
import heapq
import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from previous_kit.errors import CycleError, NetworkParseError, ShapeError, ValidationError
from previous_kit.models.network import (
    ELTWISE_FUNCTIONS,
    INPUT_NAME,
    POOL_FUNCTIONS,
    LayerKind,
    LayerShapes,
    LayerSpec,
    NetworkDef,
    ShapedNetwork,
    TensorShape,
)

_COMMON_FIELDS = ('name', 'kind', 'inputs')

# kind -> (mandatory fields, optional fields with defaults)
_KIND_FIELDS = {
    LayerKind.CONV: (
        ('kernel_h', 'kernel_w', 'num_kernels'),
        {'stride': 1, 'pad': 0, 'groups': 1, 'has_bias': True},
    ),
    LayerKind.FC: (('out_features',), {'has_bias': True}),
    LayerKind.POOL: (
        ('pool_fn',),
        {'global_pool': False, 'kernel_h': None, 'kernel_w': None, 'stride': 1, 'pad': 0},
    ),
    LayerKind.SCALE: ((), {'has_bias': False}),
    LayerKind.ELTWISE: ((), {'eltwise_fn': 'sum'}),
    LayerKind.RELU: ((), {}),
    LayerKind.BATCHNORM: ((), {}),
    LayerKind.CONCAT: ((), {}),
    LayerKind.SOFTMAX: ((), {}),
}

_POSITIVE_INT_FIELDS = ('kernel_h', 'kernel_w', 'num_kernels', 'stride', 'groups', 'out_features')


@dataclass(frozen=True)
class Violation:
    """One broken network invariant."""

    layer: str
    rule: str
    message: str

    def __str__(self):
        return self.message

    def to_dict(self):
        return {'layer': self.layer, 'rule': self.rule, 'message': self.message}


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _parse_shape(data) -> TensorShape:
    if not isinstance(data, dict):
        raise NetworkParseError('"input" must be an object with h, w, c')
    unknown = set(data) - {'h', 'w', 'c'}
    if unknown:
        raise NetworkParseError(f'unknown field(s) in input: {", ".join(sorted(unknown))}')
    for key in ('h', 'w', 'c'):
        if key not in data:
            raise NetworkParseError(f'missing field "{key}" in input')
        if not _is_int(data[key]) or data[key] < 1:
            raise NetworkParseError(f'input.{key} must be a positive integer')
    return TensorShape(data['h'], data['w'], data['c'])


def _parse_layer(data, index: int, names: set) -> LayerSpec:
    where = f'layer #{index}'
    if not isinstance(data, dict):
        raise NetworkParseError(f'{where} must be an object')
    for key in _COMMON_FIELDS:
        if key not in data:
            raise NetworkParseError(f'{where}: missing field "{key}"')

    name = data['name']
    if not isinstance(name, str) or not name:
        raise NetworkParseError(f'{where}: name must be a non-empty string')
    where = f'layer "{name}"'

    try:
        kind = LayerKind(data['kind'])
    except (ValueError, TypeError):
        raise NetworkParseError(f'{where}: unknown layer kind {data["kind"]!r}')

    mandatory, optional = _KIND_FIELDS[kind]
    allowed = set(_COMMON_FIELDS) | set(mandatory) | set(optional)
    unknown = set(data) - allowed
    if unknown:
        raise NetworkParseError(f'{where}: unknown field(s) {", ".join(sorted(unknown))} for kind {kind.value}')
    for key in mandatory:
        if key not in data:
            raise NetworkParseError(f'{where}: missing field "{key}" for kind {kind.value}')

    inputs = data['inputs']
    if not isinstance(inputs, list) or not all(isinstance(ref, str) for ref in inputs):
        raise NetworkParseError(f'{where}: inputs must be a list of layer names')
    for ref in inputs:
        if ref != INPUT_NAME and ref not in names:
            raise NetworkParseError(f'{where}: unresolved input "{ref}"')

    fields = dict(optional)
    fields.update({key: data[key] for key in data if key not in _COMMON_FIELDS})

    for key in _POSITIVE_INT_FIELDS:
        if key in fields and fields[key] is not None and (not _is_int(fields[key]) or fields[key] < 1):
            raise NetworkParseError(f'{where}: {key} must be a positive integer')
    if 'pad' in fields and (not _is_int(fields['pad']) or fields['pad'] < 0):
        raise NetworkParseError(f'{where}: pad must be a non-negative integer')
    for key in ('has_bias', 'global_pool'):
        if key in fields and not isinstance(fields[key], bool):
            raise NetworkParseError(f'{where}: {key} must be a boolean')

    if kind is LayerKind.POOL:
        if fields['pool_fn'] not in POOL_FUNCTIONS:
            raise NetworkParseError(f'{where}: pool_fn must be one of {", ".join(POOL_FUNCTIONS)}')
        geometry = [key for key in ('kernel_h', 'kernel_w', 'stride', 'pad') if key in data]
        if fields['global_pool'] and geometry:
            raise NetworkParseError(f'{where}: {", ".join(geometry)} not applicable to a global pool')
        if not fields['global_pool']:
            for key in ('kernel_h', 'kernel_w'):
                if fields[key] is None:
                    raise NetworkParseError(f'{where}: missing field "{key}" for kind pool')
    if kind is LayerKind.ELTWISE and fields['eltwise_fn'] not in ELTWISE_FUNCTIONS:
        raise NetworkParseError(f'{where}: eltwise_fn must be one of {", ".join(ELTWISE_FUNCTIONS)}')

    return LayerSpec(name=name, kind=kind, inputs=tuple(inputs), **fields)


def parse_network(text: str) -> NetworkDef:
    """Parse a canonical network document.

    Args:
        text: JSON document text

    Returns:
        NetworkDef with layers in document order and defaults applied

    Raises:
        NetworkParseError: syntax error, unknown kind or field, duplicate
            name, missing mandatory field, unresolved input
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise NetworkParseError(f'syntax error at line {e.lineno} column {e.colno}: {e.msg}')

    if not isinstance(data, dict):
        raise NetworkParseError('network document must be a JSON object')
    unknown = set(data) - {'name', 'input', 'layers'}
    if unknown:
        raise NetworkParseError(f'unknown field(s) {", ".join(sorted(unknown))}')
    for key in ('name', 'input', 'layers'):
        if key not in data:
            raise NetworkParseError(f'missing field "{key}"')
    if not isinstance(data['name'], str):
        raise NetworkParseError('name must be a string')
    if not isinstance(data['layers'], list):
        raise NetworkParseError('layers must be a list')

    input_shape = _parse_shape(data['input'])
    # Forward references parse; validate() reports them
    names = {raw['name'] for raw in data['layers'] if isinstance(raw, dict) and isinstance(raw.get('name'), str)}
    declared = set()
    layers = []
    for index, raw in enumerate(data['layers']):
        layer = _parse_layer(raw, index, names)
        if layer.name == INPUT_NAME:
            raise NetworkParseError(f'layer name "{INPUT_NAME}" is reserved for the network input')
        if layer.name in declared:
            raise NetworkParseError(f'duplicate layer name "{layer.name}"')
        declared.add(layer.name)
        layers.append(layer)

    return NetworkDef(name=data['name'], input_shape=input_shape, layers=tuple(layers))


def serialize_network(net: NetworkDef) -> str:
    """Serialize a network to its canonical text: one layer per line."""
    lines = [
        '{',
        f'  "name": {json.dumps(net.name)},',
        f'  "input": {json.dumps(net.input_shape.to_dict())},',
    ]
    if net.layers:
        lines.append('  "layers": [')
        lines.append(',\n'.join(f'    {json.dumps(layer.to_dict())}' for layer in net.layers))
        lines.append('  ]')
    else:
        lines.append('  "layers": []')
    lines.append('}')
    return '\n'.join(lines) + '\n'


def topological_order(net: NetworkDef) -> List[str]:
    """Order layers so each follows all its producers.

    Among independent layers declaration order is kept. References to
    undeclared layers are ignored here; validate() reports them.

    Raises:
        CycleError: with the members of one cycle
    """
    index = {layer.name: i for i, layer in enumerate(net.layers)}
    deps = [set(ref for ref in layer.inputs if ref in index) for layer in net.layers]
    consumers: Dict[int, List[int]] = {i: [] for i in range(len(net.layers))}
    for i, producers in enumerate(deps):
        for ref in producers:
            consumers[index[ref]].append(i)

    pending = [len(producers) for producers in deps]
    ready = [i for i, count in enumerate(pending) if count == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(net.layers[i].name)
        for j in consumers[i]:
            pending[j] -= 1
            if pending[j] == 0:
                heapq.heappush(ready, j)

    if len(order) < len(net.layers):
        raise CycleError(_find_cycle(net, index, pending))
    return order


def _find_cycle(net: NetworkDef, index: Dict[str, int], pending: List[int]) -> List[str]:
    remaining = [i for i, count in enumerate(pending) if count > 0]
    current = remaining[0]
    path: List[int] = []
    while current not in path:
        path.append(current)
        layer = net.layers[current]
        current = next(index[ref] for ref in layer.inputs if ref in index and pending[index[ref]] > 0)
    cycle = path[path.index(current):]
    return [net.layers[i].name for i in cycle]


def _expected_arity(kind: LayerKind) -> Tuple[int, Optional[int]]:
    if kind in (LayerKind.ELTWISE, LayerKind.CONCAT):
        return 2, None
    return 1, 1


def _structural_violations(layer: LayerSpec, declared: set) -> List[Violation]:
    found = []
    low, high = _expected_arity(layer.kind)
    count = len(layer.inputs)
    if count < low or (high is not None and count > high):
        expected = f'at least {low}' if high is None else str(low)
        found.append(Violation(layer.name, 'arity',
                               f'arity: {layer.kind.value} {layer.name} expects {expected} input(s), got {count}'))
    for ref in layer.inputs:
        if ref != INPUT_NAME and ref not in declared:
            found.append(Violation(layer.name, 'unresolved-input', f'unresolved input {ref} in {layer.name}'))

    missing = []
    if layer.kind is LayerKind.CONV:
        missing = [key for key in ('kernel_h', 'kernel_w', 'num_kernels') if getattr(layer, key) is None]
    elif layer.kind is LayerKind.FC and layer.out_features is None:
        missing = ['out_features']
    elif layer.kind is LayerKind.POOL:
        if layer.pool_fn is None:
            missing.append('pool_fn')
        if not layer.global_pool:
            missing += [key for key in ('kernel_h', 'kernel_w') if getattr(layer, key) is None]
    for key in missing:
        found.append(Violation(layer.name, 'missing-field', f'missing field {key} in {layer.name}'))

    for key in _POSITIVE_INT_FIELDS:
        value = getattr(layer, key)
        if value is not None and value < 1:
            found.append(Violation(layer.name, 'invalid-param', f'{key} of {layer.name} must be positive'))
    if layer.pad < 0:
        found.append(Violation(layer.name, 'invalid-param', f'pad of {layer.name} must be non-negative'))
    if (layer.kind is LayerKind.CONV and layer.num_kernels and layer.groups >= 1
            and layer.num_kernels % layer.groups):
        found.append(Violation(layer.name, 'conv-groups',
                               f'conv groups: num_kernels {layer.num_kernels} of {layer.name} '
                               f'not divisible by groups {layer.groups}'))
    return found


def _window_extent(size: int, kernel: int, stride: int, pad: int, layer: LayerSpec) -> int:
    span = size + 2 * pad - kernel
    extent = span // stride + 1
    if span < 0 or extent < 1:
        raise ShapeError(f'non-positive output dimension in {layer.name} '
                         f'(input {size}, kernel {kernel}, stride {stride}, pad {pad})',
                         rule='nonpositive-dim', layer=layer.name)
    return extent


def output_shape(layer: LayerSpec, in_shapes: Sequence[TensorShape]) -> TensorShape:
    """Infer the output shape of one layer.

    Conv/Pool: H_out = floor((H_in + 2 pad - k_h) / s) + 1, same for W.

    Raises:
        ShapeError: non-positive output, Concat h/w mismatch, Eltwise shape
            mismatch, channel count not divisible by groups
    """
    first = in_shapes[0]
    kind = layer.kind

    if kind is LayerKind.CONV:
        if first.c % layer.groups:
            raise ShapeError(f'conv groups: input channels {first.c} of {layer.name} '
                             f'not divisible by groups {layer.groups}', rule='conv-groups', layer=layer.name)
        h = _window_extent(first.h, layer.kernel_h, layer.stride, layer.pad, layer)
        w = _window_extent(first.w, layer.kernel_w, layer.stride, layer.pad, layer)
        return TensorShape(h, w, layer.num_kernels)

    if kind is LayerKind.POOL:
        if layer.global_pool:
            return TensorShape(1, 1, first.c)
        h = _window_extent(first.h, layer.kernel_h, layer.stride, layer.pad, layer)
        w = _window_extent(first.w, layer.kernel_w, layer.stride, layer.pad, layer)
        return TensorShape(h, w, first.c)

    if kind is LayerKind.FC:
        return TensorShape(1, 1, layer.out_features)

    if kind is LayerKind.CONCAT:
        for shape in in_shapes[1:]:
            if (shape.h, shape.w) != (first.h, first.w):
                raise ShapeError(f'concat shape mismatch in {layer.name}: {first} vs {shape}',
                                 rule='concat-shape', layer=layer.name)
        return TensorShape(first.h, first.w, sum(shape.c for shape in in_shapes))

    if kind is LayerKind.ELTWISE:
        for shape in in_shapes[1:]:
            if shape != first:
                raise ShapeError(f'eltwise shape mismatch in {layer.name}: {first} vs {shape}',
                                 rule='eltwise-shape', layer=layer.name)
        return first

    # ReLU, BatchNorm, Scale, Softmax
    return first


def _resolve(net: NetworkDef, order: Sequence[str], skip: set, violations: Optional[List[Violation]]):
    by_name = {layer.name: layer for layer in net.layers}
    outputs = {INPUT_NAME: net.input_shape}
    shapes: Dict[str, LayerShapes] = {}
    for name in order:
        if name in skip:
            continue
        layer = by_name[name]
        if not all(ref in outputs for ref in layer.inputs):
            continue
        in_shapes = tuple(outputs[ref] for ref in layer.inputs)
        try:
            out = output_shape(layer, in_shapes)
        except ShapeError as e:
            if violations is None:
                raise
            violations.append(Violation(name, e.rule, e.message))
            continue
        outputs[name] = out
        shapes[name] = LayerShapes(inputs=in_shapes, output=out)
    return shapes


def _forward_references(net: NetworkDef) -> List[Violation]:
    """Inputs naming the layer itself or a layer declared after it."""
    names = {layer.name for layer in net.layers}
    found = []
    earlier = set()
    for layer in net.layers:
        for ref in layer.inputs:
            if ref in names and ref not in earlier:
                found.append(Violation(layer.name, 'forward-reference',
                                       f'forward reference {ref} in {layer.name}'))
        earlier.add(layer.name)
    return found


def validate(net: NetworkDef) -> List[Violation]:
    """Collect every invariant violation of a network.

    Structural rules come first in declaration order, then the cycle check,
    then shape rules in topological order.
    """
    violations: List[Violation] = []
    seen = set()
    duplicates = False
    declared = {layer.name for layer in net.layers}
    broken = set()
    for layer in net.layers:
        if layer.name in seen:
            violations.append(Violation(layer.name, 'duplicate-name', f'duplicate name {layer.name}'))
            duplicates = True
        seen.add(layer.name)
        if layer.name == INPUT_NAME:
            violations.append(Violation(layer.name, 'reserved-name', f'layer name {INPUT_NAME} is reserved'))
        found = _structural_violations(layer, declared)
        if found:
            broken.add(layer.name)
        violations.extend(found)
    violations.extend(_forward_references(net))

    if duplicates:
        return violations
    try:
        order = topological_order(net)
    except CycleError as e:
        violations.append(Violation(e.members[0], 'cycle', e.message))
        return violations

    _resolve(net, order, broken, violations)
    return violations


def infer_shapes(net: NetworkDef) -> ShapedNetwork:
    """Resolve input and output shapes of every layer.

    Raises:
        ValidationError: structural violations (arity, references, fields)
        CycleError: the layer graph is cyclic
        ShapeError: shape rules fail
    """
    declared = {layer.name for layer in net.layers}
    if len(declared) != len(net.layers):
        raise ValidationError(f'network {net.name} has duplicate layer names')
    for layer in net.layers:
        found = _structural_violations(layer, declared)
        if found:
            raise ValidationError(found[0].message, payload=[v.to_dict() for v in found])
    forward = _forward_references(net)
    if forward:
        raise ValidationError(forward[0].message, payload=[v.to_dict() for v in forward])

    order = topological_order(net)
    shapes = _resolve(net, order, set(), None)
    return ShapedNetwork(net=net, shapes=shapes, order=tuple(order))
