"""inspect command: validate a network and list resolved shapes."""
import click

from previous_kit.commands import InputFile, emit, load_shaped
from previous_kit.utils.io import render_json, render_shapes_csv
from previous_kit.utils.netdef import serialize_network


@click.command('inspect')
@click.option('--net', 'net_path', type=InputFile, required=True, help='Network document.')
@click.option('--canonical', is_flag=True, help='Print the canonical serialization instead.')
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Output file (default stdout).')
@click.pass_obj
def inspect_cmd(settings, net_path, canonical, out):
    """Validate a network and print its layer shapes."""
    shaped = load_shaped(net_path)
    if canonical:
        emit(serialize_network(shaped.net), out)
        return

    if settings['FORMAT'] == 'json':
        data = {
            'name': shaped.net.name,
            'input': shaped.net.input_shape.to_dict(),
            'kinds': shaped.net.kind_counts(),
            'layers': [
                {
                    'name': layer.name,
                    'kind': layer.kind.value,
                    'inputs': list(layer.inputs),
                    'output': shapes.output.to_dict(),
                }
                for layer, shapes in shaped.layers_in_order()
            ],
        }
        emit(render_json(data, settings['STAMP']), out)
    else:
        emit(render_shapes_csv(shaped, settings['STAMP']), out)
