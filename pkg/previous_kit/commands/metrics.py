"""metrics command: per-layer architectural metrics of a network."""
import click

from previous_kit.commands import InputFile, emit, load_shaped
from previous_kit.models.metrics import MetricsOptions
from previous_kit.utils.io import render_json, render_metrics_csv
from previous_kit.utils.metrics import network_metrics, network_totals


@click.command('metrics')
@click.option('--net', 'net_path', type=InputFile, required=True, help='Network document.')
@click.option('--im2col', is_flag=True, help='Count unrolled Conv input reads.')
@click.option('--no-bias-ops', is_flag=True, help='Exclude bias additions from #OPs.')
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Output file (default stdout).')
@click.pass_obj
def metrics_cmd(settings, net_path, im2col, no_bias_ops, out):
    """Compute n(W), #OPs and #memOPs of every layer."""
    shaped = load_shaped(net_path)
    opts = MetricsOptions(im2col=im2col, count_bias_ops=not no_bias_ops)
    metrics = network_metrics(shaped, opts, workers=settings['WORKERS'])

    if settings['FORMAT'] == 'json':
        data = {
            'network': shaped.net.name,
            'options': {'im2col': opts.im2col, 'count_bias_ops': opts.count_bias_ops},
            'layers': [m.to_dict() for m in metrics],
            'totals': network_totals(metrics),
        }
        emit(render_json(data, settings['STAMP']), out)
    else:
        emit(render_metrics_csv(metrics, settings['STAMP']), out)
