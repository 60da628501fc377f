"""generate command: PreVIousNet characterization networks."""
from pathlib import Path

import click

from previous_kit.commands import emit
from previous_kit.extensions import logger
from previous_kit.utils.io import save_network
from previous_kit.utils.netdef import infer_shapes, serialize_network
from previous_kit.utils.previousnet import NET01, NET02, PNetConfig, generate, standard_suite


@click.command('generate')
@click.option('--variant', type=click.Choice(['01', '02']), default='01', show_default=True)
@click.option('--h', 'h', type=int, default=None, help='Input rows (net01).')
@click.option('--w', 'w', type=int, default=None, help='Input cols (net01).')
@click.option('--c', 'c', type=int, default=None, help='Input channels or vector length.')
@click.option('--k1', type=int, default=10, show_default=True, help='First custom FC length (net02).')
@click.option('--k2', type=int, default=1000, show_default=True, help='Second custom FC length (net02).')
@click.option('--suite', is_flag=True, help='Write the five standard configurations.')
@click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), default='.', show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Output file (default stdout).')
def generate_cmd(variant, h, w, c, k1, k2, suite, out_dir, out):
    """Generate PreVIousNet-01/02 network documents."""
    if suite:
        out_dir.mkdir(parents=True, exist_ok=True)
        for cfg in standard_suite():
            net = generate(cfg)
            infer_shapes(net)
            path = save_network(net, out_dir / cfg.file_name)
            logger.info(f'Wrote {path} ({len(net.layers)} layers)')
        return

    if variant == '01':
        if None in (h, w, c):
            raise click.UsageError('net01 needs --h, --w and --c')
        cfg = PNetConfig(NET01, h, w, c)
    else:
        if c is None:
            raise click.UsageError('net02 needs --c')
        cfg = PNetConfig(NET02, h or 1, w or 1, c, k1=k1, k2=k2)

    net = generate(cfg)
    infer_shapes(net)
    emit(serialize_network(net), out)
