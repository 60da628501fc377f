# CLI commands package
from pathlib import Path

import click

from previous_kit.errors import ValidationError
from previous_kit.extensions import logger
from previous_kit.utils.io import load_network
from previous_kit.utils.netdef import infer_shapes, validate

TARGET_CHOICES = ('runtime', 'energy', 'both')

# Existing readable file given on the command line
InputFile = click.Path(exists=True, dir_okay=False, readable=True, path_type=Path)


def targets_for(choice):
    """Expand a --target choice into target names."""
    return ['runtime', 'energy'] if choice == 'both' else [choice]


def emit(text, out=None):
    """Write command output to a file or stdout."""
    if out is None:
        click.echo(text, nl=False)
        return
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding='utf-8')
    logger.info(f'Wrote {out}')


def load_shaped(path):
    """Load, validate and shape a network document.

    Raises:
        ValidationError: listing every violation
    """
    net = load_network(path)
    violations = validate(net)
    if violations:
        raise ValidationError(f'{path}: {violations[0].message}', payload=[v.to_dict() for v in violations])
    return infer_shapes(net)
