"""Command-line application factory."""
import json
import os

import click

from previous_kit import __version__
from previous_kit.config import config
from previous_kit.errors import ToolkitError, ValidationError
from previous_kit.extensions import init_logging, logger


class AppConfig(dict):
    """Upper-case settings of a config class plus per-invocation options."""

    @classmethod
    def from_object(cls, obj):
        return cls((key, getattr(obj, key)) for key in dir(obj) if key.isupper())


class ToolkitGroup(click.Group):
    """Click group with exception handlers mapped to exit statuses.

    Under `--format json` a handled domain error is also written to stdout
    as its JSON dictionary.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.error_handlers = []

    def errorhandler(self, exc_class):
        """Register a handler returning the exit status for `exc_class`."""
        def decorator(func):
            self.error_handlers.append((exc_class, func))
            return func
        return decorator

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.exceptions.Exit:
            raise
        except Exception as error:
            for exc_class, handler in self.error_handlers:
                if isinstance(error, exc_class):
                    status = handler(error)
                    if isinstance(error, ToolkitError) and (ctx.obj or {}).get('FORMAT') == 'json':
                        click.echo(json.dumps(error.to_dict()))
                    ctx.exit(status)
            raise


def create_app(config_name=None):
    """Create and configure the command-line application."""
    if config_name is None:
        config_name = os.environ.get('PREVIOUS_ENV', 'development')

    settings = AppConfig.from_object(config[config_name])
    init_logging(settings['LOG_LEVEL'])

    @click.group(cls=ToolkitGroup, context_settings={'help_option_names': ['-h', '--help']})
    @click.version_option(__version__, prog_name='previous-kit')
    @click.option('--format', 'output_format', type=click.Choice(['csv', 'json']), default='csv',
                  show_default=True, help='Output format of tabular results.')
    @click.option('--quiet', is_flag=True, help='Only report errors.')
    @click.option('--stamp', is_flag=True, help='Add a generation timestamp to outputs.')
    @click.option('--workers', type=click.IntRange(min=1), default=settings['WORKERS'], show_default=True,
                  help='Threads for per-layer work.')
    @click.pass_context
    def cli(ctx, output_format, quiet, stamp, workers):
        """Predict per-layer CNN runtime and energy from architectural metrics."""
        init_logging(settings['LOG_LEVEL'], quiet=quiet)
        ctx.obj = AppConfig(settings, FORMAT=output_format, STAMP=stamp, WORKERS=workers)

    cli.config = settings
    register_commands(cli)
    register_error_handlers(cli)
    return cli


def register_commands(cli):
    """Register subcommands."""
    from previous_kit.commands.inspect import inspect_cmd
    from previous_kit.commands.metrics import metrics_cmd
    from previous_kit.commands.generate import generate_cmd
    from previous_kit.commands.simulate import simulate_cmd
    from previous_kit.commands.fit import fit_cmd
    from previous_kit.commands.predict import predict_cmd
    from previous_kit.commands.report import report_cmd

    cli.add_command(inspect_cmd)
    cli.add_command(metrics_cmd)
    cli.add_command(generate_cmd)
    cli.add_command(simulate_cmd)
    cli.add_command(fit_cmd)
    cli.add_command(predict_cmd)
    cli.add_command(report_cmd)


def register_error_handlers(cli):
    """Register error handlers."""

    @cli.errorhandler(ValidationError)
    def handle_validation_error(error):
        """Report every violation, exit 1."""
        logger.error(error.message)
        details = error.payload if isinstance(error.payload, list) else []
        for violation in details[1:]:
            logger.error(violation['message'])
        return error.exit_code

    @cli.errorhandler(ToolkitError)
    def handle_toolkit_error(error):
        """Domain errors exit 1, format errors exit 2."""
        logger.error(error.message)
        return error.exit_code

    @cli.errorhandler(OSError)
    def handle_os_error(error):
        """I/O errors exit 2."""
        logger.error(f'{error.strerror or error}: {error.filename}' if error.filename else str(error))
        return 2
