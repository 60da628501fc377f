"""report command: aggregate prediction errors over networks."""
from pathlib import Path

import click

from previous_kit.commands import emit
from previous_kit.errors import ValidationError
from previous_kit.extensions import logger
from previous_kit.utils.io import load_reports, read_summary_table, render_json, render_summary_csv
from previous_kit.utils.predict import summarize_reports, summary_row


def collect_rows(inputs: Path):
    """Summary rows from report JSON files and totals tables, in file name order."""
    rows = []
    for path in sorted(inputs.iterdir()):
        if path.suffix == '.json':
            rows.extend(summary_row(report) for report in load_reports(path))
        elif path.suffix == '.csv':
            rows.extend(read_summary_table(path))
        else:
            continue
        logger.debug(f'Read {path}')
    return rows


@click.command('report')
@click.option('--inputs', type=click.Path(exists=True, file_okay=False, path_type=Path), required=True,
              help='Directory of prediction reports (.json) and totals tables (.csv).')
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Output file (default stdout).')
@click.pass_obj
def report_cmd(settings, inputs, out):
    """Summarize per-network errors and their MAPE."""
    rows = collect_rows(inputs)
    if not rows:
        raise ValidationError(f'no reports found in {inputs}')
    summary = summarize_reports(rows)
    if summary.sum_mape is not None:
        logger.info(f'{len(rows)} row(s), sum-level MAPE {summary.sum_mape:.4f}%')

    if settings['FORMAT'] == 'json':
        emit(render_json(summary.to_dict(), settings['STAMP']), out)
    else:
        emit(render_summary_csv(summary, settings['STAMP']), out)
