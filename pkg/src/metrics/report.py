"""
Report rendering: report.json (versioned), report.md, report.pdf and one ROC
image per task. Comparison reports put several models side by side with the
best model of each row in bold.
"""

import logging
from pathlib import Path
from typing import Dict, List, Sequence

from django.conf import settings

from core.files import write_json
from core.plotting import new_figure, save_figure
from corpus.models import CATEGORY_CHOICES, category_of, slugify_task
from .models import EvalReport, ReportTable, Summary
from .pdf_report import generate_report_pdf

logger = logging.getLogger(__name__)

REPORT_JSON = 'report.json'
REPORT_MD = 'report.md'
REPORT_PDF = 'report.pdf'
ALL_ROW = 'All'


def _summary_document(summary: Summary) -> dict:
    return {'mean': summary.mean, 'std': summary.std, 'runs': list(summary.runs)}


def report_document(report: EvalReport, fingerprint: str = '') -> dict:
    return {
        'version': settings.MARVEL['REPORT_VERSION'],
        'fingerprint': fingerprint,
        'model': report.model,
        'tasks': {task: _summary_document(summary) for task, summary in report.tasks.items()},
        'categories': {name: _summary_document(summary) for name, summary in report.categories.items()},
        'overall': _summary_document(report.overall),
        'designated_run': report.designated_run,
        'roc': {task: [list(point) for point in points] for task, points in report.roc.items()},
        'metadata': report.metadata,
    }


def format_summary(summary: Summary) -> str:
    return f'{summary.mean:.3f} ± {summary.std:.3f}'


def _row_lookup(report: EvalReport, row: str):
    if row == ALL_ROW:
        return report.overall
    return report.categories.get(row) or report.tasks.get(row)


def comparison_table(title: str, reports: Sequence[EvalReport], rows: Sequence[str], first_column: str) -> ReportTable:
    """Rows by name, one column per model; the highest mean of each row is bold."""
    table = ReportTable(title=title, header=[first_column] + [report.model for report in reports], rows=[])
    for row_index, row in enumerate(rows):
        cells, means = [row], []
        for report in reports:
            summary = _row_lookup(report, row)
            cells.append(format_summary(summary) if summary is not None else '–')
            means.append(summary.mean if summary is not None else None)
        present = [mean for mean in means if mean is not None]
        if len(reports) > 1 and present:
            best = max(present)
            table.bold |= {(row_index, column + 1) for column, mean in enumerate(means) if mean == best}
        table.rows.append(cells)
    return table


def report_tables(reports: Sequence[EvalReport]) -> List[ReportTable]:
    categories = [name for name, _ in CATEGORY_CHOICES if any(name in report.categories for report in reports)]
    tasks: List[str] = []
    for report in reports:
        tasks.extend(task for task in report.tasks if task not in tasks)
    # tasks grouped by category, in category order
    order = {name: index for index, (name, _) in enumerate(CATEGORY_CHOICES)}
    tasks.sort(key=lambda task: order.get(category_of(task), len(order)))
    return [
        comparison_table('AUROC by disorder category', reports, categories + [ALL_ROW], 'Category'),
        comparison_table('AUROC by disorder', reports, tasks, 'Disorder'),
    ]


def _markdown_table(table: ReportTable) -> List[str]:
    lines = [f'## {table.title}', '', '| ' + ' | '.join(table.header) + ' |',
             '|' + '|'.join(['---'] + [':---:'] * (len(table.header) - 1)) + '|']
    for row_index, row in enumerate(table.rows):
        cells = [f'**{cell}**' if (row_index, column) in table.bold else cell for column, cell in enumerate(row)]
        lines.append('| ' + ' | '.join(cells) + ' |')
    lines.append('')
    return lines


def render_markdown(reports: Sequence[EvalReport], fingerprint: str = '') -> str:
    runs = max((len(report.overall.runs) for report in reports), default=0)
    models = ', '.join(report.model for report in reports)
    lines = [
        f'# Evaluation: {models}',
        '',
        f'AUROC, mean ± std over {runs} run(s); category std is the {reports[0].metadata.get("category_std", "")}.',
        f'Config fingerprint: `{fingerprint}`',
        '',
    ]
    for table in report_tables(reports):
        lines.extend(_markdown_table(table))
    designated = [f'{report.model}: run {report.designated_run}' for report in reports if report.designated_run is not None]
    if designated:
        lines.extend(['ROC curves are drawn for the run with the best overall mean AUROC (' + '; '.join(designated) + ').', ''])
    return '\n'.join(lines)


def plot_roc(task: str, points, path, fingerprint: str = '', label: str = '') -> Path:
    fig, ax = new_figure()
    xs = [point[0] for point in points]
    ys = [point[1] for point in points]
    ax.plot([0, 1], [0, 1], linestyle='--', color='grey', linewidth=0.8)
    ax.step(xs, ys, where='post', linewidth=1.5, label=label or None)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.01)
    ax.set_xlabel('False positive rate')
    ax.set_ylabel('True positive rate')
    ax.set_title(task)
    if label:
        ax.legend(loc='lower right')
    return save_figure(fig, path, fingerprint)


def render_report(report: EvalReport, out_dir, fingerprint: str = '') -> Dict[str, Path]:
    """Write every artifact of one model's report; returns name -> path."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        logger.error(f'Cannot create report directory {out_dir}: {exc}')
        raise

    written = {
        REPORT_JSON: write_json(out_dir / REPORT_JSON, report_document(report, fingerprint)),
    }
    (out_dir / REPORT_MD).write_text(render_markdown([report], fingerprint) + '\n', encoding='utf-8')
    written[REPORT_MD] = out_dir / REPORT_MD
    (out_dir / REPORT_PDF).write_bytes(generate_report_pdf(report_tables([report]), fingerprint))
    written[REPORT_PDF] = out_dir / REPORT_PDF
    for task, points in report.roc.items():
        name = f'roc_{slugify_task(task)}.png'
        written[name] = plot_roc(task, points, out_dir / name, fingerprint, label=report.model)
    logger.info(f'Rendered {report.model} report into {out_dir}')
    return written


def render_comparison(reports: Sequence[EvalReport], out_dir, fingerprint: str = '') -> Dict[str, Path]:
    """Side-by-side category and disorder tables across models."""
    out_dir = Path(out_dir)
    document = {
        'version': settings.MARVEL['REPORT_VERSION'],
        'fingerprint': fingerprint,
        'models': [report.model for report in reports],
        'reports': {report.model: report_document(report, fingerprint) for report in reports},
    }
    written = {'comparison.json': write_json(out_dir / 'comparison.json', document)}
    (out_dir / 'comparison.md').write_text(render_markdown(reports, fingerprint) + '\n', encoding='utf-8')
    written['comparison.md'] = out_dir / 'comparison.md'
    (out_dir / 'comparison.pdf').write_bytes(generate_report_pdf(report_tables(reports), fingerprint))
    written['comparison.pdf'] = out_dir / 'comparison.pdf'
    return written
