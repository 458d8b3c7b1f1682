from pathlib import Path
from typing import Mapping, Sequence

from django.conf import settings

from core.files import write_json
from core.plotting import new_figure, save_figure
from corpus.models import slugify_task
from .models import AttributionReport, CorrelationReport, RecurrentFeature

CORRELATION_REPORT = 'correlation_report.json'
ATTRIBUTION_REPORT = 'attribution_report.json'


def _bar_chart(task, labels, values, xlabel, path, fingerprint):
    fig, ax = new_figure(6.0, 3.2)
    positions = list(range(len(labels)))[::-1]
    ax.barh(positions, values, color='tab:blue')
    ax.set_yticks(positions)
    ax.set_yticklabels(labels, fontsize=8)
    ax.set_xlabel(xlabel)
    ax.set_title(task)
    return save_figure(fig, path, fingerprint)


def write_correlation_reports(reports: Mapping[str, CorrelationReport], out_dir, top_k=5, fingerprint=''):
    out_dir = Path(out_dir)
    document = {
        'version': settings.MARVEL['REPORT_VERSION'],
        'fingerprint': fingerprint,
        'tasks': {
            task: {
                'layer': report.layer,
                'rows': [row.__dict__ for row in report.rows],
                'top': [row.feature for row in report.top(top_k)],
                'skipped': list(report.skipped),
            }
            for task, report in sorted(reports.items())
        },
    }
    written = [write_json(out_dir / CORRELATION_REPORT, document)]
    for task, report in sorted(reports.items()):
        top = report.top(top_k)
        labels = [f'{row.feature} (dim {row.best_dim})' for row in top]
        written.append(_bar_chart(
            task, labels, [abs(row.r) for row in top], '|Pearson r|',
            out_dir / f'corr_top5_{slugify_task(task)}.png', fingerprint,
        ))
    return written


def write_attribution_reports(
    reports: Mapping[str, AttributionReport],
    recurrence: Sequence[RecurrentFeature],
    out_dir,
    top_k=5,
    fingerprint='',
):
    out_dir = Path(out_dir)
    document = {
        'version': settings.MARVEL['REPORT_VERSION'],
        'fingerprint': fingerprint,
        'tasks': {
            task: {
                'base_value': report.base_value,
                'instances': report.instances,
                'rows': [row.__dict__ for row in report.rows],
            }
            for task, report in sorted(reports.items())
        },
        'recurrence': [
            {'feature': row.feature, 'tasks': list(row.tasks), 'average_shap': row.average_shap}
            for row in recurrence
        ],
    }
    written = [write_json(out_dir / ATTRIBUTION_REPORT, document)]
    for task, report in sorted(reports.items()):
        top = report.top(top_k)
        written.append(_bar_chart(
            task, [row.feature for row in top], [row.mean_abs_shap for row in top], 'mean |SHAP| (logit)',
            out_dir / f'shap_top5_{slugify_task(task)}.png', fingerprint,
        ))
    return written
