import logging
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata
from sklearn import metrics as sk_metrics

from corpus.models import CATEGORY_CHOICES
from .exceptions import UndefinedMetric
from .models import EvalReport, ScoreSet, Summary

logger = logging.getLogger(__name__)

CATEGORY_STD_RULE = 'sample std over per-run category means'


def _check(scores: ScoreSet):
    positives = int(np.sum(scores.labels == 1))
    negatives = int(np.sum(scores.labels == 0))
    if positives == 0 or negatives == 0:
        raise UndefinedMetric(
            f'AUROC for {scores.task} needs both classes.', task=scores.task, positives=positives, negatives=negatives,
        )
    if not np.all(np.isfinite(scores.scores)):
        raise UndefinedMetric(f'Scores for {scores.task} are not finite.', task=scores.task)
    return positives, negatives


def auroc(scores: ScoreSet) -> float:
    """Mann-Whitney estimate with midranks: P(pos > neg) + P(tie) / 2."""
    positives, negatives = _check(scores)
    ranks = rankdata(scores.scores, method='average')
    rank_sum = ranks[scores.labels == 1].sum()
    u = rank_sum - positives * (positives + 1) / 2.0
    return float(u / (positives * negatives))


def roc_curve(scores: ScoreSet) -> List[Tuple[float, float]]:
    """(fpr, tpr) at every distinct score threshold, from (0, 0) to (1, 1)."""
    _check(scores)
    fpr, tpr, _ = sk_metrics.roc_curve(scores.labels, scores.scores, drop_intermediate=False)
    return [(float(x), float(y)) for x, y in zip(fpr, tpr)]


def trapezoid_area(points: Sequence[Tuple[float, float]]) -> float:
    xs = np.array([point[0] for point in points])
    ys = np.array([point[1] for point in points])
    return float(np.sum(np.diff(xs) * (ys[1:] + ys[:-1]) / 2.0))


def _summary(values: Sequence[float]) -> Summary:
    values = [float(value) for value in values]
    std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return Summary(mean=float(np.mean(values)), std=std, runs=values)


def aggregate(
    runs: Sequence[Mapping[str, float]],
    model: str = 'marvel',
    categories=CATEGORY_CHOICES,
) -> EvalReport:
    """
    `runs[r][task]` is run r's AUROC for a task. Tasks missing from every run
    are left out of the report; categories and the overall value average the
    tasks present in each run.
    """
    task_names = []
    for run in runs:
        task_names.extend(task for task in run if task not in task_names)

    tasks = {task: _summary([run[task] for run in runs if task in run]) for task in task_names}

    category_summaries = {}
    for category, members in categories:
        per_run = [
            np.mean([run[task] for task in members if task in run])
            for run in runs if any(task in run for task in members)
        ]
        if per_run:
            category_summaries[category] = _summary(per_run)

    overall = _summary([np.mean(list(run.values())) for run in runs if run]) if any(runs) else Summary(0.0, 0.0)
    return EvalReport(
        model=model,
        tasks=tasks,
        categories=category_summaries,
        overall=overall,
        metadata={'category_std': CATEGORY_STD_RULE},
    )


def participant_scores(scores: ScoreSet, participant_of: Mapping[str, str]) -> ScoreSet:
    """Collapse a recording-level ScoreSet to one mean score per participant."""
    grouped: Dict[str, List[int]] = {}
    for position, recording_id in enumerate(scores.recording_ids):
        grouped.setdefault(participant_of[recording_id], []).append(position)
    participants = sorted(grouped)
    return ScoreSet(
        task=scores.task,
        recording_ids=tuple(participants),
        scores=np.array([scores.scores[grouped[p]].mean() for p in participants]),
        labels=np.array([scores.labels[grouped[p][0]] for p in participants]),
        run_seed=scores.run_seed,
    )
