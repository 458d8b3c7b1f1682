"""
Shapley attribution of the handcrafted-feature MLP.

Values are estimated with shap's permutation explainer over an independent
background masker, so each feature's contribution to the logit is averaged
over sampled feature orderings with absent features drawn from background rows.
"""

import logging
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np
import shap

from acoustics.models import HandcraftedFeatureVector
from networks.baselines import FeatureMLP
from networks.models import ModelKind
from training.services import feature_matrix
from .exceptions import InsufficientData, UntrainedModel
from .models import AttributionReport, FeatureAttribution, RecurrentFeature

logger = logging.getLogger(__name__)


def _fill_missing(matrix: np.ndarray, model: FeatureMLP) -> np.ndarray:
    # the model reads NaN as its training mean
    mean = model.mean.detach().cpu().numpy().astype(np.float64)
    return np.where(np.isnan(matrix), mean, matrix)


def explain(
    predict,
    instances: np.ndarray,
    background: np.ndarray,
    max_evals: int = 2048,
    seed: int = 0,
    feature_names: Sequence[str] = None,
) -> Tuple[np.ndarray, float]:
    """Per-instance Shapley values of `predict` (n x d) and the background mean output."""
    masker = shap.maskers.Independent(background, max_samples=len(background))
    explainer = shap.explainers.Permutation(predict, masker, seed=seed, feature_names=feature_names)
    explanation = explainer(instances, max_evals=max(max_evals, 2 * instances.shape[1] + 1), silent=True)
    return np.asarray(explanation.values, dtype=np.float64), float(np.mean(predict(background)))


def check_model(model, feature_names: Sequence[str]) -> None:
    spec = getattr(model, 'network_spec', None)
    if spec is None or spec.kind is not ModelKind.MLP:
        raise UntrainedModel('Shapley attribution runs on a trained MLP baseline checkpoint.')
    missing = sorted(set(spec.feature_names) - set(feature_names))
    if missing:
        raise UntrainedModel(
            'MLP checkpoint was trained on features the table does not provide.', missing=missing[:5],
        )


def shapley_attribution(
    model: FeatureMLP,
    features: Mapping[str, HandcraftedFeatureVector],
    background_ids: Sequence[str],
    instance_ids: Sequence[str],
    task: str,
    max_evals: int = 2048,
    seed: int = 0,
) -> AttributionReport:
    """Mean |Shapley value| per feature over `instance_ids`, sorted descending."""
    check_model(model, next(iter(features.values())).names if features else ())
    names = model.feature_names
    if len(background_ids) == 0 or len(instance_ids) == 0:
        raise InsufficientData('Attribution needs background rows and instances.', task=task,
                               background=len(background_ids), instances=len(instance_ids))
    background = _fill_missing(feature_matrix(features, background_ids, names), model)
    instances = _fill_missing(feature_matrix(features, instance_ids, names), model)

    values, base = explain(model.predict_logits, instances, background, max_evals, seed, list(names))
    mean_abs = np.abs(values).mean(axis=0)
    rows = [FeatureAttribution(feature=name, mean_abs_shap=float(value)) for name, value in zip(names, mean_abs)]
    rows.sort(key=lambda row: (-row.mean_abs_shap, row.feature))
    logger.info(f'Attributed {len(instance_ids)} {task} instances against {len(background_ids)} background rows')
    return AttributionReport(task=task, rows=rows, base_value=base, instances=len(instance_ids))


def sample_background(recording_ids: Sequence[str], size: int, seed: int = 0) -> List[str]:
    ids = sorted(recording_ids)
    if len(ids) <= size:
        if len(ids) < 50:
            logger.warning(f'Background set has only {len(ids)} rows')
        return ids
    picked = np.random.default_rng(np.random.SeedSequence([seed, 31])).choice(len(ids), size, replace=False)
    return [ids[index] for index in sorted(picked)]


def recurrence_table(reports: Mapping[str, AttributionReport], k: int = 5, min_tasks: int = 2) -> List[RecurrentFeature]:
    """Features in the top-k of at least `min_tasks` tasks, with their average attribution there."""
    seen: Dict[str, List[Tuple[str, float]]] = {}
    for task, report in reports.items():
        for row in report.top(k):
            seen.setdefault(row.feature, []).append((task, row.mean_abs_shap))
    table = [
        RecurrentFeature(
            feature=feature,
            tasks=tuple(task for task, _ in entries),
            average_shap=float(np.mean([value for _, value in entries])),
        )
        for feature, entries in seen.items() if len(entries) >= min_tasks
    ]
    table.sort(key=lambda row: (-len(row.tasks), -row.average_shap, row.feature))
    return table
