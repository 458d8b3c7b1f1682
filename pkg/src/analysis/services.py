import logging
from pathlib import Path
from typing import Dict, List, Mapping, Tuple

from torch import nn

from acoustics.models import HandcraftedFeatureVector
from corpus.models import CorpusManifest, Side, slugify_task
from networks import checkpoints
from pipeline.services import BatchAssembler
from .attribution import check_model, recurrence_table, sample_background, shapley_attribution
from .correlation import correlate
from .embeddings import extract_embeddings
from .exceptions import InsufficientData
from .models import AnalysisConfig, AttributionReport, CorrelationReport, RecurrentFeature
from .projection import tsne, write_projection

logger = logging.getLogger(__name__)


def correlate_tasks(
    model: nn.Module,
    manifest: CorpusManifest,
    assembler: BatchAssembler,
    features: Mapping[str, HandcraftedFeatureVector],
    cfg: AnalysisConfig,
) -> Dict[str, CorrelationReport]:
    reports = {}
    for task in model.tasks:
        embeddings = extract_embeddings(model, manifest, assembler, cfg.layer, task)
        try:
            reports[task] = correlate(embeddings, features, task, cfg.min_common)
        except InsufficientData as exc:
            logger.warning(f'Correlation skipped for {task}: {exc}')
    return reports


def project_tasks(
    model: nn.Module,
    manifest: CorpusManifest,
    assembler: BatchAssembler,
    cfg: AnalysisConfig,
    out_dir,
    fingerprint: str = '',
) -> List[Path]:
    """t-SNE of shared embeddings for the configured tasks; images only, nothing reads them back."""
    written = []
    for task in cfg.tsne_tasks:
        if task not in model.tasks:
            logger.warning(f't-SNE task {task!r} is not a head of this model')
            continue
        embeddings = extract_embeddings(model, manifest, assembler, 'shared_z', task)
        labels = {recording.recording_id: recording.labels[task].value_int for recording in manifest.select(task, Side.TEST)}
        try:
            projection = tsne(embeddings, labels, cfg.seed, cfg.tsne_perplexity, cfg.tsne_iterations)
        except InsufficientData as exc:
            logger.warning(f't-SNE skipped for {task}: {exc}')
            continue
        slug = slugify_task(task)
        written.extend(write_projection(
            projection, Path(out_dir) / f'tsne_{slug}.csv', Path(out_dir) / f'tsne_{slug}.png', task, fingerprint,
        ))
    return written


def attribute_tasks(
    mlp_checkpoints: Mapping[str, Path],
    manifest: CorpusManifest,
    features: Mapping[str, HandcraftedFeatureVector],
    cfg: AnalysisConfig,
) -> Tuple[Dict[str, AttributionReport], List[RecurrentFeature]]:
    """Attribution per task from that task's MLP checkpoint, plus the cross-task recurrence table."""
    feature_names = next(iter(features.values())).names if features else ()
    reports = {}
    for task, path in sorted(mlp_checkpoints.items()):
        model, _ = checkpoints.load(path)
        check_model(model, feature_names)
        train_ids = [recording.recording_id for recording in manifest.select(task, Side.TRAIN)]
        test_ids = [recording.recording_id for recording in manifest.select(task, Side.TEST)]
        if cfg.shap_instances is not None:
            test_ids = test_ids[:cfg.shap_instances]
        background = sample_background(train_ids, cfg.shap_background, cfg.seed)
        reports[task] = shapley_attribution(model, features, background, test_ids, task, cfg.shap_max_evals, cfg.seed)
    return reports, recurrence_table(reports, k=cfg.top_k)
