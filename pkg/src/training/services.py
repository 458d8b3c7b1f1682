"""
Training loops for the multi-task network and the single-task baselines.

Both share one recipe: AdamW, a per-epoch cosine schedule annealing to zero,
global gradient-norm clipping and class-weighted BCE. A run is fully
determined by (seed, config, manifest) in deterministic mode.
"""

import logging
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import torch
from django.conf import settings
from torch import nn
from torch.nn.utils import clip_grad_norm_
from torch.optim.lr_scheduler import CosineAnnealingLR

from acoustics.models import HandcraftedFeatureVector
from core.exceptions import MissingPrerequisite
from core.files import append_jsonl, write_json
from corpus.models import CorpusManifest, Side, TaskId
from metrics.models import ScoreSet
from metrics.scoring import auroc
from networks import checkpoints
from networks.baselines import build_model
from networks.inference import score_recordings
from networks.models import ForwardOutput, ModelKind, NetworkSpec
from pipeline.sampler import BalancedTaskSampler
from pipeline.services import BatchAssembler
from .exceptions import NonFiniteLoss
from .losses import class_weights_from_manifest, total_loss
from .models import EpochRecord, RunLog, TrainConfig

logger = logging.getLogger(__name__)

RUNLOG_FILENAME = 'runlog.jsonl'
FINAL_CHECKPOINT = 'final.pt'
BEST_CHECKPOINT = 'best.pt'


def configure_determinism() -> None:
    if settings.MARVEL.get('DETERMINISTIC', True):
        torch.use_deterministic_algorithms(True)
        torch.set_num_threads(1)


def cosine_lr(epoch: int, base_lr: float, max_epochs: int) -> float:
    """Learning rate used during `epoch` under cosine annealing to zero."""
    return 0.5 * (1.0 + math.cos(math.pi * epoch / max_epochs)) * base_lr


def run_dir_name(run: int) -> str:
    return f'run_{run:02d}'


def feature_matrix(
    features: Mapping[str, HandcraftedFeatureVector], recording_ids: Sequence[str], names: Sequence[str],
) -> np.ndarray:
    """Rows in `recording_ids` order, columns in `names` order; missing values are NaN."""
    matrix = np.full((len(recording_ids), len(names)), np.nan, dtype=np.float64)
    for row, recording_id in enumerate(recording_ids):
        vector = features[recording_id]
        for column, name in enumerate(names):
            value = vector.get(name)
            if value is not None:
                matrix[row, column] = value
    return matrix


@dataclass(eq=False)
class Step:
    recording_ids: Tuple[str, ...]
    inputs: Tuple[torch.Tensor, ...]
    task_index: torch.Tensor
    labels: torch.Tensor


class RepresentationSource:
    """Augmented, task-balanced batches of cached MFCC/log-mel pairs."""

    def __init__(self, manifest: CorpusManifest, tasks: Sequence[TaskId], assembler: BatchAssembler,
                 per_class: int, seed: int):
        self.sampler = BalancedTaskSampler(manifest, tasks, per_class=per_class, seed=seed)
        self.assembler = assembler.with_seed(seed)

    def steps(self, epoch: int) -> Iterator[Step]:
        for index, draws in enumerate(self.sampler.epoch(epoch)):
            batch = self.assembler.assemble(draws, epoch, index)
            mfcc, spec, task_index, labels = batch.arrays()
            yield Step(
                recording_ids=batch.recording_ids,
                inputs=(torch.from_numpy(mfcc).unsqueeze(1), torch.from_numpy(spec).unsqueeze(1)),
                task_index=torch.from_numpy(task_index),
                labels=torch.from_numpy(labels),
            )

    def forward(self, model: nn.Module, step: Step) -> ForwardOutput:
        return model(*step.inputs, task_index=step.task_index)

    def scores(self, model: nn.Module, recording_ids: Sequence[str], task: int) -> np.ndarray:
        return score_recordings(model, self.assembler, recording_ids, task)


class FeatureSource:
    """Balanced batches of handcrafted feature rows for the MLP baseline."""

    def __init__(self, manifest: CorpusManifest, task: TaskId, features: Mapping[str, HandcraftedFeatureVector],
                 feature_names: Sequence[str], per_class: int, seed: int):
        self.sampler = BalancedTaskSampler(manifest, [task], per_class=per_class, seed=seed)
        self.features = features
        self.feature_names = tuple(feature_names)

    def matrix(self, recording_ids: Sequence[str]) -> np.ndarray:
        return feature_matrix(self.features, recording_ids, self.feature_names)

    def steps(self, epoch: int) -> Iterator[Step]:
        for draws in self.sampler.epoch(epoch):
            ids = tuple(draw.recording_id for draw in draws)
            yield Step(
                recording_ids=ids,
                inputs=(torch.as_tensor(self.matrix(ids), dtype=torch.float32),),
                task_index=torch.zeros(len(ids), dtype=torch.int64),
                labels=torch.tensor([draw.label for draw in draws], dtype=torch.float32),
            )

    def forward(self, model: nn.Module, step: Step) -> ForwardOutput:
        logits = model(*step.inputs)
        rows = torch.arange(logits.shape[0])
        return ForwardOutput(logits={0: logits}, head_hidden={}, rows={0: rows})

    def scores(self, model: nn.Module, recording_ids: Sequence[str], task: int) -> np.ndarray:
        return model.predict_logits(self.matrix(recording_ids))


def loss_weights(manifest: CorpusManifest, tasks: Sequence[TaskId], cfg: TrainConfig) -> Dict[int, Tuple[float, float]]:
    weights = {}
    for task in tasks:
        override = cfg.class_weights.get(task.name)
        weights[task.index] = tuple(override) if override else class_weights_from_manifest(manifest, task.name)
    return weights


def validation_auroc(model: nn.Module, source, manifest: CorpusManifest, tasks: Sequence[TaskId]) -> Optional[float]:
    """Mean AUROC over tasks whose validation participants cover both classes."""
    values = []
    for task in tasks:
        recordings = manifest.validation_recordings(task.name)
        labels = np.array([recording.labels[task.name].value_int for recording in recordings])
        if len(set(labels.tolist())) < 2:
            continue
        ids = tuple(recording.recording_id for recording in recordings)
        values.append(auroc(ScoreSet(task=task.name, recording_ids=ids, scores=source.scores(model, ids, task.index),
                                     labels=labels)))
    return float(np.mean(values)) if values else None


def _abort(run_dir: Path, step: Step, epoch: int, index: int, what: str, value: float):
    write_json(run_dir / 'nonfinite_batch.json', {
        'epoch': epoch,
        'batch': index,
        'quantity': what,
        'value': repr(value),
        'recording_ids': list(step.recording_ids),
    })
    logger.error(f'Non-finite {what} at epoch {epoch}, batch {index}; batch ids dumped to {run_dir}')
    raise NonFiniteLoss(
        f'Non-finite {what} at epoch {epoch}, batch {index}.',
        epoch=epoch, batch=index, recording_ids=list(step.recording_ids),
    )


def train_run(
    spec: NetworkSpec,
    manifest: CorpusManifest,
    cfg: TrainConfig,
    make_source: Callable[[int], object],
    run: int,
    seed: int,
    run_dir,
    run_fingerprint: str = '',
    prepare: Optional[Callable[[nn.Module], None]] = None,
) -> RunLog:
    """
    One independent training run. `make_source(seed)` builds the batch source;
    `prepare(model)` runs once after initialization (MLP standardization).
    """
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    runlog_path = run_dir / RUNLOG_FILENAME
    runlog_path.unlink(missing_ok=True)

    torch.manual_seed(seed)
    model = build_model(spec)
    if prepare is not None:
        prepare(model)
    source = make_source(seed)
    tasks = tuple(TaskId(index=index, name=name) for index, name in enumerate(spec.tasks))
    task_indices = [task.index for task in tasks]
    weights = loss_weights(manifest, tasks, cfg)
    has_validation = bool(manifest.validation)

    optimizer = torch.optim.AdamW(
        model.parameters(), lr=cfg.lr, betas=tuple(cfg.betas), eps=cfg.eps, weight_decay=cfg.weight_decay,
    )
    scheduler = CosineAnnealingLR(optimizer, T_max=cfg.max_epochs, eta_min=0.0)

    log = RunLog(model=spec.kind.value, run=run, seed=seed, tasks=tuple(spec.tasks))
    best = None
    started = time.monotonic()
    for epoch in range(cfg.max_epochs):
        model.train()
        lr = optimizer.param_groups[0]['lr']
        loss_sum, steps = 0.0, 0
        task_sums = {task: 0.0 for task in task_indices}
        norms = []
        for index, step in enumerate(source.steps(epoch)):
            optimizer.zero_grad(set_to_none=True)
            loss, per_task = total_loss(source.forward(model, step), step.labels, weights, task_indices)
            if not torch.isfinite(loss):
                _abort(run_dir, step, epoch, index, 'loss', float(loss))
            loss.backward()
            norm = float(clip_grad_norm_(model.parameters(), cfg.grad_clip_norm))
            if not math.isfinite(norm):
                _abort(run_dir, step, epoch, index, 'gradient norm', norm)
            optimizer.step()

            loss_sum += float(loss.detach())
            for task, value in per_task.items():
                task_sums[task] += float(value.detach())
            norms.append(norm)
            steps += 1
        scheduler.step()

        record = EpochRecord(
            epoch=epoch,
            lr=lr,
            loss=loss_sum / steps,
            task_loss={spec.tasks[task]: task_sums[task] / steps for task in task_indices},
            grad_norm=float(np.mean(norms)),
            grad_norm_max=float(np.max(norms)),
            steps=steps,
        )
        if has_validation:
            record.validation_auroc = validation_auroc(model, source, manifest, tasks)
            if record.validation_auroc is not None and (best is None or record.validation_auroc > best):
                best = record.validation_auroc
                log.best_checkpoint = str(checkpoints.save(
                    model, run_dir / BEST_CHECKPOINT, seed=seed, epoch=epoch,
                    metrics={'validation_auroc': best}, run_fingerprint=run_fingerprint,
                ))
        log.epochs.append(record)
        append_jsonl(runlog_path, {'model': log.model, 'run': run, 'seed': seed, 'fingerprint': run_fingerprint,
                                   **record.__dict__})
        logger.info(
            f'{log.model} run {run} epoch {epoch}: loss {record.loss:.4f}, lr {lr:.3g}, '
            f'grad norm {record.grad_norm:.3f}'
            + (f', validation AUROC {record.validation_auroc:.3f}' if record.validation_auroc is not None else '')
        )

    final = checkpoints.save(
        model, run_dir / FINAL_CHECKPOINT, seed=seed, epoch=cfg.max_epochs - 1,
        metrics={'loss': log.epochs[-1].loss}, run_fingerprint=run_fingerprint,
    )
    use_best = cfg.checkpoint_selection == 'best_validation' and log.best_checkpoint
    if cfg.checkpoint_selection == 'best_validation' and not log.best_checkpoint:
        logger.warning(f'{log.model} run {run}: no validation checkpoint, falling back to the final epoch')
    log.checkpoint = log.best_checkpoint if use_best else str(final)
    log.wall_time_s = time.monotonic() - started
    write_json(run_dir / 'run.json', {'fingerprint': run_fingerprint, **log.__dict__})
    return log


def train(
    spec: NetworkSpec,
    manifest: CorpusManifest,
    cfg: TrainConfig,
    assembler: BatchAssembler,
    out_dir,
    run_fingerprint: str = '',
    runs: Optional[int] = None,
) -> List[RunLog]:
    """`runs` independent multi-task trainings with seeds cfg.seed + 0, 1, ..."""
    configure_determinism()
    tasks = tuple(manifest.task(name) for name in spec.tasks)
    # head order must match the manifest's task order for routed indices
    tasks = tuple(TaskId(index=index, name=task.name) for index, task in enumerate(tasks))

    def make_source(seed):
        return RepresentationSource(manifest, tasks, assembler, cfg.items_per_class, seed)

    logs = []
    for run in range(runs or cfg.runs):
        logs.append(train_run(
            spec, manifest, cfg, make_source, run, cfg.seed + run,
            Path(out_dir) / run_dir_name(run), run_fingerprint,
        ))
    return logs


def train_baselines(
    kind,
    spec: NetworkSpec,
    manifest: CorpusManifest,
    cfg: TrainConfig,
    out_dir,
    assembler: Optional[BatchAssembler] = None,
    features: Optional[Mapping[str, HandcraftedFeatureVector]] = None,
    run_fingerprint: str = '',
    runs: Optional[int] = None,
) -> Dict[str, List[RunLog]]:
    """
    One single-task model of `kind` per task in `spec.tasks`, trained on that
    task's data only with balanced batches of baseline_items_per_class per class.
    Logs land in out_dir/<task slug>/run_XX.
    """
    configure_determinism()
    kind = ModelKind(kind)
    if kind is ModelKind.MLP and features is None:
        raise MissingPrerequisite('The MLP baseline trains on a feature table; run the extract command first.')
    if kind is not ModelKind.MLP and assembler is None:
        raise MissingPrerequisite('Spectral baselines train on cached representations; run the extract command first.')

    logs: Dict[str, List[RunLog]] = {}
    for name in spec.tasks:
        task = TaskId(index=0, name=name)
        task_spec = replace(spec, kind=kind, tasks=(name,))
        prepare = None
        if kind is ModelKind.MLP:
            train_ids = [recording.recording_id for recording in manifest.select(name, Side.TRAIN)]
            train_matrix = feature_matrix(features, train_ids, task_spec.feature_names)

            def prepare(model, matrix=train_matrix):
                model.fit_standardization(matrix)

            def make_source(seed, task=task, names=task_spec.feature_names):
                return FeatureSource(manifest, task, features, names, cfg.baseline_items_per_class, seed)
        else:
            def make_source(seed, task=task):
                return RepresentationSource(manifest, [task], assembler, cfg.baseline_items_per_class, seed)

        logs[name] = [
            train_run(
                task_spec, manifest, cfg, make_source, run, cfg.seed + run,
                Path(out_dir) / task.slug / run_dir_name(run), run_fingerprint, prepare,
            )
            for run in range(runs or cfg.runs)
        ]
        logger.info(f'Trained {len(logs[name])} {kind.value} run(s) for {name}')
    return logs
