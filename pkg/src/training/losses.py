import logging
from typing import Dict, Mapping, Sequence, Tuple

import torch
import torch.nn.functional as F

from corpus.models import CorpusManifest, Label, Side
from networks.models import ForwardOutput
from .exceptions import EmptyClass, InternalInvariantBroken

logger = logging.getLogger(__name__)


def weighted_bce(logit, y, w0: float = 1.0, w1: float = 1.0) -> torch.Tensor:
    """
    -(w1 y log s(l) + w0 (1 - y) log(1 - s(l))) in softplus form, which stays
    finite for any finite logit: -log s(l) = softplus(-l), -log(1 - s(l)) = softplus(l).
    """
    if not torch.is_tensor(logit):
        logit = torch.tensor(logit, dtype=torch.float64)
    y = torch.as_tensor(y, dtype=logit.dtype)
    # labels are 0 or 1; selecting avoids 0 * inf at infinite logits
    return torch.where(y > 0.5, w1 * F.softplus(-logit), w0 * F.softplus(logit))


def total_loss(
    output: ForwardOutput,
    labels: torch.Tensor,
    weights: Mapping[int, Tuple[float, float]],
    tasks: Sequence[int],
) -> Tuple[torch.Tensor, Dict[int, torch.Tensor]]:
    """
    Sum over `tasks` of the mean weighted BCE of that task's items. Each task
    must have been scored on at least one item.
    """
    per_task = {}
    for task in tasks:
        rows = output.rows.get(task)
        if rows is None or rows.numel() == 0:
            logger.error(f'Batch has no items for task index {task}')
            raise InternalInvariantBroken('A task required by the loss has no items in the batch.', task=task)
        w0, w1 = weights[task]
        per_task[task] = weighted_bce(output.logits[task], labels.index_select(0, rows), w0, w1).mean()
    total = torch.stack([per_task[task] for task in tasks]).sum()
    return total, per_task


def class_weights_from_manifest(manifest: CorpusManifest, task: str) -> Tuple[float, float]:
    """(w0, w1) = (N / 2 N_neg, N / 2 N_pos) over the task's training recordings."""
    positives = len(manifest.select(task, Side.TRAIN, Label.POSITIVE))
    negatives = len(manifest.select(task, Side.TRAIN, Label.NEGATIVE))
    if positives == 0 or negatives == 0:
        raise EmptyClass(
            f'Task {task!r} lacks a class in the training split.',
            task=task, positives=positives, negatives=negatives,
        )
    total = positives + negatives
    return total / (2.0 * negatives), total / (2.0 * positives)
