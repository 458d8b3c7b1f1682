import logging
import math
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from corpus.models import CorpusManifest, Label, Side, TaskId
from .exceptions import EmptyPool
from .models import Draw

logger = logging.getLogger(__name__)


class _Pool:
    """Shuffled once per epoch, consumed without replacement, then drawn with replacement."""

    def __init__(self, recording_ids: Sequence[str], rng: np.random.Generator):
        self.recording_ids = list(recording_ids)
        self.rng = rng
        self.order = [self.recording_ids[i] for i in rng.permutation(len(self.recording_ids))]
        self.position = 0

    def take(self, count: int) -> List[str]:
        picked = []
        for _ in range(count):
            if self.position < len(self.order):
                picked.append(self.order[self.position])
                self.position += 1
            else:
                picked.append(self.recording_ids[int(self.rng.integers(len(self.recording_ids)))])
        return picked


class BalancedTaskSampler:
    """
    Multi-task balanced batches: every batch holds `per_class` positive and
    `per_class` negative training recordings of every task, grouped by task.
    """

    def __init__(self, manifest: CorpusManifest, tasks: Sequence[TaskId], per_class: int = 6, seed: int = 0):
        self.tasks = tuple(tasks)
        self.per_class = per_class
        self.seed = seed
        self.pools: Dict[Tuple[TaskId, Label], List[str]] = {}
        for task in self.tasks:
            for label in (Label.POSITIVE, Label.NEGATIVE):
                ids = [recording.recording_id for recording in manifest.select(task.name, Side.TRAIN, label)]
                if not ids:
                    logger.error(f'Empty training pool: {task.name} / {label.name.lower()}')
                    raise EmptyPool(
                        f'No {label.name.lower()} training recordings for task {task.name!r}.',
                        task=task.name, label=label.value,
                    )
                self.pools[(task, label)] = ids

    @property
    def batch_size(self) -> int:
        return 2 * self.per_class * len(self.tasks)

    def epoch_length(self) -> int:
        return math.ceil(max(len(ids) for ids in self.pools.values()) / self.per_class)

    def epoch(self, epoch: int) -> Iterator[List[Draw]]:
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, epoch]))
        # pools are built in a fixed (task, class) order so rng use is reproducible
        pools = {key: _Pool(ids, rng) for key, ids in self.pools.items()}
        for _ in range(self.epoch_length()):
            draws = []
            for task in self.tasks:
                for label in (Label.POSITIVE, Label.NEGATIVE):
                    for recording_id in pools[(task, label)].take(self.per_class):
                        draws.append(Draw(recording_id=recording_id, task=task, label=label.value_int))
            yield draws
