import logging
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from acoustics.cache import RepresentationCache
from corpus.models import CorpusManifest, TaskId
from .augment import augment_mfcc, augment_spec, fix_length
from .models import AugmentConfig, Batch, BatchItem, CropMode, Draw
from .sampler import BalancedTaskSampler

logger = logging.getLogger(__name__)


class BatchAssembler:
    """Loads cached representations and turns sampler draws into fixed-length items."""

    def __init__(self, cache: RepresentationCache, cfg: AugmentConfig, seed: int = 0):
        self.cache = cache
        self.cfg = cfg
        self.seed = seed
        self._loaded: Dict[str, Tuple[np.ndarray, np.ndarray]] = {}

    def representations(self, recording_id: str) -> Tuple[np.ndarray, np.ndarray]:
        if recording_id not in self._loaded:
            spec, mfcc = self.cache.load(recording_id)
            self._loaded[recording_id] = (mfcc.values, spec.values)
        return self._loaded[recording_id]

    def with_seed(self, seed: int) -> "BatchAssembler":
        """Same cache and loaded matrices, another augmentation seed."""
        other = BatchAssembler(self.cache, self.cfg, seed)
        other._loaded = self._loaded
        return other

    def train_item(self, draw: Draw, epoch: int, batch: int, item: int) -> BatchItem:
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, epoch, batch, item]))
        mfcc, spec = self.representations(draw.recording_id)
        # one crop offset for both views of the recording
        frames = mfcc.shape[0]
        offset = int(rng.integers(0, frames - self.cfg.fixed_frames + 1)) if frames > self.cfg.fixed_frames else 0
        mfcc = fix_length(mfcc[offset:], self.cfg.fixed_frames, CropMode.PAD)
        spec = fix_length(spec[offset:], self.cfg.fixed_frames, CropMode.PAD)
        return BatchItem(
            recording_id=draw.recording_id, task=draw.task, label=draw.label,
            mfcc=augment_mfcc(mfcc, self.cfg, rng), spec=augment_spec(spec, self.cfg, rng),
        )

    def assemble(self, draws: Sequence[Draw], epoch: int, index: int) -> Batch:
        items = [self.train_item(draw, epoch, index, position) for position, draw in enumerate(draws)]
        return Batch(items=items, epoch=epoch, index=index)

    def eval_inputs(self, recording_ids: Sequence[str]) -> Tuple[np.ndarray, np.ndarray]:
        """Center-cropped, unaugmented (mfcc, spec) stacks in the given order."""
        mfccs, specs = [], []
        for recording_id in recording_ids:
            mfcc, spec = self.representations(recording_id)
            mfccs.append(fix_length(mfcc, self.cfg.fixed_frames, CropMode.CENTER_CROP))
            specs.append(fix_length(spec, self.cfg.fixed_frames, CropMode.CENTER_CROP))
        return np.stack(mfccs).astype(np.float32), np.stack(specs).astype(np.float32)


def sample_epoch(
    manifest: CorpusManifest,
    tasks: Sequence[TaskId],
    assembler: BatchAssembler,
    epoch: int,
    per_class: int = 6,
    seed: int = 0,
) -> Iterator[Batch]:
    sampler = BalancedTaskSampler(manifest, tasks, per_class=per_class, seed=seed)
    for index, draws in enumerate(sampler.epoch(epoch)):
        yield assembler.assemble(draws, epoch, index)
