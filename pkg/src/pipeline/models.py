from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np

from corpus.models import TaskId


class CropMode(str, Enum):
    RANDOM_CROP = 'random_crop'
    CENTER_CROP = 'center_crop'
    PAD = 'pad'


@dataclass(frozen=True)
class AugmentConfig:
    mfcc_noise_sigma: float = 0.01
    mfcc_freq_mask_bins: int = 8
    mfcc_time_mask_frames: int = 20
    spec_freq_mask_fraction: float = 0.15
    spec_time_mask_fraction: float = 0.15
    noise_probability: float = 0.5
    mfcc_freq_mask_probability: float = 0.5
    mfcc_time_mask_probability: float = 0.5
    spec_freq_mask_probability: float = 0.5
    spec_time_mask_probability: float = 0.5
    fixed_frames: int = 512


@dataclass(frozen=True)
class Draw:
    """One sampler pick before its representations are loaded."""
    recording_id: str
    task: TaskId
    label: int


@dataclass(frozen=True, eq=False)
class BatchItem:
    recording_id: str
    task: TaskId
    label: int
    mfcc: np.ndarray    # (fixed_frames, n_mfcc)
    spec: np.ndarray    # (fixed_frames, mel_bins)


@dataclass(frozen=True, eq=False)
class Batch:
    items: List[BatchItem]
    epoch: int = 0
    index: int = 0

    def __len__(self):
        return len(self.items)

    @property
    def recording_ids(self) -> Tuple[str, ...]:
        return tuple(item.recording_id for item in self.items)

    def arrays(self):
        """Stacked (mfcc, spec, task_index, label) arrays in item order."""
        mfcc = np.stack([item.mfcc for item in self.items]).astype(np.float32)
        spec = np.stack([item.spec for item in self.items]).astype(np.float32)
        tasks = np.array([item.task.index for item in self.items], dtype=np.int64)
        labels = np.array([item.label for item in self.items], dtype=np.float32)
        return mfcc, spec, tasks, labels
