from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from core.files import fingerprint


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 1e-4
    weight_decay: float = 1e-5
    betas: Tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    max_epochs: int = 40
    grad_clip_norm: float = 1.0
    runs: int = 5
    items_per_class: int = 6
    baseline_items_per_class: int = 54
    # 'final' or 'best_validation'; the latter needs split.validation_fraction > 0
    checkpoint_selection: str = 'final'
    # task name -> (w0, w1); tasks not listed use inverse class frequencies
    class_weights: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    seed: int = 0

    def fingerprint(self) -> str:
        return fingerprint(self)


@dataclass
class EpochRecord:
    epoch: int
    lr: float
    loss: float
    task_loss: Dict[str, float]
    grad_norm: float            # mean pre-clip global norm over the epoch's steps
    grad_norm_max: float
    steps: int
    validation_auroc: Optional[float] = None


@dataclass
class RunLog:
    model: str
    run: int
    seed: int
    tasks: Tuple[str, ...]
    epochs: List[EpochRecord] = field(default_factory=list)
    checkpoint: Optional[str] = None
    best_checkpoint: Optional[str] = None
    wall_time_s: float = 0.0

    def losses(self) -> List[float]:
        return [record.loss for record in self.epochs]
