from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class ScoreSet:
    task: str
    recording_ids: Tuple[str, ...]
    scores: np.ndarray
    labels: np.ndarray
    run_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'scores', np.asarray(self.scores, dtype=np.float64))
        object.__setattr__(self, 'labels', np.asarray(self.labels, dtype=np.int64))


@dataclass(frozen=True)
class EvalConfig:
    # 'recording' scores every test recording; 'participant' averages scores per participant
    unit: str = 'recording'
    batch_size: int = 64
    # models trained by repro and compared side by side in eval
    models: Tuple[str, ...] = ('marvel', 'en_m', 'en_s', 'rn_m', 'rn_s', 'mlp')


@dataclass
class Summary:
    mean: float
    std: float
    runs: List[float] = field(default_factory=list)


@dataclass
class EvalReport:
    model: str
    tasks: Dict[str, Summary]
    categories: Dict[str, Summary]
    overall: Summary
    roc: Dict[str, List[Tuple[float, float]]] = field(default_factory=dict)
    designated_run: Optional[int] = None
    metadata: Dict[str, object] = field(default_factory=dict)


@dataclass
class ReportTable:
    title: str
    header: List[str]
    rows: List[List[str]]
    # (row, column) cells rendered in bold
    bold: set = field(default_factory=set)
