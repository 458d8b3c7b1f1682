from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

LAYER_CHOICES = ('head_hidden', 'shared_z')


@dataclass(frozen=True)
class AnalysisConfig:
    # correlation layer; head_hidden is the per-task head activation
    layer: str = 'head_hidden'
    top_k: int = 5
    min_common: int = 10
    tsne_tasks: Tuple[str, ...] = ('AD/MCI', "Parkinson's")
    tsne_perplexity: float = 30.0
    tsne_iterations: int = 1000
    shap_max_evals: int = 2048
    shap_background: int = 100
    # cap on explained test instances per task; None explains all of them
    shap_instances: Optional[int] = None
    seed: int = 0


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    layer: str
    task: Optional[str]
    recording_ids: Tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'vectors', np.asarray(self.vectors, dtype=np.float64).reshape(len(self.recording_ids), -1))

    @property
    def width(self) -> int:
        return self.vectors.shape[1]

    def rows(self) -> Dict[str, np.ndarray]:
        return {recording_id: self.vectors[index] for index, recording_id in enumerate(self.recording_ids)}


@dataclass(frozen=True)
class FeatureCorrelation:
    feature: str
    best_dim: int
    r: float
    n: int


@dataclass
class CorrelationReport:
    task: str
    layer: str
    rows: List[FeatureCorrelation] = field(default_factory=list)
    skipped: List[str] = field(default_factory=list)

    def top(self, k: int = 5) -> List[FeatureCorrelation]:
        return self.rows[:k]


@dataclass(frozen=True)
class FeatureAttribution:
    feature: str
    mean_abs_shap: float


@dataclass
class AttributionReport:
    task: str
    rows: List[FeatureAttribution] = field(default_factory=list)
    base_value: float = 0.0
    instances: int = 0

    def top(self, k: int = 5) -> List[FeatureAttribution]:
        return self.rows[:k]


@dataclass(frozen=True)
class RecurrentFeature:
    """A feature ranked in the top-k of several tasks."""
    feature: str
    tasks: Tuple[str, ...]
    average_shap: float
