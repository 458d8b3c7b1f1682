import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from acoustics.models import HandcraftedFeatureVector
from corpus.models import CorpusManifest, Side
from networks import checkpoints
from networks.inference import score_recordings
from networks.models import ModelKind, NetworkSpec
from pipeline.services import BatchAssembler
from training.services import feature_matrix
from .models import EvalConfig, EvalReport, ScoreSet
from .scoring import aggregate, auroc, participant_scores, roc_curve

logger = logging.getLogger(__name__)


class CheckpointScorer:
    """Scores test recordings with checkpoints, loading each checkpoint once."""

    def __init__(
        self,
        manifest: CorpusManifest,
        cfg: EvalConfig,
        assembler: Optional[BatchAssembler] = None,
        features: Optional[Mapping[str, HandcraftedFeatureVector]] = None,
        expected: Optional[Mapping[str, NetworkSpec]] = None,
    ):
        self.manifest = manifest
        self.cfg = cfg
        self.assembler = assembler
        self.features = features
        self.expected = expected or {}
        self._models = {}

    def model(self, path, task: str):
        key = (str(path), task)
        if key not in self._models:
            self._models[key] = checkpoints.load(path, expected=self.expected.get(task))
        return self._models[key]

    def score(self, path, task: str) -> ScoreSet:
        model, meta = self.model(path, task)
        recordings = self.manifest.select(task, Side.TEST)
        ids = tuple(recording.recording_id for recording in recordings)
        labels = np.array([recording.labels[task].value_int for recording in recordings])
        spec: NetworkSpec = model.network_spec
        if spec.kind is ModelKind.MLP:
            scores = model.predict_logits(feature_matrix(self.features, ids, spec.feature_names))
        else:
            scores = score_recordings(model, self.assembler, ids, spec.tasks.index(task), self.cfg.batch_size)
        scored = ScoreSet(task=task, recording_ids=ids, scores=scores, labels=labels, run_seed=meta.get('seed', 0))
        if self.cfg.unit == 'participant':
            participant_of = {recording.recording_id: recording.participant_id for recording in recordings}
            scored = participant_scores(scored, participant_of)
        return scored


def evaluate(
    model_name: str,
    run_checkpoints: Sequence[Mapping[str, Path]],
    scorer: CheckpointScorer,
) -> EvalReport:
    """
    `run_checkpoints[r][task]` is the checkpoint scoring `task` in run r; the
    multi-task model maps every task to the same file. ROC curves come from
    the run with the best overall mean AUROC.
    """
    run_scores: List[Dict[str, ScoreSet]] = []
    run_aurocs: List[Dict[str, float]] = []
    for run, checkpoints_by_task in enumerate(run_checkpoints):
        scores = {task: scorer.score(path, task) for task, path in checkpoints_by_task.items()}
        run_scores.append(scores)
        run_aurocs.append({task: auroc(scored) for task, scored in scores.items()})
        logger.info(f'{model_name} run {run}: mean AUROC {np.mean(list(run_aurocs[-1].values())):.3f}')

    report = aggregate(run_aurocs, model=model_name)
    designated = int(np.argmax([np.mean(list(values.values())) for values in run_aurocs]))
    report.designated_run = designated
    report.roc = {task: roc_curve(scored) for task, scored in run_scores[designated].items()}
    report.metadata.update({
        'unit': scorer.cfg.unit,
        # trailing path parts only, so reports do not depend on the output root
        'checkpoints': [
            {task: '/'.join(Path(path).parts[-4:]) for task, path in sorted(item.items())} for item in run_checkpoints
        ],
        'test_counts': {task: int(len(scored.labels)) for task, scored in run_scores[0].items()},
    })
    return report
