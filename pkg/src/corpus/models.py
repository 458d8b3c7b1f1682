import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from core.files import fingerprint


DEFAULT_TASKS = (
    'Airway Stenosis',
    'COPD',
    'Asthma',
    'Vocal Fold Paralysis',
    'Laryngeal Cancer',
    'Benign Lesions of the Vocal Cord',
    'Spasmodic Dysphonia/Laryngeal Tremor',
    "Parkinson's",
    'AD/MCI',
)

CATEGORY_CHOICES = [
    ('Respiratory', ('Airway Stenosis', 'Asthma', 'COPD')),
    ('Voice', (
        'Laryngeal Cancer',
        'Benign Lesions of the Vocal Cord',
        'Spasmodic Dysphonia/Laryngeal Tremor',
        'Vocal Fold Paralysis',
    )),
    ('Neurological', ("Parkinson's", 'AD/MCI')),
]

# acoustic marker the generator injects for each disorder
MARKER_CHOICES = [
    ('breath_noise', 'hnr_mean_db'),
    ('intensity_drop', 'mean_intensity_db'),
    ('spectral_tilt', 'spectral_gravity_hz'),
    ('shimmer', 'shimmer_local'),
    ('f2_shift', 'mean_f2_hz'),
    ('jitter', 'jitter_local'),
    ('tremor', 'f0_std_hz'),
    ('f0_slope', 'f0_slope_hz_per_s'),
    ('pause', 'pause_fraction'),
]
MARKER_FEATURES = dict(MARKER_CHOICES)

DEFAULT_MARKERS = {
    'Airway Stenosis': 'breath_noise',
    'COPD': 'intensity_drop',
    'Asthma': 'spectral_tilt',
    'Vocal Fold Paralysis': 'shimmer',
    'Laryngeal Cancer': 'f2_shift',
    'Benign Lesions of the Vocal Cord': 'jitter',
    'Spasmodic Dysphonia/Laryngeal Tremor': 'tremor',
    "Parkinson's": 'f0_slope',
    'AD/MCI': 'pause',
}

SPEECH_TASKS = ('sustained_a', 'sustained_i')


def slugify_task(name: str) -> str:
    """File-name safe form of a task name: "Parkinson's" -> "parkinsons"."""
    return re.sub(r'[^a-z0-9]+', '_', name.lower().replace("'", '')).strip('_')


def category_of(task_name: str) -> Optional[str]:
    for category, members in CATEGORY_CHOICES:
        if task_name in members:
            return category
    return None


class Label(str, Enum):
    POSITIVE = 'P'
    NEGATIVE = 'N'

    @property
    def value_int(self) -> int:
        return 1 if self is Label.POSITIVE else 0


class Side(str, Enum):
    TRAIN = 'train'
    TEST = 'test'


@dataclass(frozen=True)
class TaskId:
    index: int
    name: str

    @property
    def slug(self) -> str:
        return slugify_task(self.name)

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Participant:
    participant_id: str
    metadata: Dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Recording:
    """
    One audio sample. `labels` maps task name to P or N; a task missing from
    the map means the recording is not part of that task's dataset.
    """
    recording_id: str
    participant_id: str
    speech_task: str
    labels: Dict[str, Label] = field(default_factory=dict)
    audio_ref: Optional[str] = None

    def label_for(self, task: str) -> Optional[Label]:
        return self.labels.get(task)


@dataclass(frozen=True)
class CorpusManifest:
    tasks: Tuple[TaskId, ...]
    participants: Tuple[Participant, ...]
    recordings: Tuple[Recording, ...]
    train: FrozenSet[str] = frozenset()
    test: FrozenSet[str] = frozenset()
    # participants held out of `train` for checkpoint selection
    validation: FrozenSet[str] = frozenset()
    version: int = 1

    @property
    def has_split(self) -> bool:
        return bool(self.train or self.test)

    @property
    def task_names(self) -> Tuple[str, ...]:
        return tuple(task.name for task in self.tasks)

    def task(self, name: str) -> TaskId:
        for task in self.tasks:
            if task.name == name:
                return task
        raise KeyError(name)

    def side_of(self, participant_id: str) -> Optional[Side]:
        if participant_id in self.train:
            return Side.TRAIN
        if participant_id in self.test:
            return Side.TEST
        return None

    def participants_for(self, task: str, label: Label) -> List[str]:
        return sorted({
            recording.participant_id for recording in self.recordings
            if recording.labels.get(task) is label
        })

    def select(
        self,
        task: str,
        side: Optional[Side] = None,
        label: Optional[Label] = None,
        include_validation: bool = False,
    ) -> List[Recording]:
        """Recordings of one task's dataset, sorted by recording_id."""
        selected = []
        for recording in self.recordings:
            recording_label = recording.labels.get(task)
            if recording_label is None or (label is not None and recording_label is not label):
                continue
            if side is not None and self.side_of(recording.participant_id) is not side:
                continue
            if side is Side.TRAIN and not include_validation and recording.participant_id in self.validation:
                continue
            selected.append(recording)
        return sorted(selected, key=lambda recording: recording.recording_id)

    def validation_recordings(self, task: str) -> List[Recording]:
        return [
            recording for recording in self.select(task, Side.TRAIN, include_validation=True)
            if recording.participant_id in self.validation
        ]

    def recordings_on(self, side: Side) -> List[Recording]:
        return sorted(
            (recording for recording in self.recordings if self.side_of(recording.participant_id) is side),
            key=lambda recording: recording.recording_id,
        )

    def fingerprint(self) -> str:
        from .serializers import manifest_to_document
        return fingerprint(manifest_to_document(self))


def build_tasks(names: Iterable[str]) -> Tuple[TaskId, ...]:
    return tuple(TaskId(index=index, name=name) for index, name in enumerate(names))


@dataclass(frozen=True)
class SynthSpec:
    """
    Synthetic-pathology corpus description.

    `participants_per_class` primary positives are generated per task; the
    same number of negatives is drawn per task from participants without the
    condition. A strength of 0 leaves a task's classes identically
    distributed.
    """
    tasks: Tuple[str, ...] = DEFAULT_TASKS
    markers: Dict[str, str] = field(default_factory=lambda: dict(DEFAULT_MARKERS))
    marker_strengths: Dict[str, float] = field(default_factory=dict)
    participants_per_class: int = 12
    recordings_per_participant: int = 2
    comorbidity_probability: float = 0.2
    duration_s: float = 1.5
    sample_rate: int = 16000
    onset_noise_s: float = 0.1
    baseline_jitter: float = 0.003
    baseline_shimmer: float = 0.02
    baseline_breath_noise: float = 0.01
    seed: int = 0

    def strength(self, task: str) -> float:
        return self.marker_strengths.get(task, 0.0)

    def fingerprint(self) -> str:
        return fingerprint(self)


@dataclass(frozen=True)
class SplitConfig:
    test_fraction: float = 0.18
    validation_fraction: float = 0.0
    seed: int = 0
