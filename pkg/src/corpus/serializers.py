from rest_framework import serializers

from core.serializers import StrictSerializer
from .models import (
    DEFAULT_MARKERS, DEFAULT_TASKS, MARKER_FEATURES, CorpusManifest, Label, Participant, Recording,
    SplitConfig, SynthSpec, build_tasks,
)

MANIFEST_VERSION = 1


class SynthSpecSerializer(StrictSerializer):
    tasks = serializers.ListField(child=serializers.CharField(), default=list(DEFAULT_TASKS), min_length=1)
    markers = serializers.DictField(child=serializers.ChoiceField(choices=sorted(MARKER_FEATURES)), default=dict)
    marker_strengths = serializers.DictField(
        child=serializers.FloatField(min_value=0.0, max_value=1.0), default=dict,
    )
    default_strength = serializers.FloatField(default=0.8, min_value=0.0, max_value=1.0, write_only=True)
    participants_per_class = serializers.IntegerField(default=12, min_value=1)
    recordings_per_participant = serializers.IntegerField(default=2, min_value=1)
    comorbidity_probability = serializers.FloatField(default=0.2, min_value=0.0, max_value=1.0)
    duration_s = serializers.FloatField(default=1.5, min_value=0.1)
    sample_rate = serializers.IntegerField(default=16000, min_value=8000)
    onset_noise_s = serializers.FloatField(default=0.1, min_value=0.0)
    baseline_jitter = serializers.FloatField(default=0.003, min_value=0.0, max_value=0.2)
    baseline_shimmer = serializers.FloatField(default=0.02, min_value=0.0, max_value=0.5)
    baseline_breath_noise = serializers.FloatField(default=0.01, min_value=0.0)

    class Meta:
        dataclass = SynthSpec

    def validate_tasks(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError('Task names must be unique.')
        return value

    def validate(self, attrs):
        tasks = attrs['tasks']
        markers = {task: DEFAULT_MARKERS[task] for task in tasks if task in DEFAULT_MARKERS}
        markers.update(attrs['markers'])
        unmarked = [task for task in tasks if task not in markers]
        if unmarked:
            raise serializers.ValidationError({'markers': f'No marker assigned to task(s): {", ".join(unmarked)}.'})
        unknown = sorted(set(markers) - set(tasks)) + sorted(set(attrs['marker_strengths']) - set(tasks))
        if unknown:
            raise serializers.ValidationError({'markers': f'Unknown task(s): {", ".join(unknown)}.'})
        if attrs['onset_noise_s'] >= attrs['duration_s']:
            raise serializers.ValidationError({'onset_noise_s': 'Onset noise must be shorter than the recording.'})
        default_strength = attrs.pop('default_strength')
        strengths = {task: attrs['marker_strengths'].get(task, default_strength) for task in tasks}
        attrs.update(tasks=tuple(tasks), markers=markers, marker_strengths=strengths)
        return attrs


class SplitConfigSerializer(StrictSerializer):
    test_fraction = serializers.FloatField(default=0.18, min_value=0.01, max_value=0.99)
    validation_fraction = serializers.FloatField(default=0.0, min_value=0.0, max_value=0.5)

    class Meta:
        dataclass = SplitConfig


class ParticipantSerializer(StrictSerializer):
    participant_id = serializers.CharField()
    metadata = serializers.DictField(child=serializers.CharField(allow_blank=True), default=dict)

    class Meta:
        dataclass = Participant


class RecordingSerializer(StrictSerializer):
    recording_id = serializers.RegexField(r'^[A-Za-z0-9_.-]+$')
    participant_id = serializers.CharField()
    speech_task = serializers.CharField()
    labels = serializers.DictField(child=serializers.ChoiceField(choices=[label.value for label in Label]))
    audio_ref = serializers.CharField(required=False, allow_null=True, default=None)

    class Meta:
        dataclass = Recording

    def validate_labels(self, value):
        return {task: Label(label) for task, label in value.items()}


class SplitSerializer(StrictSerializer):
    train = serializers.ListField(child=serializers.CharField(), default=list)
    test = serializers.ListField(child=serializers.CharField(), default=list)
    validation = serializers.ListField(child=serializers.CharField(), default=list)


class ManifestSerializer(StrictSerializer):
    """
    Schema of manifest.json. Structural checks only; semantic invariants
    (leakage, class presence) are reported by `validate_manifest`.
    """
    version = serializers.IntegerField()
    tasks = serializers.ListField(child=serializers.CharField(), min_length=1)
    participants = ParticipantSerializer(many=True)
    recordings = RecordingSerializer(many=True)
    split = SplitSerializer(default=dict)
    fingerprint = serializers.CharField(required=False)

    def validate_version(self, value):
        if value != MANIFEST_VERSION:
            raise serializers.ValidationError(f'Unsupported manifest version {value}; expected {MANIFEST_VERSION}.')
        return value

    def create(self, validated_data):
        split = validated_data.get('split') or {}
        return CorpusManifest(
            tasks=build_tasks(validated_data['tasks']),
            participants=tuple(Participant(**item) for item in validated_data['participants']),
            recordings=tuple(Recording(**item) for item in validated_data['recordings']),
            train=frozenset(split.get('train', ())),
            test=frozenset(split.get('test', ())),
            validation=frozenset(split.get('validation', ())),
            version=validated_data['version'],
        )


def manifest_to_document(manifest: CorpusManifest) -> dict:
    """Canonical JSON form: every list sorted so equal manifests serialize identically."""
    return {
        'version': manifest.version,
        'tasks': list(manifest.task_names),
        'participants': [
            {'participant_id': participant.participant_id, 'metadata': dict(sorted(participant.metadata.items()))}
            for participant in sorted(manifest.participants, key=lambda p: p.participant_id)
        ],
        'recordings': [
            {
                'recording_id': recording.recording_id,
                'participant_id': recording.participant_id,
                'speech_task': recording.speech_task,
                'labels': {task: recording.labels[task].value for task in sorted(recording.labels)},
                'audio_ref': recording.audio_ref,
            }
            for recording in sorted(manifest.recordings, key=lambda r: r.recording_id)
        ],
        'split': {
            'train': sorted(manifest.train),
            'test': sorted(manifest.test),
            'validation': sorted(manifest.validation),
        },
    }
