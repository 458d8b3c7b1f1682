"""
Run configuration: one JSON file with a section per module plus the global
seed and output directory. Sections are validated independently so errors
name their section; the global seed is injected into every seeded section.
"""

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Optional

from rest_framework import serializers

from acoustics.models import DspConfig
from acoustics.serializers import DspConfigSerializer
from analysis.models import AnalysisConfig
from analysis.serializers import AnalysisConfigSerializer
from core.exceptions import ConfigError
from core.files import fingerprint, read_json, to_jsonable
from core.serializers import StrictSerializer, flatten_errors
from corpus.models import SplitConfig, SynthSpec
from corpus.serializers import SplitConfigSerializer, SynthSpecSerializer
from metrics.models import EvalConfig
from metrics.serializers import EvalConfigSerializer
from networks.models import ModelConfig
from networks.serializers import ModelConfigSerializer
from pipeline.models import AugmentConfig
from pipeline.serializers import AugmentConfigSerializer
from training.models import TrainConfig
from training.serializers import TrainConfigSerializer

logger = logging.getLogger(__name__)

SECTION_SERIALIZERS = {
    'dsp': DspConfigSerializer,
    'synth': SynthSpecSerializer,
    'split': SplitConfigSerializer,
    'model': ModelConfigSerializer,
    'train': TrainConfigSerializer,
    'augment': AugmentConfigSerializer,
    'eval': EvalConfigSerializer,
    'analysis': AnalysisConfigSerializer,
}
SEEDED_SECTIONS = ('synth', 'split', 'train', 'analysis')


class RunConfigSerializer(StrictSerializer):
    """Top level of the run config; section bodies are checked by their own serializers."""
    seed = serializers.IntegerField(default=0, min_value=0)
    output_dir = serializers.CharField(default='output')
    dsp = serializers.DictField(default=dict)
    synth = serializers.DictField(default=dict)
    split = serializers.DictField(default=dict)
    model = serializers.DictField(default=dict)
    train = serializers.DictField(default=dict)
    augment = serializers.DictField(default=dict)
    eval = serializers.DictField(default=dict)
    analysis = serializers.DictField(default=dict)

    def validate(self, attrs):
        errors = {}
        for name, serializer_class in SECTION_SERIALIZERS.items():
            section = serializer_class(data=attrs[name])
            if section.is_valid():
                attrs[name] = section.validated_data
            else:
                errors[name] = section.errors
        if errors:
            raise serializers.ValidationError(errors)
        return attrs

    def create(self, validated_data):
        seed = validated_data['seed']
        sections = {}
        for name, serializer_class in SECTION_SERIALIZERS.items():
            data = dict(validated_data[name])
            if name in SEEDED_SECTIONS:
                data['seed'] = seed
            sections[name] = serializer_class().create(data)
        return RunConfig(seed=seed, output_dir=validated_data['output_dir'], **sections)


def _section_payload(section):
    if isinstance(section, DspConfig):
        return section.fingerprint()
    return section


@dataclass(frozen=True)
class RunConfig:
    dsp: DspConfig
    synth: SynthSpec
    split: SplitConfig
    model: ModelConfig
    train: TrainConfig
    augment: AugmentConfig
    eval: EvalConfig
    analysis: AnalysisConfig
    seed: int = 0
    output_dir: str = 'output'

    def with_seed(self, seed: int) -> 'RunConfig':
        sections = {name: replace(getattr(self, name), seed=seed) for name in SEEDED_SECTIONS}
        return replace(self, seed=seed, **sections)

    def document(self) -> dict:
        return to_jsonable(self)

    def fingerprint(self) -> str:
        """Whole effective config except the output location and worker count."""
        document = self.document()
        document.pop('output_dir')
        document['dsp'].pop('workers')
        return fingerprint(document)

    def stage_fingerprint(self, *sections: str, **extra) -> str:
        """Fingerprint over the named sections only; a stage is stale when any of them changes."""
        payload = {name: _section_payload(getattr(self, name)) for name in sections}
        return fingerprint({**payload, **extra})


@dataclass(frozen=True)
class LoadedConfig:
    config: RunConfig
    # config as validated from the file, before CLI overrides
    validated: RunConfig
    overrides: Dict[str, object]

    @property
    def fingerprint(self) -> str:
        return self.config.fingerprint()


def parse_run_config(document) -> RunConfig:
    if not isinstance(document, dict):
        raise ConfigError('Run config must be a JSON object.')
    serializer = RunConfigSerializer(data=document)
    if not serializer.is_valid():
        problems = flatten_errors(serializer.errors)
        logger.error(f'Invalid run config: {"; ".join(problems)}')
        raise ConfigError('Invalid run config: ' + '; '.join(problems), problems=len(problems))
    return serializer.save()


def load_run_config(
    path, seed: Optional[int] = None, runs: Optional[int] = None, out: Optional[str] = None,
) -> LoadedConfig:
    """Validate the file, then apply CLI overrides; overrides are recorded, not merged into the echo."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f'Config file {path} not found.', path=str(path))
    try:
        document = read_json(path)
    except json.JSONDecodeError as exc:
        raise ConfigError(f'Config file {path} is not valid JSON: {exc}', path=str(path))
    validated = parse_run_config(document)

    config, overrides = validated, {}
    if seed is not None:
        config = config.with_seed(seed)
        overrides['seed'] = seed
    if runs is not None:
        if runs < 1:
            raise ConfigError('--runs must be at least 1.', runs=runs)
        config = replace(config, train=replace(config.train, runs=runs))
        overrides['runs'] = runs
    if out is not None:
        config = replace(config, output_dir=str(out))
        overrides['output_dir'] = str(out)
    return LoadedConfig(config=config, validated=validated, overrides=overrides)


def config_schema() -> dict:
    """Published schema document: every section's fields, types and defaults."""

    def describe(serializer) -> dict:
        fields = {}
        for name, field in serializer.fields.items():
            entry = {'type': type(field).__name__, 'required': field.required}
            if field.default is not serializers.empty:
                entry['default'] = field.default() if callable(field.default) else field.default
            for attribute in ('min_value', 'max_value', 'min_length', 'max_length'):
                value = getattr(field, attribute, None)
                if value is not None:
                    entry[attribute] = value
            if isinstance(field, serializers.ChoiceField):
                entry['choices'] = sorted(str(choice) for choice in field.choices)
            if isinstance(field, serializers.ListField) and isinstance(field.child, serializers.ChoiceField):
                entry['choices'] = sorted(str(choice) for choice in field.child.choices)
            fields[name] = entry
        return fields

    top = describe(RunConfigSerializer())
    return {
        'title': 'MARVEL run config',
        'additionalProperties': False,
        'properties': {
            'seed': top['seed'],
            'output_dir': top['output_dir'],
            **{name: {'type': 'object', 'additionalProperties': False, 'properties': describe(serializer_class())}
               for name, serializer_class in SECTION_SERIALIZERS.items()},
        },
    }
