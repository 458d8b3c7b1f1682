"""Shared fixtures for the app test suites: tiny corpora, caches and run configs."""

import shutil
import tempfile
from pathlib import Path

import numpy as np

from acoustics.cache import RepresentationCache
from acoustics.dsp import compute_representations
from acoustics.models import DspConfig, Waveform
from corpus.models import SplitConfig, SynthSpec
from corpus.splits import make_splits
from corpus.synthesis import generate_synthetic_corpus
from networks.models import ModelConfig, ModelKind, NetworkSpec
from pipeline.models import AugmentConfig
from pipeline.services import BatchAssembler

# breath noise, jitter and pause markers
TINY_TASKS = ('Airway Stenosis', 'Benign Lesions of the Vocal Cord', 'AD/MCI')
TINY_DSP = DspConfig(mel_bins=64, n_mfcc=20)
TINY_AUGMENT = AugmentConfig(fixed_frames=48, mfcc_freq_mask_bins=4, mfcc_time_mask_frames=6)


def tiny_synth_spec(**overrides) -> SynthSpec:
    values = dict(
        tasks=TINY_TASKS,
        marker_strengths=dict.fromkeys(TINY_TASKS, 0.8),
        participants_per_class=6,
        recordings_per_participant=2,
        comorbidity_probability=0.0,
        duration_s=0.6,
        onset_noise_s=0.05,
        seed=0,
    )
    values.update(overrides)
    return SynthSpec(**values)


def tiny_corpus(**overrides):
    """(manifest without split, waveform store)."""
    return generate_synthetic_corpus(tiny_synth_spec(**overrides))


def tiny_split_corpus(seed: int = 0, **overrides):
    manifest, store = tiny_corpus(**overrides)
    return make_splits(manifest, SplitConfig(seed=seed)), store


def sine(freq: float, duration_s: float = 0.5, sample_rate: int = 16000, amplitude: float = 0.5) -> Waveform:
    t = np.arange(int(round(duration_s * sample_rate))) / sample_rate
    return Waveform(samples=amplitude * np.sin(2.0 * np.pi * freq * t), sample_rate=sample_rate)


def fill_cache(directory, store, cfg: DspConfig = TINY_DSP) -> RepresentationCache:
    cache = RepresentationCache(directory, cfg)
    for recording_id in sorted(store):
        cache.save(recording_id, *compute_representations(store[recording_id], cfg))
    return cache


def tiny_assembler(directory, store, seed: int = 0, augment: AugmentConfig = TINY_AUGMENT) -> BatchAssembler:
    return BatchAssembler(fill_cache(directory, store), augment, seed)


def tiny_network_spec(kind=ModelKind.MARVEL, tasks=TINY_TASKS, feature_names=(), **config) -> NetworkSpec:
    return NetworkSpec(
        kind=ModelKind(kind),
        config=ModelConfig(preset='tiny', **config),
        tasks=tuple(tasks),
        n_mfcc=TINY_DSP.n_mfcc,
        mel_bins=TINY_DSP.mel_bins,
        feature_names=tuple(feature_names),
        dsp_fingerprint=TINY_DSP.fingerprint(),
    )


def tiny_run_config(output_dir, **sections) -> dict:
    """A run config document small enough for end-to-end command tests."""
    document = {
        'seed': 0,
        'output_dir': str(output_dir),
        'dsp': {'mel_bins': 64, 'n_mfcc': 20},
        'synth': {
            'tasks': list(TINY_TASKS),
            'default_strength': 0.8,
            'participants_per_class': 6,
            'recordings_per_participant': 2,
            'comorbidity_probability': 0.0,
            'duration_s': 0.6,
            'onset_noise_s': 0.05,
        },
        'model': {'preset': 'tiny', 'mlp_hidden': [8]},
        'train': {'max_epochs': 2, 'runs': 2, 'lr': 0.001, 'baseline_items_per_class': 6},
        'augment': {'fixed_frames': 48, 'mfcc_freq_mask_bins': 4, 'mfcc_time_mask_frames': 6},
        'eval': {'models': ['marvel', 'mlp']},
        'analysis': {
            'min_common': 3, 'tsne_tasks': [], 'shap_max_evals': 64,
            'shap_background': 50, 'shap_instances': 2,
        },
    }
    for name, values in sections.items():
        document.setdefault(name, {}).update(values)
    return document


class TempDirMixin:
    """Gives each test a fresh `self.tmp` directory, removed afterwards."""

    def setUp(self):
        super().setUp()
        self.tmp = Path(tempfile.mkdtemp(prefix='marvel-test-'))
        self.addCleanup(shutil.rmtree, self.tmp, ignore_errors=True)
