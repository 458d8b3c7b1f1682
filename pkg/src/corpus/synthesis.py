"""
Synthetic-pathology corpus.

Every recording is a harmonic vowel built by phase accumulation over
explicitly generated glottal cycles, so period and amplitude perturbation can
be injected cycle by cycle. Each task owns one acoustic marker; positives
carry it at the task's strength, negatives (participants with other
conditions) do not.
"""

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from scipy import stats

from acoustics.audio import wav_path, write_waveform
from acoustics.models import HandcraftedFeatureVector, Waveform
from .models import (
    MARKER_FEATURES, SPEECH_TASKS, CorpusManifest, Label, Participant, Recording, SynthSpec, build_tasks,
)
from .services import MANIFEST_FILENAME, save_manifest

logger = logging.getLogger(__name__)

# formant frequencies / bandwidths in Hz
VOWELS = {
    'sustained_a': ((730.0, 1090.0, 2440.0, 3400.0), (80.0, 90.0, 120.0, 150.0)),
    'sustained_i': ((270.0, 2290.0, 3010.0, 3600.0), (60.0, 90.0, 150.0, 200.0)),
}

GLOTTAL_TILT_DB_PER_OCTAVE = -12.0
HARMONIC_CEILING_HZ = 7600.0
REFERENCE_PEAK = 0.5
PAUSE_S = 0.15
FADE_S = 0.005
TREMOR_RATE_HZ = 5.0
# E|x| = sigma * sqrt(2/pi), and E|a - b| = 2 sigma / sqrt(pi) for iid normals
_MEAN_ABS_DIFF_TO_SIGMA = math.sqrt(math.pi) / 2.0


@dataclass(frozen=True)
class VoiceParams:
    """Everything that shapes one synthesized recording."""
    f0: float = 125.0
    duration_s: float = 1.0
    sample_rate: int = 16000
    vowel: str = 'sustained_a'
    jitter: float = 0.0
    shimmer: float = 0.0
    breath_noise: float = 0.0
    gain_db: float = 0.0
    extra_tilt_db: float = 0.0
    f2_shift_hz: float = 0.0
    tremor_depth: float = 0.0
    tremor_amplitude_depth: float = 0.0
    f0_drift: float = 0.0
    pauses: int = 0
    onset_noise_s: float = 0.0


def resonance_envelope(freqs: np.ndarray, formants, bandwidths) -> np.ndarray:
    """Magnitude of a cascade of two-pole resonators, unity gain at 0 Hz."""
    response = np.ones_like(freqs, dtype=np.float64)
    for formant, bandwidth in zip(formants, bandwidths):
        half = (bandwidth / 2.0) ** 2
        response *= (half + formant ** 2) / np.sqrt(
            (half + (freqs - formant) ** 2) * (half + (freqs + formant) ** 2)
        )
    return response


def _cycle_boundaries(params: VoiceParams, length_s: float, rng) -> np.ndarray:
    """Start times of consecutive glottal cycles covering [0, length_s]."""
    sigma = params.jitter * _MEAN_ABS_DIFF_TO_SIGMA
    boundaries = [0.0]
    t = 0.0
    while t <= length_s:
        progress = t / length_s if length_s > 0 else 0.0
        f0 = params.f0 * (1.0 + params.f0_drift * progress)
        f0 *= 1.0 + params.tremor_depth * math.sin(2.0 * math.pi * TREMOR_RATE_HZ * t)
        period = 1.0 / f0
        if sigma > 0:
            period *= 1.0 + float(np.clip(rng.normal(0.0, sigma), -0.5, 0.5))
        t += period
        boundaries.append(t)
    return np.asarray(boundaries)


def _voiced_segment(params: VoiceParams, n_samples: int, rng) -> np.ndarray:
    sr = params.sample_rate
    length_s = n_samples / sr
    boundaries = _cycle_boundaries(params, length_s, rng)
    t = np.arange(n_samples) / sr
    cycle = np.searchsorted(boundaries, t, side='right') - 1
    periods = np.diff(boundaries)
    fraction = (t - boundaries[cycle]) / periods[cycle]
    phase = 2.0 * np.pi * (cycle + fraction)
    f_inst = 1.0 / periods[cycle]

    formants, bandwidths = VOWELS[params.vowel]
    formants = tuple(f + params.f2_shift_hz if i == 1 else f for i, f in enumerate(formants))
    n_harmonics = max(1, int(HARMONIC_CEILING_HZ // f_inst.max()))
    tilt = (GLOTTAL_TILT_DB_PER_OCTAVE + params.extra_tilt_db) / (20.0 * math.log10(2.0))

    signal = np.zeros(n_samples)
    for h in range(1, n_harmonics + 1):
        amplitude = resonance_envelope(h * f_inst, formants, bandwidths) * h ** tilt
        signal += amplitude * np.cos(h * phase)

    # per-cycle amplitude, applied around each cycle's peak at phase 2*pi*n
    sigma = params.shimmer * _MEAN_ABS_DIFF_TO_SIGMA
    n_cycles = len(boundaries)
    if sigma > 0:
        gains = 1.0 + np.clip(rng.normal(0.0, sigma, size=n_cycles), -0.9, 0.9)
        nearest_peak = np.minimum(cycle + (fraction >= 0.5), n_cycles - 1)
        signal *= gains[nearest_peak]
    if params.tremor_amplitude_depth > 0:
        signal *= 1.0 + params.tremor_amplitude_depth * np.sin(2.0 * np.pi * TREMOR_RATE_HZ * t)

    peak = np.max(np.abs(signal))
    signal *= REFERENCE_PEAK / peak
    if params.breath_noise > 0:
        rms = np.sqrt(np.mean(signal ** 2))
        signal += rng.normal(0.0, params.breath_noise * rms, size=n_samples)
    return signal


def _insert_pauses(signal: np.ndarray, count: int, sample_rate: int) -> np.ndarray:
    pause = int(round(PAUSE_S * sample_rate))
    fade = int(round(FADE_S * sample_rate))
    ramp = 0.5 * (1.0 + np.cos(np.linspace(0.0, np.pi, fade)))
    signal = signal.copy()
    for k in range(1, count + 1):
        center = int(len(signal) * k / (count + 1))
        start, stop = max(0, center - pause // 2), min(len(signal), center + pause // 2)
        signal[start:stop] = 0.0
        head = signal[max(0, start - fade):start]
        head *= ramp[-len(head):] if len(head) else 1.0
        tail = signal[stop:stop + fade]
        tail *= ramp[::-1][:len(tail)] if len(tail) else 1.0
    return signal


def synthesize_voice(params: VoiceParams, rng: Optional[np.random.Generator] = None) -> Waveform:
    rng = rng if rng is not None else np.random.default_rng(0)
    sr = params.sample_rate
    total = int(round(params.duration_s * sr))
    onset = int(round(params.onset_noise_s * sr))
    voiced = _voiced_segment(params, total - onset, rng)
    if params.pauses:
        voiced = _insert_pauses(voiced, params.pauses, sr)
    voiced *= 10.0 ** (params.gain_db / 20.0)
    if onset:
        # short aspiration before phonation onset
        level = 0.05 * REFERENCE_PEAK * 10.0 ** (params.gain_db / 20.0)
        voiced = np.concatenate([rng.normal(0.0, level, size=onset), voiced])
    return Waveform(samples=np.clip(voiced, -1.0, 1.0), sample_rate=sr)


def apply_marker(params: VoiceParams, marker: str, strength: float) -> VoiceParams:
    """Return `params` with one disorder marker injected at `strength` in [0, 1]."""
    if strength <= 0:
        return params
    if marker == 'breath_noise':
        return replace(params, breath_noise=params.breath_noise + 0.6 * strength)
    if marker == 'intensity_drop':
        return replace(params, gain_db=params.gain_db - 12.0 * strength)
    if marker == 'spectral_tilt':
        return replace(params, extra_tilt_db=params.extra_tilt_db - 9.0 * strength)
    if marker == 'shimmer':
        return replace(params, shimmer=params.shimmer + 0.08 * strength)
    if marker == 'f2_shift':
        return replace(params, f2_shift_hz=params.f2_shift_hz + 500.0 * strength)
    if marker == 'jitter':
        return replace(params, jitter=params.jitter + 0.03 * strength)
    if marker == 'tremor':
        return replace(
            params,
            tremor_depth=params.tremor_depth + 0.08 * strength,
            tremor_amplitude_depth=params.tremor_amplitude_depth + 0.3 * strength,
        )
    if marker == 'f0_slope':
        return replace(params, f0_drift=params.f0_drift - 0.3 * strength)
    if marker == 'pause':
        return replace(params, pauses=params.pauses + math.ceil(4.0 * strength))
    raise ValueError(f'Unknown marker {marker!r}')


def _assign_conditions(spec: SynthSpec, rng) -> List[Tuple[str, List[str]]]:
    """(participant_id, conditions) for every participant, primary condition first."""
    participants = []
    counter = 0
    for task in spec.tasks:
        for _ in range(spec.participants_per_class):
            conditions = [task]
            others = [other for other in spec.tasks if other != task]
            if others and rng.random() < spec.comorbidity_probability:
                conditions.append(others[int(rng.integers(len(others)))])
            participants.append((f'P{counter:04d}', conditions))
            counter += 1
    return participants


def _assign_negatives(spec: SynthSpec, participants, rng) -> Dict[str, Dict[str, Label]]:
    labels = {pid: {condition: Label.POSITIVE for condition in conditions} for pid, conditions in participants}
    for task in spec.tasks:
        candidates = [pid for pid, conditions in participants if task not in conditions]
        chosen = rng.choice(len(candidates), size=min(spec.participants_per_class, len(candidates)), replace=False)
        for index in sorted(chosen):
            labels[candidates[index]][task] = Label.NEGATIVE
    return labels


def generate_synthetic_corpus(spec: SynthSpec) -> Tuple[CorpusManifest, Dict[str, Waveform]]:
    """
    Build the manifest (without split) and the waveform of every recording.
    Fully determined by `spec`, including its seed.
    """
    design_rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 0]))
    participants = _assign_conditions(spec, design_rng)
    labels = _assign_negatives(spec, participants, design_rng)

    recordings, store = [], {}
    for p_index, (participant_id, conditions) in enumerate(participants):
        participant_rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 1, p_index]))
        base_f0 = float(participant_rng.uniform(100.0, 200.0))
        for r_index in range(spec.recordings_per_participant):
            rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 2, p_index, r_index]))
            speech_task = SPEECH_TASKS[r_index % len(SPEECH_TASKS)]
            params = VoiceParams(
                f0=base_f0 * float(rng.uniform(0.97, 1.03)),
                duration_s=spec.duration_s,
                sample_rate=spec.sample_rate,
                vowel=speech_task,
                jitter=spec.baseline_jitter,
                shimmer=spec.baseline_shimmer,
                breath_noise=spec.baseline_breath_noise,
                gain_db=float(rng.uniform(-3.0, 3.0)),
                onset_noise_s=spec.onset_noise_s,
            )
            for condition in conditions:
                params = apply_marker(params, spec.markers[condition], spec.strength(condition))
            recording_id = f'{participant_id}_R{r_index:02d}'
            store[recording_id] = synthesize_voice(params, rng)
            recordings.append(Recording(
                recording_id=recording_id,
                participant_id=participant_id,
                speech_task=speech_task,
                labels=dict(labels[participant_id]),
                audio_ref=f'{recording_id}.wav',
            ))

    manifest = CorpusManifest(
        tasks=build_tasks(spec.tasks),
        participants=tuple(
            Participant(participant_id=pid, metadata={'conditions': ','.join(conditions)})
            for pid, conditions in participants
        ),
        recordings=tuple(recordings),
    )
    logger.info(
        f'Generated {len(recordings)} recordings for {len(participants)} participants '
        f'over {len(spec.tasks)} tasks (seed {spec.seed})'
    )
    return manifest, store


def write_corpus(directory, manifest: CorpusManifest, store: Mapping[str, Waveform], run_fingerprint=None) -> Path:
    directory = Path(directory)
    wav_dir = directory / 'wav'
    for recording_id in sorted(store):
        write_waveform(wav_path(wav_dir, recording_id), store[recording_id])
    return save_manifest(directory / MANIFEST_FILENAME, manifest, run_fingerprint)


def marker_fidelity(
    manifest: CorpusManifest,
    features: Mapping[str, HandcraftedFeatureVector],
    spec: SynthSpec,
) -> Dict[str, dict]:
    """
    Two-sided Mann-Whitney U test of each task's marker feature between its
    positive and negative recordings.
    """
    results = {}
    for task in manifest.task_names:
        feature = MARKER_FEATURES[spec.markers[task]]
        groups = {}
        for label in (Label.POSITIVE, Label.NEGATIVE):
            values = [features[r.recording_id].get(feature) for r in manifest.select(task, label=label)
                      if r.recording_id in features]
            groups[label] = np.array([value for value in values if value is not None], dtype=np.float64)
        positives, negatives = groups[Label.POSITIVE], groups[Label.NEGATIVE]
        if len(positives) == 0 or len(negatives) == 0:
            logger.warning(f'Marker fidelity for {task}: no {feature} values on one side')
            results[task] = {'feature': feature, 'p_value': None, 'n_pos': len(positives), 'n_neg': len(negatives)}
            continue
        test = stats.mannwhitneyu(positives, negatives, alternative='two-sided')
        results[task] = {
            'feature': feature,
            'strength': spec.strength(task),
            'p_value': float(test.pvalue),
            'median_pos': float(np.median(positives)),
            'median_neg': float(np.median(negatives)),
            'n_pos': int(len(positives)),
            'n_neg': int(len(negatives)),
        }
    return results
