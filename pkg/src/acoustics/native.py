"""
Natively computed handcrafted descriptors.

Pitch, glottal pulses, jitter, shimmer, harmonicity and formants are measured
by Praat through parselmouth; spectral, intensity and cepstral descriptors are
computed on the same STFT frames as the log-mel matrix. Descriptors that need
voicing are None when no voiced frame exists.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import parselmouth
from parselmouth.praat import call

from .dsp import (
    analysis_window, checked_samples, compute_log_mel, compute_mfcc, frame_signal, mel_power, power_spectrogram,
)
from .models import DspConfig, HandcraftedFeatureVector, Provenance, Waveform

logger = logging.getLogger(__name__)

NATIVE_FEATURES = (
    'f0_mean_hz',
    'f0_std_hz',
    'f0_slope_hz_per_s',
    'jitter_local',
    'shimmer_local',
    'hnr_mean_db',
    'cepstral_peak_prominence_mean',
    'h1_h2_db',
    'spectral_gravity_hz',
    'slope_uv_0_500',
    'alpha_ratio_uv_db',
    'mean_intensity_db',
    'std_intensity_db',
    'loudness_percentile20',
    'loudness_percentile80',
    'mean_f2_hz',
    'mean_f3_hz',
    'mean_b1_hz',
    'mfcc1_mean',
    'mfcc2_mean',
    'mfcc3_mean',
    'mfcc4_mean',
    'mfcc2_voiced_mean',
    'pause_fraction',
)

# reference pressure squared, samples treated as pascal
_INTENSITY_REFERENCE = 4e-10

# Praat's perturbation arguments: shortest period, longest period, period factor, amplitude factor
_SHORTEST_PERIOD_S = 0.0001
_LONGEST_PERIOD_S = 0.02
_MAX_PERIOD_FACTOR = 1.3
_MAX_AMPLITUDE_FACTOR = 1.6

_HNR_SILENCE_THRESHOLD = 0.1
_HNR_PERIODS_PER_WINDOW = 4.5


@dataclass(frozen=True, eq=False)
class PitchTrack:
    times: np.ndarray       # frame centres, s
    f0: np.ndarray          # Hz, NaN where unvoiced

    @property
    def voiced(self) -> np.ndarray:
        return np.isfinite(self.f0)


def _defined(value) -> Optional[float]:
    """Praat reports undefined measurements as NaN."""
    if value is None:
        return None
    value = float(value)
    return value if np.isfinite(value) else None


def to_sound(samples: np.ndarray, cfg: DspConfig) -> parselmouth.Sound:
    return parselmouth.Sound(np.asarray(samples, dtype=np.float64), sampling_frequency=cfg.sample_rate)


def track_pitch(sound: parselmouth.Sound, cfg: DspConfig) -> PitchTrack:
    pitch = sound.to_pitch_ac(
        time_step=cfg.hop_s,
        pitch_floor=cfg.pitch_floor,
        pitch_ceiling=cfg.pitch_ceiling,
        silence_threshold=cfg.silence_threshold,
        voicing_threshold=cfg.voicing_threshold,
        octave_cost=cfg.octave_cost,
    )
    f0 = np.asarray(pitch.selected_array['frequency'], dtype=np.float64)
    f0[f0 <= 0.0] = np.nan
    return PitchTrack(times=np.asarray(pitch.xs(), dtype=np.float64), f0=f0)


def perturbation(sound: parselmouth.Sound, cfg: DspConfig) -> Tuple[Optional[float], Optional[float]]:
    """Local jitter and local shimmer as fractions (0.02 == 2 %)."""
    pulses = call(sound, 'To PointProcess (periodic, cc)', cfg.pitch_floor, cfg.pitch_ceiling)
    if call(pulses, 'Get number of points') < 3:
        return None, None
    jitter = call(
        pulses, 'Get jitter (local)', 0, 0, _SHORTEST_PERIOD_S, _LONGEST_PERIOD_S, _MAX_PERIOD_FACTOR,
    )
    shimmer = call(
        [sound, pulses], 'Get shimmer (local)',
        0, 0, _SHORTEST_PERIOD_S, _LONGEST_PERIOD_S, _MAX_PERIOD_FACTOR, _MAX_AMPLITUDE_FACTOR,
    )
    return _defined(jitter), _defined(shimmer)


def harmonicity(sound: parselmouth.Sound, cfg: DspConfig) -> Optional[float]:
    """Mean harmonics-to-noise ratio in dB over frames Praat considers sounding."""
    hnr = call(
        sound, 'To Harmonicity (ac)', cfg.hop_s, cfg.pitch_floor, _HNR_SILENCE_THRESHOLD, _HNR_PERIODS_PER_WINDOW,
    )
    return _defined(call(hnr, 'Get mean', 0, 0))


def formants(sound: parselmouth.Sound, times: np.ndarray, cfg: DspConfig):
    """Mean F2, F3 and B1 at `times` from Burg LPC formant tracking."""
    if not len(times):
        return None, None, None
    track = call(
        sound, 'To Formant (burg)',
        cfg.hop_s, cfg.max_formants, cfg.max_formant_hz, cfg.formant_window_s, cfg.pre_emphasis_from_hz,
    )

    def mean_at(query, number):
        values = [_defined(call(track, query, number, float(t), 'Hertz', 'Linear')) for t in times]
        values = [value for value in values if value is not None and value > 0.0]
        return float(np.mean(values)) if values else None

    return mean_at('Get value at time', 2), mean_at('Get value at time', 3), mean_at('Get bandwidth at time', 1)


def _frames_at(samples: np.ndarray, times: np.ndarray, length: int, sample_rate: int) -> np.ndarray:
    """Frames of `length` samples centred on `times`, zero-padded at the edges."""
    padded = np.pad(samples, (length, length))
    starts = np.round(np.asarray(times) * sample_rate).astype(int) + length - length // 2
    return np.stack([padded[start:start + length] for start in starts])


def _silence_level(samples: np.ndarray, cfg: DspConfig) -> float:
    peak = float(np.max(np.abs(samples))) if len(samples) else 0.0
    return cfg.silence_threshold * peak


def _cepstral_features(samples: np.ndarray, track: PitchTrack, cfg: DspConfig):
    """Mean cepstral peak prominence and H1-H2 over voiced pitch frames."""
    voiced = track.voiced
    if not voiced.any():
        return None, None
    length = cfg.pitch_window
    frames = _frames_at(samples, track.times[voiced], length, cfg.sample_rate) * analysis_window(length)
    n_fft = int(2 ** np.ceil(np.log2(length)))
    power = np.abs(np.fft.rfft(frames, n=n_fft, axis=1)) ** 2
    level_db = 10.0 * np.log10(power + 1e-20)
    cepstrum = np.fft.irfft(level_db, n=n_fft, axis=1)
    quefrency = np.arange(n_fft) / cfg.sample_rate

    peak_band = (quefrency >= 1.0 / cfg.pitch_ceiling) & (quefrency <= 1.0 / cfg.pitch_floor)
    fit_band = (quefrency >= 0.001) & (quefrency <= 1.0 / cfg.pitch_floor)
    peak_index = np.flatnonzero(peak_band)
    prominences = []
    for row in cepstrum:
        slope, intercept = np.polyfit(quefrency[fit_band], row[fit_band], 1)
        k = peak_index[int(np.argmax(row[peak_band]))]
        prominences.append(row[k] - (slope * quefrency[k] + intercept))

    freqs = np.fft.rfftfreq(n_fft, d=1.0 / cfg.sample_rate)
    h1_h2 = []
    for row, f0 in zip(level_db, track.f0[voiced]):
        def harmonic_level(multiple):
            band = (freqs >= 0.9 * multiple * f0) & (freqs <= 1.1 * multiple * f0)
            return row[band].max() if band.any() else np.nan
        h1_h2.append(harmonic_level(1) - harmonic_level(2))
    h1_h2 = np.asarray(h1_h2)
    h1_h2 = h1_h2[np.isfinite(h1_h2)]
    return float(np.mean(prominences)), (float(np.mean(h1_h2)) if len(h1_h2) else None)


def _frame_centres(n_frames: int, cfg: DspConfig) -> np.ndarray:
    return (np.arange(n_frames) * cfg.hop + cfg.window / 2.0) / cfg.sample_rate


def _frame_voicing(track: PitchTrack, n_frames: int, cfg: DspConfig) -> np.ndarray:
    """Voicing of each STFT frame, taken from the nearest pitch frame."""
    if not len(track.times):
        return np.zeros(n_frames, dtype=bool)
    centres = _frame_centres(n_frames, cfg)
    nearest = np.abs(centres[:, np.newaxis] - track.times[np.newaxis, :]).argmin(axis=1)
    return track.voiced[nearest]


def _unvoiced_spectral_features(power: np.ndarray, mask: np.ndarray, cfg: DspConfig):
    if not mask.any():
        return None, None
    freqs = np.fft.rfftfreq(cfg.n_fft, d=1.0 / cfg.sample_rate)
    low_band = (freqs > 0.0) & (freqs <= 500.0)
    level_db = 10.0 * np.log10(power[mask] + 1e-20)
    slopes = np.polyfit(freqs[low_band], level_db[:, low_band].T, 1)[0]
    alpha_low = power[mask][:, (freqs >= 50.0) & (freqs < 1000.0)].sum(axis=1)
    alpha_high = power[mask][:, (freqs >= 1000.0) & (freqs <= 5000.0)].sum(axis=1)
    alpha = 10.0 * np.log10((alpha_low + 1e-20) / (alpha_high + 1e-20))
    return float(np.mean(slopes)), float(np.mean(alpha))


def _voice_quality(sound: parselmouth.Sound, voiced_times: np.ndarray, cfg: DspConfig) -> Dict[str, Optional[float]]:
    values: Dict[str, Optional[float]] = {}
    try:
        values['jitter_local'], values['shimmer_local'] = perturbation(sound, cfg)
        values['hnr_mean_db'] = harmonicity(sound, cfg)
        values['mean_f2_hz'], values['mean_f3_hz'], values['mean_b1_hz'] = formants(sound, voiced_times, cfg)
    except parselmouth.PraatError as exc:
        logger.warning(f'Praat could not analyse a {sound.duration:.3f} s recording: {exc}')
    return values


def compute_native_features(waveform: Waveform, cfg: DspConfig) -> HandcraftedFeatureVector:
    samples = checked_samples(waveform, cfg)
    values: Dict[str, Optional[float]] = dict.fromkeys(NATIVE_FEATURES)
    sound = to_sound(samples, cfg)

    try:
        track = track_pitch(sound, cfg)
    except parselmouth.PraatError as exc:
        logger.warning(f'Pitch analysis failed on a {sound.duration:.3f} s recording: {exc}')
        track = PitchTrack(times=np.zeros(0), f0=np.zeros(0))
    voiced_f0 = track.f0[track.voiced]
    if len(voiced_f0):
        values['f0_mean_hz'] = float(np.mean(voiced_f0))
        values['f0_std_hz'] = float(np.std(voiced_f0))
    if len(voiced_f0) >= 2:
        values['f0_slope_hz_per_s'] = float(np.polyfit(track.times[track.voiced], voiced_f0, 1)[0])
    values['cepstral_peak_prominence_mean'], values['h1_h2_db'] = _cepstral_features(samples, track, cfg)

    power = power_spectrogram(samples, cfg)
    frames = frame_signal(samples, cfg.window, cfg.hop)
    mean_square = np.mean(frames ** 2, axis=1)
    silence = _silence_level(samples, cfg)
    sounding = (np.sqrt(mean_square) >= silence) & (mean_square > 0.0)
    voiced_frames = _frame_voicing(track, len(frames), cfg) & sounding
    selected = sounding if sounding.any() else np.ones_like(sounding)

    values.update(_voice_quality(sound, _frame_centres(len(frames), cfg)[voiced_frames], cfg))

    ltas = power.mean(axis=0)
    if ltas.sum() > 0:
        freqs = np.fft.rfftfreq(cfg.n_fft, d=1.0 / cfg.sample_rate)
        values['spectral_gravity_hz'] = float(np.sum(freqs * ltas) / np.sum(ltas))

    values['slope_uv_0_500'], values['alpha_ratio_uv_db'] = _unvoiced_spectral_features(
        power, sounding & ~voiced_frames, cfg,
    )

    intensity = 10.0 * np.log10(np.maximum(mean_square, 1e-20) / _INTENSITY_REFERENCE)
    values['mean_intensity_db'] = float(np.mean(intensity[selected]))
    values['std_intensity_db'] = float(np.std(intensity[selected]))

    loudness = np.sum(mel_power(samples, cfg) ** 0.3, axis=1)
    values['loudness_percentile20'] = float(np.percentile(loudness[selected], 20))
    values['loudness_percentile80'] = float(np.percentile(loudness[selected], 80))

    mfcc = compute_mfcc(compute_log_mel(Waveform(samples, cfg.sample_rate), cfg), cfg.n_mfcc).values
    for k in range(1, 5):
        values[f'mfcc{k}_mean'] = float(np.mean(mfcc[:, k]))
    if voiced_frames.any():
        values['mfcc2_voiced_mean'] = float(np.mean(mfcc[voiced_frames, 2]))

    values['pause_fraction'] = float(1.0 - np.mean(sounding))
    return HandcraftedFeatureVector(values=values, provenance=Provenance.NATIVE)
