"""Log-mel spectrogram and MFCC extraction."""

import functools
import logging
import warnings

import librosa
import numpy as np
import scipy.fft
import scipy.signal

from .exceptions import InputTooShort, InsufficientBins, InvalidSignal
from .models import DspConfig, MfccMatrix, SpectrogramMatrix, Waveform

logger = logging.getLogger(__name__)


def checked_samples(waveform: Waveform, cfg: DspConfig) -> np.ndarray:
    """Validate a waveform and bring it to the configured sample rate."""
    if waveform.sample_rate <= 0:
        raise InvalidSignal('Sample rate must be positive.', sample_rate=waveform.sample_rate)
    samples = np.asarray(waveform.samples, dtype=np.float64)
    if samples.ndim != 1:
        raise InvalidSignal('Waveform must be one-dimensional.', shape=samples.shape)
    if not np.all(np.isfinite(samples)):
        raise InvalidSignal('Waveform contains non-finite samples.')
    if waveform.sample_rate != cfg.sample_rate:
        samples = librosa.resample(samples, orig_sr=waveform.sample_rate, target_sr=cfg.sample_rate)
    if len(samples) < cfg.window:
        raise InputTooShort(
            'Waveform is shorter than one analysis window.',
            samples=len(samples), window=cfg.window,
        )
    return samples


def frame_signal(samples: np.ndarray, frame_length: int, hop_length: int) -> np.ndarray:
    """Frames as rows, shape (1 + (len - frame_length) // hop_length, frame_length)."""
    return librosa.util.frame(np.ascontiguousarray(samples), frame_length=frame_length, hop_length=hop_length, axis=0)


@functools.lru_cache(maxsize=8)
def analysis_window(length: int) -> np.ndarray:
    return scipy.signal.get_window('hann', length, fftbins=True)


@functools.lru_cache(maxsize=8)
def mel_filterbank(sample_rate: int, n_fft: int, mel_bins: int, fmin: float, fmax: float) -> np.ndarray:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        basis = librosa.filters.mel(sr=sample_rate, n_fft=n_fft, n_mels=mel_bins, fmin=fmin, fmax=fmax)
    for warning in caught:
        logger.warning(f'Mel filterbank: {warning.message}')
    return basis.astype(np.float64)


def mel_center_frequencies(cfg: DspConfig) -> np.ndarray:
    """Peak frequency of every mel filter, in Hz."""
    return librosa.mel_frequencies(n_mels=cfg.mel_bins + 2, fmin=cfg.fmin, fmax=cfg.fmax)[1:-1]


def power_spectrogram(samples: np.ndarray, cfg: DspConfig) -> np.ndarray:
    frames = frame_signal(samples, cfg.window, cfg.hop)
    spectrum = np.fft.rfft(frames * analysis_window(cfg.window), n=cfg.n_fft, axis=1)
    return np.abs(spectrum) ** 2


def mel_power(samples: np.ndarray, cfg: DspConfig) -> np.ndarray:
    """Linear mel-band power, shape (frames, mel bins)."""
    basis = mel_filterbank(cfg.sample_rate, cfg.n_fft, cfg.mel_bins, cfg.fmin, cfg.fmax)
    return power_spectrogram(samples, cfg) @ basis.T


def compute_log_mel(waveform: Waveform, cfg: DspConfig) -> SpectrogramMatrix:
    samples = checked_samples(waveform, cfg)
    values = np.log(mel_power(samples, cfg) + cfg.log_floor)
    return SpectrogramMatrix(values=values, frame_hop_s=cfg.hop / cfg.sample_rate)


@functools.lru_cache(maxsize=8)
def dct_matrix(n_coefficients: int, n_bins: int) -> np.ndarray:
    """Orthonormal type-II DCT basis, shape (n_coefficients, n_bins)."""
    return scipy.fft.dct(np.eye(n_bins), type=2, norm='ortho', axis=0)[:n_coefficients]


def compute_mfcc(spec: SpectrogramMatrix, n_mfcc: int = 60) -> MfccMatrix:
    if spec.mel_bins < n_mfcc:
        raise InsufficientBins(
            'Spectrogram has fewer mel bins than requested coefficients.',
            mel_bins=spec.mel_bins, n_mfcc=n_mfcc,
        )
    values = scipy.fft.dct(spec.values, type=2, norm='ortho', axis=1)[:, :n_mfcc]
    return MfccMatrix(values=values)


def compute_representations(waveform: Waveform, cfg: DspConfig):
    spec = compute_log_mel(waveform, cfg)
    return spec, compute_mfcc(spec, cfg.n_mfcc)
