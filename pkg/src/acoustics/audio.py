"""PCM WAV store: 16-bit files named `<recording_id>.wav`."""

import logging
from pathlib import Path

import numpy as np
import soundfile as sf

from .exceptions import InvalidSignal
from .models import Waveform

logger = logging.getLogger(__name__)

WAV_SUBTYPE = 'PCM_16'


def wav_path(directory, recording_id: str) -> Path:
    return Path(directory) / f'{recording_id}.wav'


def write_waveform(path, waveform: Waveform) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    samples = np.asarray(waveform.samples, dtype=np.float64)
    if not np.all(np.isfinite(samples)):
        raise InvalidSignal('Refusing to store non-finite samples.', path=str(path))
    peak = np.max(np.abs(samples)) if len(samples) else 0.0
    if peak > 1.0:
        logger.warning(f'Clipping {path.name}: peak amplitude {peak:.3f} exceeds 1.0')
    sf.write(str(path), np.clip(samples, -1.0, 1.0), waveform.sample_rate, subtype=WAV_SUBTYPE, format='WAV')
    return path


def load_waveform(path) -> Waveform:
    """Read a WAV file as float64 mono; multichannel files are averaged."""
    samples, sample_rate = sf.read(str(path), dtype='float64', always_2d=True)
    return Waveform(samples=samples.mean(axis=1), sample_rate=int(sample_rate))
