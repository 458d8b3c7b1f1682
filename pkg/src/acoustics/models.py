from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from core.files import fingerprint


class Provenance(str, Enum):
    NATIVE = 'native'
    INGESTED = 'ingested'


@dataclass(frozen=True)
class DspConfig:
    """STFT, mel, pitch and formant analysis parameters."""
    sample_rate: int = 16000
    window_s: float = 0.025
    hop_s: float = 0.010
    n_fft: int = 512
    mel_bins: int = 128
    fmin: float = 0.0
    fmax: float = 8000.0
    log_floor: float = 1e-10
    n_mfcc: int = 60
    pitch_floor: float = 60.0
    pitch_ceiling: float = 400.0
    voicing_threshold: float = 0.45
    silence_threshold: float = 0.03
    octave_cost: float = 0.01
    max_formants: float = 5.0
    max_formant_hz: float = 5500.0
    formant_window_s: float = 0.025
    pre_emphasis_from_hz: float = 50.0
    workers: int = 1

    @property
    def window(self) -> int:
        return int(round(self.window_s * self.sample_rate))

    @property
    def hop(self) -> int:
        return int(round(self.hop_s * self.sample_rate))

    @property
    def pitch_window(self) -> int:
        # three periods of the lowest pitch
        return int(np.ceil(3.0 * self.sample_rate / self.pitch_floor))

    def frame_count(self, n_samples: int) -> int:
        return 1 + (n_samples - self.window) // self.hop

    def fingerprint(self) -> str:
        # workers does not change any output
        payload = {key: value for key, value in self.__dict__.items() if key != 'workers'}
        return fingerprint(payload)


@dataclass(frozen=True, eq=False)
class Waveform:
    samples: np.ndarray
    sample_rate: int

    @property
    def duration(self) -> float:
        return len(self.samples) / float(self.sample_rate)


@dataclass(frozen=True, eq=False)
class SpectrogramMatrix:
    """Log-mel power, shape (frames, mel bins)."""
    values: np.ndarray
    frame_hop_s: float

    @property
    def mel_bins(self) -> int:
        return self.values.shape[1]

    @property
    def frames(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class MfccMatrix:
    """Cepstral coefficients, shape (frames, coefficients), C0 included."""
    values: np.ndarray

    @property
    def frames(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class HandcraftedFeatureVector:
    """Named scalar descriptors of one recording; None marks a missing value."""
    values: Dict[str, Optional[float]]
    provenance: Provenance = Provenance.NATIVE

    def get(self, name, default=None):
        return self.values.get(name, default)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(self.values)


@dataclass(frozen=True)
class FeatureSchema:
    """Feature columns a table must provide; extra columns are kept as-is."""
    names: Tuple[str, ...] = field(default_factory=tuple)
    missing_sentinel: str = ''
