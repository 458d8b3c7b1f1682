import logging
from pathlib import Path
from typing import Tuple

import numpy as np

from core.exceptions import FingerprintMismatch
from .exceptions import MissingRepresentation
from .models import DspConfig, MfccMatrix, SpectrogramMatrix

logger = logging.getLogger(__name__)


class RepresentationCache:
    """
    One `.npz` file per recording holding the log-mel matrix, the MFCC matrix
    and the fingerprint of the DspConfig that produced them.

    Matrices keep the dtype they were computed in, so `load` returns exactly
    what `compute_log_mel` and `compute_mfcc` produced.
    """

    def __init__(self, directory, cfg: DspConfig):
        self.directory = Path(directory)
        self.cfg = cfg
        self.fingerprint = cfg.fingerprint()

    def path(self, recording_id: str) -> Path:
        return self.directory / f'{recording_id}.npz'

    def status(self, recording_id: str) -> str:
        """'missing', 'match' or 'mismatch'."""
        path = self.path(recording_id)
        if not path.exists():
            return 'missing'
        with np.load(path, allow_pickle=False) as data:
            stored = str(data['fingerprint'])
        return 'match' if stored == self.fingerprint else 'mismatch'

    def save(self, recording_id: str, spec: SpectrogramMatrix, mfcc: MfccMatrix) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path(recording_id)
        with open(path, 'wb') as handle:
            np.savez(
                handle,
                spec=spec.values,
                mfcc=mfcc.values,
                frame_hop_s=np.float64(spec.frame_hop_s),
                fingerprint=np.array(self.fingerprint),
            )
        return path

    def load(self, recording_id: str) -> Tuple[SpectrogramMatrix, MfccMatrix]:
        path = self.path(recording_id)
        if not path.exists():
            raise MissingRepresentation(
                f'No cached representation for {recording_id}; run the extract command first.',
                recording_id=recording_id,
            )
        with np.load(path, allow_pickle=False) as data:
            stored = str(data['fingerprint'])
            if stored != self.fingerprint:
                logger.warning(f'Refusing cached representation {path.name}: fingerprint {stored} != {self.fingerprint}')
                raise FingerprintMismatch(
                    'Cached representation was produced under a different DSP configuration.',
                    recording_id=recording_id, cached=stored, expected=self.fingerprint,
                )
            spec = SpectrogramMatrix(values=data['spec'], frame_hop_s=float(data['frame_hop_s']))
            mfcc = MfccMatrix(values=data['mfcc'])
        return spec, mfcc
