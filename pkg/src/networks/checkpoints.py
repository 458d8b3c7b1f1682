"""
Checkpoints: a torch state-dict blob plus a JSON sidecar carrying the network
description, its fingerprint, the blob checksum and training metadata.
"""

import hashlib
import io
import logging
from pathlib import Path
from typing import Optional, Tuple

import torch
from torch import nn

from core.exceptions import MissingPrerequisite
from core.files import to_jsonable, read_json, write_json
from core.serializers import flatten_errors
from .baselines import build_model
from .exceptions import ConfigMismatch, IntegrityError
from .models import NetworkSpec
from .serializers import NetworkSpecSerializer

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + '.json')


def save(model: nn.Module, path, seed: int = 0, epoch: int = 0, metrics: Optional[dict] = None,
         run_fingerprint: str = '') -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buffer = io.BytesIO()
    torch.save(model.state_dict(), buffer)
    blob = buffer.getvalue()
    path.write_bytes(blob)
    spec: NetworkSpec = model.network_spec
    write_json(sidecar_path(path), {
        'version': CHECKPOINT_VERSION,
        'network': {
            'kind': spec.kind.value,
            'config': to_jsonable(spec.config),
            'tasks': list(spec.tasks),
            'n_mfcc': spec.n_mfcc,
            'mel_bins': spec.mel_bins,
            'feature_names': list(spec.feature_names),
            'dsp_fingerprint': spec.dsp_fingerprint,
        },
        'model_fingerprint': spec.fingerprint(),
        'fingerprint': run_fingerprint,
        'seed': seed,
        'epoch': epoch,
        'metrics': metrics or {},
        'sha256': hashlib.sha256(blob).hexdigest(),
    })
    logger.info(f'Saved checkpoint {path} (epoch {epoch}, seed {seed})')
    return path


def read_sidecar(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise MissingPrerequisite(f'Checkpoint {path} not found; run the train command first.', path=str(path))
    try:
        return read_json(sidecar_path(path))
    except (OSError, ValueError) as exc:
        raise IntegrityError(f'Checkpoint sidecar for {path} is unreadable: {exc}', path=str(path))


def load(path, expected: Optional[NetworkSpec] = None) -> Tuple[nn.Module, dict]:
    """Rebuild the model of a checkpoint; `expected` pins the network description."""
    path = Path(path)
    meta = read_sidecar(path)
    blob = path.read_bytes()
    if hashlib.sha256(blob).hexdigest() != meta.get('sha256'):
        raise IntegrityError(f'Checkpoint {path} does not match its recorded checksum.', path=str(path))

    serializer = NetworkSpecSerializer(data=meta.get('network', {}))
    if not serializer.is_valid():
        raise IntegrityError(
            f'Checkpoint sidecar for {path} is invalid: {"; ".join(flatten_errors(serializer.errors))}',
            path=str(path),
        )
    spec = serializer.save()
    if spec.fingerprint() != meta.get('model_fingerprint'):
        raise IntegrityError(f'Checkpoint {path} has an inconsistent model fingerprint.', path=str(path))
    if expected is not None and expected.fingerprint() != spec.fingerprint():
        logger.warning(f'Refusing checkpoint {path}: model fingerprint {spec.fingerprint()} != {expected.fingerprint()}')
        raise ConfigMismatch(
            'Checkpoint was trained under a different model, task or DSP configuration.',
            path=str(path), checkpoint=spec.fingerprint(), expected=expected.fingerprint(),
        )

    try:
        state = torch.load(io.BytesIO(blob), map_location='cpu', weights_only=True)
    except Exception as exc:
        raise IntegrityError(f'Checkpoint {path} cannot be decoded: {exc}', path=str(path))
    model = build_model(spec)
    try:
        model.load_state_dict(state)
    except RuntimeError as exc:
        raise IntegrityError(f'Checkpoint {path} does not fit its network: {exc}', path=str(path))
    model.eval()
    return model, meta
