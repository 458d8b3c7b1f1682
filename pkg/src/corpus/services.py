import json
import logging
from pathlib import Path

from core.exceptions import MissingPrerequisite
from core.files import read_json, write_json
from core.serializers import flatten_errors
from .exceptions import ManifestError
from .models import CorpusManifest
from .serializers import ManifestSerializer, manifest_to_document

logger = logging.getLogger(__name__)

MANIFEST_FILENAME = 'manifest.json'


def load_manifest(path) -> CorpusManifest:
    path = Path(path)
    if not path.exists():
        raise MissingPrerequisite(
            f'{path} not found; run the synth command (and split for split manifests) first.',
            path=str(path),
        )
    try:
        document = read_json(path)
    except json.JSONDecodeError as exc:
        raise ManifestError(f'{path} is not valid JSON: {exc}', path=str(path))
    document.pop('fingerprint', None)
    serializer = ManifestSerializer(data=document)
    if not serializer.is_valid():
        problems = '; '.join(flatten_errors(serializer.errors))
        logger.error(f'Invalid manifest {path}: {problems}')
        raise ManifestError(f'Invalid manifest {path}: {problems}', path=str(path))
    return serializer.save()


def save_manifest(path, manifest: CorpusManifest, run_fingerprint=None) -> Path:
    document = manifest_to_document(manifest)
    if run_fingerprint is not None:
        document['fingerprint'] = run_fingerprint
    return write_json(path, document)
