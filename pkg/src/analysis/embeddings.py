from typing import Optional

from torch import nn

from core.exceptions import ConfigError
from corpus.models import CorpusManifest, Side
from networks.inference import embed_recordings
from pipeline.services import BatchAssembler
from .models import LAYER_CHOICES, EmbeddingSet


def held_out_ids(manifest: CorpusManifest, task: Optional[str] = None):
    if task is None:
        return tuple(recording.recording_id for recording in manifest.recordings_on(Side.TEST))
    return tuple(recording.recording_id for recording in manifest.select(task, Side.TEST))


def extract_embeddings(
    model: nn.Module,
    manifest: CorpusManifest,
    assembler: BatchAssembler,
    layer: str = 'head_hidden',
    task: Optional[str] = None,
    batch_size: int = 64,
) -> EmbeddingSet:
    """
    Eval-path embeddings of test recordings: `shared_z` of every test
    recording (or of one task's), or `head_hidden` of `task`'s head over that
    task's test recordings.
    """
    if layer not in LAYER_CHOICES:
        raise ConfigError(f'Unknown embedding layer {layer!r}.', known=list(LAYER_CHOICES))
    if layer == 'head_hidden' and task is None:
        raise ConfigError('head_hidden embeddings belong to one task.')
    ids = held_out_ids(manifest, task)
    head = model.tasks.index(task) if task is not None else 0
    vectors = embed_recordings(model, assembler, ids, layer, head, batch_size)
    return EmbeddingSet(layer=layer, task=task, recording_ids=ids, vectors=vectors)
