"""Eval-path scoring and embedding of cached recordings."""

from typing import Sequence

import numpy as np
import torch
from torch import nn


def _chunks(items: Sequence, size: int):
    for start in range(0, len(items), size):
        yield items[start:start + size]


def _forward(model: nn.Module, assembler, recording_ids: Sequence[str], task: int):
    mfcc, spec = assembler.eval_inputs(recording_ids)
    dtype = next(model.parameters()).dtype
    mfcc = torch.as_tensor(mfcc, dtype=dtype).unsqueeze(1)
    spec = torch.as_tensor(spec, dtype=dtype).unsqueeze(1)
    return model(mfcc, spec, tasks=[task])


def score_recordings(model: nn.Module, assembler, recording_ids: Sequence[str], task: int,
                     batch_size: int = 64) -> np.ndarray:
    """Logits of head `task` for each recording, in the given order."""
    model.eval()
    scores = []
    with torch.no_grad():
        for chunk in _chunks(list(recording_ids), batch_size):
            scores.append(_forward(model, assembler, chunk, task).logits[task].double().numpy())
    return np.concatenate(scores) if scores else np.zeros(0)


def embed_recordings(model: nn.Module, assembler, recording_ids: Sequence[str], layer: str, task: int = 0,
                     batch_size: int = 64) -> np.ndarray:
    """`shared_z` or `head_hidden` activations, one row per recording."""
    model.eval()
    rows = []
    with torch.no_grad():
        for chunk in _chunks(list(recording_ids), batch_size):
            output = _forward(model, assembler, chunk, task)
            tensor = output.shared_z if layer == 'shared_z' else output.head_hidden[task]
            rows.append(tensor.double().numpy())
    return np.concatenate(rows) if rows else np.zeros((0, 0))
