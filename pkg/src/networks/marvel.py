import logging
from typing import Optional, Sequence

import torch
from torch import nn

from .encoders import build_encoder, load_pretrained
from .exceptions import ShapeError, UnknownTask
from .models import ForwardOutput, ModelConfig, NetworkSpec

logger = logging.getLogger(__name__)


def initialize(module: nn.Module, cfg: ModelConfig) -> None:
    """Kaiming fan-in weights, zero biases, unit BN scale; BN eps/momentum from cfg."""
    for layer in module.modules():
        if isinstance(layer, (nn.Conv2d, nn.Linear)):
            nn.init.kaiming_normal_(layer.weight, a=cfg.leaky_slope, mode='fan_in', nonlinearity='leaky_relu')
            if layer.bias is not None:
                nn.init.zeros_(layer.bias)
        elif isinstance(layer, (nn.BatchNorm1d, nn.BatchNorm2d)):
            nn.init.ones_(layer.weight)
            nn.init.zeros_(layer.bias)
            layer.eps = cfg.bn_eps
            layer.momentum = cfg.bn_momentum


class TaskHead(nn.Module):
    """Linear -> BN -> LeakyReLU -> Dropout -> Linear(1)."""

    def __init__(self, in_features: int, hidden: int, leaky_slope: float, dropout: float):
        super().__init__()
        self.hidden = nn.Sequential(
            nn.Linear(in_features, hidden),
            nn.BatchNorm1d(hidden),
            nn.LeakyReLU(leaky_slope),
        )
        self.dropout = nn.Dropout(dropout)
        self.out = nn.Linear(hidden, 1)

    def forward(self, z):
        hidden = self.hidden(z)
        return self.out(self.dropout(hidden)).squeeze(-1), hidden


def check_input(name: str, x: torch.Tensor, bins: int) -> None:
    if x.dim() != 4 or x.shape[1] != 1 or x.shape[3] != bins:
        raise ShapeError(
            f'{name} input must be [batch, 1, frames, {bins}].',
            input=name, expected=f'[B, 1, T, {bins}]', actual=list(x.shape),
        )


class RoutedHeads(nn.Module):
    """Task heads over a shared embedding, evaluated for requested tasks or routed per item."""

    def __init__(self, tasks: Sequence[str], in_features: int, cfg: ModelConfig):
        super().__init__()
        self.tasks = tuple(tasks)
        self.heads = nn.ModuleList(
            TaskHead(in_features, cfg.head_width, cfg.leaky_slope, cfg.dropout) for _ in self.tasks
        )

    def resolve(self, tasks) -> Sequence[int]:
        if tasks is None:
            return range(len(self.tasks))
        resolved = []
        for task in tasks:
            index = self.tasks.index(task) if isinstance(task, str) and task in self.tasks else task
            if not isinstance(index, int) or not 0 <= index < len(self.tasks):
                raise UnknownTask(f'Unknown task {task!r}.', task=task, known=list(self.tasks))
            resolved.append(index)
        return resolved

    def forward(self, z: torch.Tensor, tasks=None, task_index: Optional[torch.Tensor] = None) -> ForwardOutput:
        logits, hidden, rows = {}, {}, {}
        if task_index is not None:
            if task_index.shape != (z.shape[0],):
                raise ShapeError('task_index must hold one task per item.', expected=[z.shape[0]], actual=list(task_index.shape))
            for task in sorted(set(task_index.tolist())):
                self.resolve([task])
                positions = torch.nonzero(task_index == task, as_tuple=False).squeeze(1)
                logits[task], hidden[task] = self.heads[task](z.index_select(0, positions))
                rows[task] = positions
        else:
            everyone = torch.arange(z.shape[0], device=z.device)
            for task in self.resolve(tasks):
                logits[task], hidden[task] = self.heads[task](z)
                rows[task] = everyone
        return ForwardOutput(logits=logits, head_hidden=hidden, rows=rows)


class MarvelNet(nn.Module):
    """
    Dual-branch fusion network: a residual encoder over MFCCs and a
    compound-scaled encoder over the log-mel spectrogram, concatenated
    (MFCC first), a shared Linear/BN/LeakyReLU/Dropout layer, and one binary
    head per task.
    """

    def __init__(self, spec: NetworkSpec):
        super().__init__()
        self.network_spec = spec
        cfg = spec.config
        self.mfcc_encoder = build_encoder('resnet', cfg.preset, cfg.d_mfcc, cfg.leaky_slope)
        self.spec_encoder = build_encoder('efficientnet', cfg.preset, cfg.d_spec, cfg.leaky_slope)
        self.shared = nn.Sequential(
            nn.Linear(cfg.fusion_width, cfg.shared_width),
            nn.BatchNorm1d(cfg.shared_width),
            nn.LeakyReLU(cfg.leaky_slope),
            nn.Dropout(cfg.dropout),
        )
        self.heads = RoutedHeads(spec.tasks, cfg.shared_width, cfg)
        initialize(self, cfg)
        if cfg.init == 'pretrained_file':
            if cfg.pretrained_mfcc_path:
                load_pretrained(self.mfcc_encoder, cfg.pretrained_mfcc_path)
            if cfg.pretrained_spec_path:
                load_pretrained(self.spec_encoder, cfg.pretrained_spec_path)

    @property
    def tasks(self):
        return self.network_spec.tasks

    def embed(self, mfcc: torch.Tensor, spec: torch.Tensor):
        check_input('mfcc', mfcc, self.network_spec.n_mfcc)
        check_input('spec', spec, self.network_spec.mel_bins)
        if mfcc.shape[0] != spec.shape[0]:
            raise ShapeError('mfcc and spec batches differ in size.', expected=mfcc.shape[0], actual=spec.shape[0])
        h_mfcc = self.mfcc_encoder(mfcc)
        h_spec = self.spec_encoder(spec)
        fused = torch.cat([h_mfcc, h_spec], dim=1)
        if fused.shape[1] != self.network_spec.config.fusion_width:
            raise ShapeError('Fused embedding width mismatch.', expected=self.network_spec.config.fusion_width, actual=fused.shape[1])
        return h_mfcc, h_spec, self.shared(fused)

    def forward(self, mfcc, spec, tasks=None, task_index=None) -> ForwardOutput:
        h_mfcc, h_spec, z = self.embed(mfcc, spec)
        output = self.heads(z, tasks=tasks, task_index=task_index)
        output.shared_z, output.h_mfcc, output.h_spec = z, h_mfcc, h_spec
        return output
