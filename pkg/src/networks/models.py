from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import torch

from core.files import fingerprint

# (d_mfcc, d_spec, default d_shared, default d_head_hidden)
PRESET_CHOICES = {
    'full': (512, 1280, 512, 128),
    'small': (128, 160, 128, 32),
    'tiny': (8, 12, 8, 4),
}


class ModelKind(str, Enum):
    MARVEL = 'marvel'
    EN_M = 'en_m'
    EN_S = 'en_s'
    RN_M = 'rn_m'
    RN_S = 'rn_s'
    MLP = 'mlp'

    @property
    def is_single_task(self) -> bool:
        return self is not ModelKind.MARVEL

    @property
    def branch(self) -> Optional[Tuple[str, str]]:
        """(encoder family, input view) of a single-branch baseline."""
        return {
            ModelKind.EN_M: ('efficientnet', 'mfcc'),
            ModelKind.EN_S: ('efficientnet', 'spec'),
            ModelKind.RN_M: ('resnet', 'mfcc'),
            ModelKind.RN_S: ('resnet', 'spec'),
        }.get(self)


@dataclass(frozen=True)
class ModelConfig:
    preset: str = 'full'
    d_shared: Optional[int] = None
    d_head_hidden: Optional[int] = None
    leaky_slope: float = 0.1
    dropout: float = 0.3
    bn_eps: float = 1e-5
    bn_momentum: float = 0.1
    init: str = 'random'
    pretrained_mfcc_path: Optional[str] = None
    pretrained_spec_path: Optional[str] = None
    mlp_hidden: Tuple[int, ...] = (256, 64)

    @property
    def d_mfcc(self) -> int:
        return PRESET_CHOICES[self.preset][0]

    @property
    def d_spec(self) -> int:
        return PRESET_CHOICES[self.preset][1]

    @property
    def fusion_width(self) -> int:
        return self.d_mfcc + self.d_spec

    @property
    def shared_width(self) -> int:
        return self.d_shared if self.d_shared is not None else PRESET_CHOICES[self.preset][2]

    @property
    def head_width(self) -> int:
        return self.d_head_hidden if self.d_head_hidden is not None else PRESET_CHOICES[self.preset][3]

    def fingerprint(self) -> str:
        return fingerprint(self)


@dataclass(frozen=True)
class NetworkSpec:
    """Everything needed to rebuild a model: kind, config, tasks and input geometry."""
    kind: ModelKind
    config: ModelConfig
    tasks: Tuple[str, ...]
    n_mfcc: int = 60
    mel_bins: int = 128
    feature_names: Tuple[str, ...] = ()
    dsp_fingerprint: str = ''

    def fingerprint(self) -> str:
        return fingerprint({
            'kind': self.kind.value,
            'config': self.config,
            'tasks': list(self.tasks),
            'n_mfcc': self.n_mfcc,
            'mel_bins': self.mel_bins,
            'feature_names': list(self.feature_names),
            'dsp': self.dsp_fingerprint,
        })


@dataclass(eq=False)
class ForwardOutput:
    """
    Per-task logits and hidden activations of the requested heads. `rows[k]`
    holds the batch positions that head k scored, in order.
    """
    logits: Dict[int, torch.Tensor]
    head_hidden: Dict[int, torch.Tensor]
    rows: Dict[int, torch.Tensor]
    shared_z: Optional[torch.Tensor] = None
    h_mfcc: Optional[torch.Tensor] = None
    h_spec: Optional[torch.Tensor] = None
    extras: Dict[str, torch.Tensor] = field(default_factory=dict)

    def probabilities(self, task: int) -> torch.Tensor:
        return torch.sigmoid(self.logits[task])

    def routed(self, batch_size: int) -> torch.Tensor:
        """Logit of every batch item under its own head, shape [batch_size]."""
        first = next(iter(self.logits.values()))
        out = first.new_zeros(batch_size)
        for task, logits in self.logits.items():
            out = out.index_put((self.rows[task],), logits)
        return out
