import logging
from dataclasses import replace

import numpy as np
import torch
from torch import nn

from .encoders import build_encoder, load_pretrained
from .exceptions import ShapeError, UnknownModelKind
from .marvel import MarvelNet, RoutedHeads, check_input, initialize
from .models import ForwardOutput, ModelKind, NetworkSpec

logger = logging.getLogger(__name__)


class SingleBranchNet(nn.Module):
    """One MARVEL encoder over one input view, followed by a single binary head."""

    def __init__(self, spec: NetworkSpec):
        super().__init__()
        if len(spec.tasks) != 1:
            raise ShapeError('Single-branch baselines are single-task.', expected=1, actual=len(spec.tasks))
        self.network_spec = spec
        cfg = spec.config
        self.family, self.view = spec.kind.branch
        width = cfg.d_mfcc if self.family == 'resnet' else cfg.d_spec
        self.encoder = build_encoder(self.family, cfg.preset, width, cfg.leaky_slope)
        self.heads = RoutedHeads(spec.tasks, width, cfg)
        initialize(self, cfg)
        pretrained = cfg.pretrained_mfcc_path if self.family == 'resnet' else cfg.pretrained_spec_path
        if cfg.init == 'pretrained_file' and pretrained:
            load_pretrained(self.encoder, pretrained)

    @property
    def tasks(self):
        return self.network_spec.tasks

    def forward(self, mfcc, spec, tasks=None, task_index=None) -> ForwardOutput:
        if self.view == 'mfcc':
            check_input('mfcc', mfcc, self.network_spec.n_mfcc)
            embedding = self.encoder(mfcc)
        else:
            check_input('spec', spec, self.network_spec.mel_bins)
            embedding = self.encoder(spec)
        output = self.heads(embedding, tasks=tasks, task_index=task_index)
        output.shared_z = embedding
        if self.view == 'mfcc':
            output.h_mfcc = embedding
        else:
            output.h_spec = embedding
        return output


class FeatureMLP(nn.Module):
    """
    Handcrafted-feature baseline. Inputs are standardized with training-set
    statistics kept as buffers; missing values (NaN) become the training mean.
    """

    def __init__(self, spec: NetworkSpec):
        super().__init__()
        if not spec.feature_names:
            raise ShapeError('The MLP baseline needs a feature schema.', expected='>= 1 feature', actual=0)
        self.network_spec = spec
        cfg = spec.config
        width = len(spec.feature_names)
        layers = []
        for hidden in cfg.mlp_hidden:
            layers += [nn.Linear(width, hidden), nn.LeakyReLU(cfg.leaky_slope), nn.Dropout(cfg.dropout)]
            width = hidden
        self.body = nn.Sequential(*layers)
        self.out = nn.Linear(width, 1)
        self.register_buffer('mean', torch.zeros(len(spec.feature_names)))
        self.register_buffer('scale', torch.ones(len(spec.feature_names)))
        initialize(self, cfg)

    @property
    def tasks(self):
        return self.network_spec.tasks

    @property
    def feature_names(self):
        return self.network_spec.feature_names

    def fit_standardization(self, features: np.ndarray) -> None:
        with np.errstate(invalid='ignore'):
            mean = np.nanmean(features, axis=0)
            std = np.nanstd(features, axis=0)
        mean = np.where(np.isfinite(mean), mean, 0.0)
        std = np.where(np.isfinite(std) & (std > 0), std, 1.0)
        self.mean.copy_(torch.as_tensor(mean, dtype=self.mean.dtype))
        self.scale.copy_(torch.as_tensor(std, dtype=self.scale.dtype))

    def standardize(self, features: torch.Tensor) -> torch.Tensor:
        if features.dim() != 2 or features.shape[1] != len(self.feature_names):
            raise ShapeError(
                'Feature batch has the wrong width.',
                expected=[None, len(self.feature_names)], actual=list(features.shape),
            )
        standardized = (features - self.mean) / self.scale
        return torch.nan_to_num(standardized, nan=0.0)

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        return self.out(self.body(self.standardize(features))).squeeze(-1)

    def hidden(self, features: torch.Tensor) -> torch.Tensor:
        return self.body(self.standardize(features))

    def predict_logits(self, features: np.ndarray) -> np.ndarray:
        """Eval-mode logits of a numpy feature matrix."""
        was_training = self.training
        self.eval()
        with torch.no_grad():
            tensor = torch.as_tensor(np.asarray(features, dtype=np.float64), dtype=self.mean.dtype)
            logits = self(tensor).cpu().numpy().astype(np.float64)
        self.train(was_training)
        return logits


def build_model(spec: NetworkSpec) -> nn.Module:
    try:
        kind = ModelKind(spec.kind)
    except ValueError:
        raise UnknownModelKind(f'Unknown model kind {spec.kind!r}.', known=[kind.value for kind in ModelKind])
    if kind is ModelKind.MARVEL:
        return MarvelNet(spec)
    if kind is ModelKind.MLP:
        return FeatureMLP(spec)
    return SingleBranchNet(spec)


def build_baseline(kind, spec: NetworkSpec) -> nn.Module:
    """Single-task baseline of `kind` for the one task in `spec.tasks`."""
    try:
        kind = ModelKind(kind)
    except ValueError:
        raise UnknownModelKind(f'Unknown baseline kind {kind!r}.', known=[k.value for k in ModelKind if k.is_single_task])
    if not kind.is_single_task:
        raise UnknownModelKind('MARVEL is not a baseline.', kind=kind.value)
    return build_model(replace(spec, kind=kind))


def count_parameters(model: nn.Module) -> int:
    return sum(parameter.numel() for parameter in model.parameters() if parameter.requires_grad)
