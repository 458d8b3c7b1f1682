"""
Convolutional encoders. Every encoder maps a [B, 1, T, F] map to a
globally average-pooled [B, width] embedding.
"""

import logging

import torch
from torch import nn
from torchvision import models
from torchvision.models.efficientnet import EfficientNet, MBConvConfig
from torchvision.models.resnet import BasicBlock

from .exceptions import IntegrityError

logger = logging.getLogger(__name__)


class ChannelProjection(nn.Module):
    """Learned 1x1 convolution lifting a single-channel map to 3 channels."""

    def __init__(self):
        super().__init__()
        self.conv = nn.Conv2d(1, 3, kernel_size=1)

    def forward(self, x):
        return self.conv(x)


class ResidualEncoder(nn.Module):
    """Compact residual stack built from torchvision's BasicBlock."""

    def __init__(self, widths=(16, 32, 64, 128)):
        super().__init__()
        self.stem = nn.Sequential(
            nn.Conv2d(1, widths[0], kernel_size=3, stride=1, padding=1, bias=False),
            nn.BatchNorm2d(widths[0]),
            nn.ReLU(inplace=True),
        )
        layers = []
        in_channels = widths[0]
        for index, width in enumerate(widths):
            stride = 1 if index == 0 else 2
            downsample = None
            if stride != 1 or in_channels != width:
                downsample = nn.Sequential(
                    nn.Conv2d(in_channels, width, kernel_size=1, stride=stride, bias=False),
                    nn.BatchNorm2d(width),
                )
            layers.append(BasicBlock(in_channels, width, stride=stride, downsample=downsample))
            in_channels = width
        self.layers = nn.Sequential(*layers)
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.width = widths[-1]

    def forward(self, x):
        return torch.flatten(self.pool(self.layers(self.stem(x))), 1)


class TinyEncoder(nn.Module):
    """Two conv blocks; used for gradient checks and fast tests."""

    def __init__(self, width: int, project: bool = False, leaky_slope: float = 0.1):
        super().__init__()
        in_channels = 3 if project else 1
        hidden = max(2, width // 2)
        self.projection = ChannelProjection() if project else nn.Identity()
        self.blocks = nn.Sequential(
            nn.Conv2d(in_channels, hidden, kernel_size=3, stride=2, padding=1),
            nn.BatchNorm2d(hidden),
            nn.LeakyReLU(leaky_slope),
            nn.Conv2d(hidden, width, kernel_size=3, stride=2, padding=1),
            nn.BatchNorm2d(width),
            nn.LeakyReLU(leaky_slope),
        )
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.width = width

    def forward(self, x):
        return torch.flatten(self.pool(self.blocks(self.projection(x))), 1)


def resnet18_encoder() -> nn.Module:
    net = models.resnet18(weights=None)
    net.conv1 = nn.Conv2d(1, 64, kernel_size=7, stride=2, padding=3, bias=False)
    net.fc = nn.Identity()
    return net


def efficientnet_b0_encoder() -> nn.Module:
    net = models.efficientnet_b0(weights=None)
    net.classifier = nn.Identity()
    return nn.Sequential(ChannelProjection(), net)


def small_efficientnet_encoder(last_channel: int = 160) -> nn.Module:
    setting = [
        MBConvConfig(1, 3, 1, 16, 16, 1),
        MBConvConfig(6, 3, 2, 16, 24, 1),
        MBConvConfig(6, 5, 2, 24, 40, 1),
        MBConvConfig(6, 3, 2, 40, 80, 1),
    ]
    net = EfficientNet(setting, dropout=0.0, stochastic_depth_prob=0.0, last_channel=last_channel)
    net.classifier = nn.Identity()
    return nn.Sequential(ChannelProjection(), net)


def build_encoder(family: str, preset: str, width: int, leaky_slope: float = 0.1) -> nn.Module:
    """`family` is 'resnet' or 'efficientnet'; `width` must match the preset's output width."""
    if preset == 'tiny':
        return TinyEncoder(width, project=family == 'efficientnet', leaky_slope=leaky_slope)
    if preset == 'small':
        if family == 'resnet':
            return ResidualEncoder(widths=(16, 32, 64, width))
        return small_efficientnet_encoder(last_channel=width)
    if family == 'resnet':
        return resnet18_encoder()
    return efficientnet_b0_encoder()


def load_pretrained(encoder: nn.Module, path) -> None:
    """
    Load a local torchvision-style state dict into an encoder. A 3-channel
    first convolution is averaged down when the encoder takes one channel.
    """
    try:
        state = torch.load(path, map_location='cpu', weights_only=True)
    except (OSError, RuntimeError) as exc:
        raise IntegrityError(f'Cannot read pretrained weights {path}: {exc}', path=str(path))
    target = encoder[1] if isinstance(encoder, nn.Sequential) and isinstance(encoder[0], ChannelProjection) else encoder
    own = target.state_dict()
    adapted = {}
    for name, tensor in state.items():
        if name not in own:
            continue
        if own[name].shape != tensor.shape and tensor.dim() == 4 and own[name].shape[1] == 1:
            tensor = tensor.mean(dim=1, keepdim=True)
        if own[name].shape == tensor.shape:
            adapted[name] = tensor
    skipped = sorted(set(own) - set(adapted))
    target.load_state_dict(adapted, strict=False)
    logger.info(f'Loaded {len(adapted)} pretrained tensors from {path}; {len(skipped)} left at initialization')
