"""Crop/pad to a fixed frame count and the train-time masking/noise transforms."""

import numpy as np

from .models import AugmentConfig, CropMode


def fix_length(x: np.ndarray, fixed_frames: int, mode: CropMode, rng: np.random.Generator = None) -> np.ndarray:
    """
    Exactly `fixed_frames` rows. Shorter inputs get zero rows appended; longer
    ones are cropped at a random offset, centered, or cut at the end for
    `pad` mode.
    """
    mode = CropMode(mode)
    frames = x.shape[0]
    if frames == fixed_frames:
        return x
    if frames < fixed_frames:
        padding = np.zeros((fixed_frames - frames,) + x.shape[1:], dtype=x.dtype)
        return np.concatenate([x, padding], axis=0)
    if mode is CropMode.RANDOM_CROP:
        offset = int(rng.integers(0, frames - fixed_frames + 1))
    elif mode is CropMode.CENTER_CROP:
        offset = (frames - fixed_frames) // 2
    else:
        offset = 0
    return x[offset:offset + fixed_frames]


def _band(rng, dimension: int, size: int):
    start = int(rng.integers(0, dimension - size + 1))
    return slice(start, start + size)


def augment_mfcc(x: np.ndarray, cfg: AugmentConfig, rng: np.random.Generator) -> np.ndarray:
    """Gaussian noise, then one coefficient band and one frame band zeroed; (frames, coefficients) layout."""
    frames, coefficients = x.shape
    fire_noise, fire_freq, fire_time = rng.random(3) < (
        cfg.noise_probability, cfg.mfcc_freq_mask_probability, cfg.mfcc_time_mask_probability,
    )
    out = x.astype(np.float64, copy=True)
    if fire_noise and cfg.mfcc_noise_sigma > 0:
        out += rng.normal(0.0, cfg.mfcc_noise_sigma, size=out.shape)
    if fire_freq and 0 < cfg.mfcc_freq_mask_bins < coefficients:
        out[:, _band(rng, coefficients, cfg.mfcc_freq_mask_bins)] = 0.0
    if fire_time and 0 < cfg.mfcc_time_mask_frames < frames:
        out[_band(rng, frames, cfg.mfcc_time_mask_frames), :] = 0.0
    return out.astype(x.dtype, copy=False)


def augment_spec(x: np.ndarray, cfg: AugmentConfig, rng: np.random.Generator) -> np.ndarray:
    """SpecAugment-style masks filled with the mean of the unmasked input."""
    frames, bins = x.shape
    fire_freq, fire_time = rng.random(2) < (cfg.spec_freq_mask_probability, cfg.spec_time_mask_probability)
    fill = x.mean()
    out = x.copy()
    freq_width = int(round(cfg.spec_freq_mask_fraction * bins))
    time_width = int(round(cfg.spec_time_mask_fraction * frames))
    if fire_freq and 0 < freq_width < bins:
        out[:, _band(rng, bins, freq_width)] = fill
    if fire_time and 0 < time_width < frames:
        out[_band(rng, frames, time_width), :] = fill
    return out
