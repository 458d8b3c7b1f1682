"""
Embedding/feature correlation: for every handcrafted feature, the embedding
dimension with the largest absolute Pearson r.
"""

import logging
import math
from typing import List, Mapping, Sequence

import numpy as np

from acoustics.models import HandcraftedFeatureVector
from .exceptions import InsufficientData, UndefinedCorrelation
from .models import CorrelationReport, EmbeddingSet, FeatureCorrelation

logger = logging.getLogger(__name__)


def _centered(values: np.ndarray) -> np.ndarray:
    return values - values.mean(axis=0)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation from centred sums, clamped to [-1, 1]."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise UndefinedCorrelation('Inputs must be vectors of equal length.', x=list(x.shape), y=list(y.shape))
    if len(x) < 2:
        raise InsufficientData('Correlation needs at least two pairs.', n=len(x))
    xc, yc = _centered(x), _centered(y)
    sxx, syy = float(np.dot(xc, xc)), float(np.dot(yc, yc))
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelation('Correlation with a constant input is undefined.', n=len(x))
    r = float(np.dot(xc, yc)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def best_dimension(x: np.ndarray, embedding: np.ndarray):
    """(dim, r) maximising |r| between `x` and the columns of `embedding`; constant columns are skipped."""
    xc = _centered(x)
    ec = _centered(embedding)
    sxx = float(np.dot(xc, xc))
    see = np.einsum('ij,ij->j', ec, ec)
    usable = see > 0.0
    if sxx == 0.0 or not usable.any():
        raise UndefinedCorrelation('No non-constant pair to correlate.')
    r = np.zeros(embedding.shape[1])
    r[usable] = (ec[:, usable].T @ xc) / np.sqrt(see[usable] * sxx)
    r = np.clip(r, -1.0, 1.0)
    # ties resolve to the lowest dimension
    dim = int(np.argmax(np.where(usable, np.abs(r), -1.0)))
    return dim, float(r[dim])


def _feature_names(vectors: Sequence[HandcraftedFeatureVector]) -> List[str]:
    names: List[str] = []
    seen = set()
    for vector in vectors:
        for name in vector.names:
            if name not in seen:
                seen.add(name)
                names.append(name)
    return sorted(names)


def correlate(
    embeddings: EmbeddingSet,
    features: Mapping[str, HandcraftedFeatureVector],
    task: str,
    min_common: int = 10,
) -> CorrelationReport:
    """
    One row per feature, sorted by |r| descending. Recordings missing a
    feature value are dropped for that feature only.
    """
    rows = embeddings.rows()
    common = sorted(set(rows) & set(features))
    if len(common) < min_common:
        raise InsufficientData(
            f'Only {len(common)} recordings have both an embedding and features for {task}.',
            task=task, common=len(common), required=min_common,
        )
    matrix = np.stack([rows[recording_id] for recording_id in common])

    report = CorrelationReport(task=task, layer=embeddings.layer)
    for name in _feature_names([features[recording_id] for recording_id in common]):
        raw = [features[recording_id].get(name) for recording_id in common]
        mask = np.array([value is not None and math.isfinite(value) for value in raw])
        n = int(mask.sum())
        if n < min_common:
            logger.warning(f'{task}: feature {name} has {n} usable values, skipped')
            report.skipped.append(name)
            continue
        if n < len(common):
            logger.debug(f'{task}: feature {name} drops {len(common) - n} recordings pairwise')
        x = np.array([value for value, keep in zip(raw, mask) if keep], dtype=np.float64)
        try:
            dim, r = best_dimension(x, matrix[mask])
        except UndefinedCorrelation:
            report.skipped.append(name)
            continue
        report.rows.append(FeatureCorrelation(feature=name, best_dim=dim, r=r, n=n))

    report.rows.sort(key=lambda row: (-abs(row.r), row.feature))
    return report
