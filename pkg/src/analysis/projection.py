import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Tuple

import numpy as np
import pandas as pd
from sklearn.manifold import TSNE

from core.plotting import new_figure, save_figure
from .exceptions import InsufficientData
from .models import EmbeddingSet

logger = logging.getLogger(__name__)

MIN_POINTS = 20


@dataclass(frozen=True, eq=False)
class Projection:
    recording_ids: Tuple[str, ...]
    labels: np.ndarray
    points: np.ndarray      # (n, 2)
    perplexity: float


def tsne(
    embeddings: EmbeddingSet,
    labels: Mapping[str, int],
    seed: int = 0,
    perplexity: float = 30.0,
    max_iter: int = 1000,
) -> Projection:
    """Two-dimensional t-SNE with PCA initialisation; perplexity is capped at (n - 1) / 3."""
    n = len(embeddings.recording_ids)
    if n < MIN_POINTS:
        raise InsufficientData(f't-SNE needs at least {MIN_POINTS} points.', points=n, task=embeddings.task)
    perplexity = min(perplexity, (n - 1) / 3.0)
    model = TSNE(n_components=2, perplexity=perplexity, init='pca', max_iter=max_iter, random_state=seed)
    points = model.fit_transform(embeddings.vectors)
    return Projection(
        recording_ids=embeddings.recording_ids,
        labels=np.array([labels[recording_id] for recording_id in embeddings.recording_ids], dtype=np.int64),
        points=np.asarray(points, dtype=np.float64),
        perplexity=perplexity,
    )


def write_projection(projection: Projection, csv_path, png_path, title: str = '', fingerprint: str = ''):
    frame = pd.DataFrame({
        'recording_id': projection.recording_ids,
        'label': projection.labels,
        'x': projection.points[:, 0],
        'y': projection.points[:, 1],
    })
    Path(csv_path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(csv_path, index=False, float_format='%.17g', lineterminator='\n')

    fig, ax = new_figure(5.0, 5.0)
    for label, name, color in ((0, 'negative', 'tab:blue'), (1, 'positive', 'tab:red')):
        selected = projection.labels == label
        ax.scatter(projection.points[selected, 0], projection.points[selected, 1], s=12, c=color, label=name, alpha=0.8)
    ax.set_title(title)
    ax.set_xticks([])
    ax.set_yticks([])
    ax.legend(loc='best')
    save_figure(fig, png_path, fingerprint)
    logger.info(f'Wrote t-SNE projection {csv_path}')
    return Path(csv_path), Path(png_path)
