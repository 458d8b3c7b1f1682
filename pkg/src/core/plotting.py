"""Headless matplotlib figures saved without timestamps or version stamps."""

from pathlib import Path

import matplotlib
from django.conf import settings

matplotlib.use(settings.MARVEL.get('MATPLOTLIB_BACKEND', 'Agg'))

import matplotlib.pyplot as plt  # noqa: E402


def new_figure(width=5.0, height=4.0):
    return plt.subplots(figsize=(width, height), dpi=100)


def save_figure(fig, path, fingerprint='') -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format='png', metadata={'Software': None, 'Description': f'marvel fingerprint {fingerprint}'})
    plt.close(fig)
    return path
