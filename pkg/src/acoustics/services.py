import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, Iterable

from core.exceptions import FingerprintMismatch
from .audio import load_waveform, wav_path
from .cache import RepresentationCache
from .dsp import compute_representations
from .models import DspConfig, HandcraftedFeatureVector
from .native import compute_native_features
from .tables import write_feature_table

logger = logging.getLogger(__name__)

NATIVE_TABLE = 'native_features.csv'


def _extract_one(job):
    recording_id, path, cfg, need_representations = job
    waveform = load_waveform(path)
    representations = compute_representations(waveform, cfg) if need_representations else None
    return recording_id, representations, compute_native_features(waveform, cfg)


def extract_corpus(
    recording_ids: Iterable[str],
    wav_dir,
    cache_dir,
    cfg: DspConfig,
    features_path=None,
    force: bool = False,
) -> Dict[str, HandcraftedFeatureVector]:
    """
    Fill the representation cache and compute native features for every
    recording. Existing cache entries with a matching fingerprint are reused;
    entries from another DSP configuration are refused unless `force`.
    """
    cache = RepresentationCache(cache_dir, cfg)
    recording_ids = sorted(recording_ids)

    jobs = []
    for recording_id in recording_ids:
        status = cache.status(recording_id)
        if status == 'mismatch' and not force:
            raise FingerprintMismatch(
                'Representation cache was built under a different DSP configuration; rerun with --force.',
                recording_id=recording_id, expected=cache.fingerprint,
            )
        jobs.append((recording_id, wav_path(wav_dir, recording_id), cfg, status != 'match'))

    reused = sum(1 for job in jobs if not job[3])
    logger.info(f'Extracting {len(jobs)} recordings ({reused} cached) with {cfg.workers} worker(s)')

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            # map() yields in submission order, i.e. sorted by recording_id
            results = list(pool.map(_extract_one, jobs, chunksize=4))
    else:
        results = [_extract_one(job) for job in jobs]

    features = {}
    for recording_id, representations, vector in results:
        if representations is not None:
            cache.save(recording_id, *representations)
        features[recording_id] = vector

    if features_path is not None:
        write_feature_table(Path(features_path), features)
        logger.info(f'Wrote native feature table {features_path}')
    return features
