import logging
from pathlib import Path

from acoustics.services import NATIVE_TABLE
from core.exceptions import FingerprintMismatch, MissingPrerequisite
from core.files import read_json, write_json
from corpus.services import MANIFEST_FILENAME

logger = logging.getLogger(__name__)

STAGE_FILENAME = 'stage.json'

# stage -> command that produces it
PRODUCERS = {
    'synth': 'synth',
    'extract': 'extract',
    'split': 'split',
    'train': 'train',
    'eval': 'eval',
    'analyze': 'analyze',
}


class OutputLayout:
    """Paths of every artifact under one output directory."""

    def __init__(self, root):
        self.root = Path(root)

    @property
    def corpus_dir(self) -> Path:
        return self.root / 'corpus'

    @property
    def wav_dir(self) -> Path:
        return self.corpus_dir / 'wav'

    @property
    def corpus_manifest(self) -> Path:
        return self.corpus_dir / MANIFEST_FILENAME

    @property
    def features_dir(self) -> Path:
        return self.root / 'features'

    @property
    def cache_dir(self) -> Path:
        return self.features_dir / 'cache'

    @property
    def feature_table(self) -> Path:
        return self.features_dir / NATIVE_TABLE

    @property
    def splits_dir(self) -> Path:
        return self.root / 'splits'

    @property
    def split_manifest(self) -> Path:
        return self.splits_dir / MANIFEST_FILENAME

    def runs_dir(self, model: str) -> Path:
        return self.root / 'runs' / model

    def eval_dir(self, model: str) -> Path:
        return self.root / 'eval' / model

    @property
    def comparison_dir(self) -> Path:
        return self.root / 'eval'

    @property
    def analysis_dir(self) -> Path:
        return self.root / 'analysis'

    @property
    def summary(self) -> Path:
        return self.root / 'summary.md'

    @property
    def config_echo(self) -> Path:
        return self.root / 'config.json'

    @property
    def overrides(self) -> Path:
        return self.root / 'overrides.json'


def require(path: Path, stage: str) -> Path:
    if not Path(path).exists():
        producer = PRODUCERS[stage]
        logger.error(f'Missing {path}; produced by the {producer} command')
        raise MissingPrerequisite(f'{path} not found; run the {producer} command first.', path=str(path))
    return Path(path)


def check_stage(directory: Path, stage: str, fingerprint: str, force: bool = False) -> None:
    """Refuse to overwrite a stage's outputs built under another configuration unless forced."""
    stamp_path = Path(directory) / STAGE_FILENAME
    if not stamp_path.exists():
        return
    recorded = read_json(stamp_path).get('fingerprint')
    if recorded == fingerprint:
        return
    if force:
        logger.warning(f'Overwriting {stage} outputs in {directory} (fingerprint {recorded} -> {fingerprint})')
        return
    logger.warning(f'Refusing to overwrite {stage} outputs in {directory}: fingerprint {recorded} != {fingerprint}')
    raise FingerprintMismatch(
        f'{directory} holds {stage} outputs from a different configuration; rerun with --force to replace them.',
        stage=stage, recorded=recorded, expected=fingerprint,
    )


def verify_stage(directory: Path, stage: str, fingerprint: str) -> None:
    """A later stage consuming `directory` needs it built under the current configuration."""
    stamp_path = require(Path(directory) / STAGE_FILENAME, stage)
    recorded = read_json(stamp_path).get('fingerprint')
    if recorded != fingerprint:
        logger.warning(f'{stage} outputs in {directory} have fingerprint {recorded}, expected {fingerprint}')
        raise FingerprintMismatch(
            f'{directory} was produced under a different configuration; rerun the {PRODUCERS[stage]} command.',
            stage=stage, recorded=recorded, expected=fingerprint,
        )


def read_stamp(directory: Path) -> dict:
    stamp_path = Path(directory) / STAGE_FILENAME
    return read_json(stamp_path) if stamp_path.exists() else {}


def stamp_stage(directory: Path, stage: str, fingerprint: str, run_fingerprint: str = '', **extra) -> Path:
    return write_json(Path(directory) / STAGE_FILENAME, {
        'stage': stage, 'fingerprint': fingerprint, 'run_fingerprint': run_fingerprint, **extra,
    })
