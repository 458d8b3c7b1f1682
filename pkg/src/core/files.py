import dataclasses
import hashlib
import json
import logging
import os
from pathlib import Path

from .exceptions import MarvelError

logger = logging.getLogger(__name__)


def to_jsonable(value):
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {field.name: to_jsonable(getattr(value, field.name)) for field in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, 'item') and callable(value.item):
        # numpy / torch scalars
        return value.item()
    return value


def canonical_json(payload) -> str:
    return json.dumps(to_jsonable(payload), sort_keys=True, separators=(',', ':'), allow_nan=False)


def fingerprint(payload) -> str:
    """Short sha256 over the canonical JSON form of `payload`."""
    return hashlib.sha256(canonical_json(payload).encode('utf-8')).hexdigest()[:16]


def write_json(path, payload):
    """Write `payload` with sorted keys so identical inputs give identical bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(to_jsonable(payload), sort_keys=True, indent=2, allow_nan=False)
    path.write_text(text + '\n', encoding='utf-8')
    return path


def read_json(path):
    with open(path, encoding='utf-8') as handle:
        return json.load(handle)


class OutputLock:
    """Exclusive lock file guarding one output directory."""

    def __init__(self, directory, filename='.marvel.lock'):
        self.path = Path(directory) / filename
        self._fd = None

    def acquire(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        try:
            self._fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise MarvelError(
                f'Output directory {self.path.parent} is locked by another command; '
                f'remove {self.path.name} if no command is running.'
            )
        os.write(self._fd, str(os.getpid()).encode('ascii'))
        return self

    def release(self):
        if self._fd is not None:
            os.close(self._fd)
            self._fd = None
            try:
                self.path.unlink()
            except FileNotFoundError:
                logger.warning(f'Lock file {self.path} vanished before release')

    def __enter__(self):
        return self.acquire()

    def __exit__(self, exc_type, exc, tb):
        self.release()
        return False


def append_jsonl(path, record):
    """Append one sorted-key JSON record as a line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'a', encoding='utf-8') as handle:
        handle.write(json.dumps(to_jsonable(record), sort_keys=True, allow_nan=False) + '\n')


def read_jsonl(path):
    with open(path, encoding='utf-8') as handle:
        return [json.loads(line) for line in handle if line.strip()]
