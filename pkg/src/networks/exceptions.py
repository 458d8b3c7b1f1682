from core.exceptions import ConfigError, FingerprintMismatch, MarvelError


class ShapeError(MarvelError):
    pass


class UnknownTask(MarvelError):
    pass


class UnknownModelKind(ConfigError):
    pass


class ConfigMismatch(FingerprintMismatch):
    """Checkpoint was written for another model configuration."""


class IntegrityError(MarvelError):
    """Checkpoint blob is unreadable or does not match its sidecar checksum."""
