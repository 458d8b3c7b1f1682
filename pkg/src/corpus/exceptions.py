from core.exceptions import ConfigError


class CannotStratify(ConfigError):
    """A task stratum has too few participants for a two-sided split."""


class ManifestError(ConfigError):
    """manifest.json is missing fields, malformed or of another version."""
